"""Backend selection for the hot numeric kernels.

Kernels ship in two flavours: numba ``@njit`` (default when numba imports
cleanly) and a pure-numpy path. Set ``MAHCM_NO_NUMBA=1`` to force the numpy
path. Both paths perform the same IEEE-754 operations in the same order, so
switching backends never changes any computed result.
"""

import os

_ENV_FLAG = "MAHCM_NO_NUMBA"

_disabled = os.environ.get(_ENV_FLAG, "").strip().lower() in ("1", "true", "yes", "on")

try:
    import numba  # noqa: F401

    _numba_importable = True
except ImportError:
    _numba_importable = False

NUMBA_AVAILABLE = _numba_importable
NUMBA_ENABLED = _numba_importable and not _disabled


def using_numba() -> bool:
    """True when the compiled kernels are active."""
    return NUMBA_ENABLED


def max_threads() -> int:
    if NUMBA_ENABLED:
        import numba

        return int(numba.config.NUMBA_NUM_THREADS)
    return 1


def set_kernel_threads(workers: int) -> None:
    """Bound the parallelism of the compiled kernels.

    Results never depend on the thread count; this only affects speed.
    The numpy path is single-threaded and ignores the setting.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    if NUMBA_ENABLED:
        import numba

        numba.set_num_threads(min(workers, numba.config.NUMBA_NUM_THREADS))
