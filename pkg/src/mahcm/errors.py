"""Exception types shared across the package.

The CLI maps these onto exit codes: usage errors exit 1, DataError exits 2,
InvariantError exits 3.
"""


class DataError(ValueError):
    """Malformed or inconsistent input data (bad file, dimension mismatch, ...)."""


class InvariantError(RuntimeError):
    """An internal consistency check failed; indicates a bug, not bad input."""
