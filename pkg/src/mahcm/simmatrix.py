"""Condensed pairwise-distance matrix for a subset.

Stores the n(n-1)/2 upper-triangular entries flat in row-major order. This is
the O(n^2) object whose size the occupancy cap exists to bound, so a build can
carry a hard size guard.
"""

import struct
from dataclasses import dataclass

import numpy as np

from . import kernels
from .data import SubsetView
from .dtw import dtw_distance
from .errors import DataError, InvariantError

_MAGIC = b"MAHCCMX1"


def condensed_size(n: int) -> int:
    """Number of stored entries for n objects."""
    return n * (n - 1) // 2


def condensed_index(i: int, j: int, n: int) -> int:
    """Flat position of pair (i, j) with 0 <= i < j < n."""
    if not (0 <= i < j < n):
        raise DataError(f"invalid pair ({i}, {j}) for n={n}; need 0 <= i < j < n")
    return i * n - i * (i + 1) // 2 + j - i - 1


@dataclass
class CondensedMatrix:
    """Flat upper-triangular distance store; immutable once built.

    ward_ahc consumes ``values`` in place; copy first if the matrix is needed
    afterwards.
    """

    n: int
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (condensed_size(self.n),):
            raise DataError(
                f"condensed matrix for n={self.n} needs {condensed_size(self.n)} "
                f"values, got {self.values.shape}"
            )

    def get(self, i: int, j: int) -> float:
        """Symmetric access; the diagonal is implicitly zero and rejected."""
        if i == j:
            raise DataError(f"diagonal access ({i}, {i}) rejected")
        if i > j:
            i, j = j, i
        return float(self.values[condensed_index(i, j, self.n)])

    def copy(self) -> "CondensedMatrix":
        return CondensedMatrix(n=self.n, values=self.values.copy())


def build_matrix(view: SubsetView, distance=None, workers: int = 1,
                 size_cap=None, squared_cost: bool = False,
                 normalize: bool = False) -> CondensedMatrix:
    """All pairwise distances between the members of a subset.

    With the default alignment distance the fill runs on the compiled kernel,
    partitioned over flat pair indices; any ``workers`` count produces the
    identical array. A custom ``distance(segment_a, segment_b)`` callable
    falls back to a sequential loop.

    ``size_cap`` is the occupancy guard: building a matrix for a subset larger
    than the cap is a caller bug and raises InvariantError.
    """
    m = len(view)
    if m < 2:
        raise DataError(f"cannot build a pairwise matrix for {m} < 2 objects")
    if size_cap is not None and m > size_cap:
        raise InvariantError(
            f"matrix requested for subset of {m} objects, above the cap {size_cap}"
        )

    if distance is None:
        values = kernels.pairwise_condensed(
            view.dataset.flat, view.dataset.offsets, view.indices,
            workers=workers, squared_cost=squared_cost, normalize=normalize,
        )
    else:
        values = np.empty(condensed_size(m), dtype=np.float64)
        f = 0
        for i in range(m - 1):
            si = view.segment(i)
            for j in range(i + 1, m):
                values[f] = distance(si, view.segment(j))
                f += 1

    if not np.all(np.isfinite(values)):
        bad = int(np.flatnonzero(~np.isfinite(values))[0])
        i, j = _unrank(bad, m)
        raise DataError(
            f"non-finite distance for pair (segment {view.segment(i).id}, "
            f"segment {view.segment(j).id})"
        )
    return CondensedMatrix(n=m, values=values)


def _unrank(f: int, n: int):
    i = 0
    while (i + 1) * n - (i + 1) * (i + 2) // 2 <= f:
        i += 1
    j = f - (i * n - i * (i + 1) // 2) + i + 1
    return i, j


def dtw_matrix(view: SubsetView, workers: int = 1, size_cap=None,
               squared_cost: bool = False, normalize: bool = False) -> CondensedMatrix:
    """build_matrix with the default alignment distance (kernel path)."""
    return build_matrix(view, None, workers, size_cap, squared_cost, normalize)


def spot_check(matrix: CondensedMatrix, view: SubsetView, i: int, j: int,
               squared_cost: bool = False, normalize: bool = False) -> float:
    """Recompute one pair directly; handy for verification."""
    direct = dtw_distance(view.segment(i), view.segment(j),
                          squared_cost=squared_cost, normalize=normalize)
    return abs(direct - matrix.get(i, j))


def dump_matrix(matrix: CondensedMatrix, path) -> None:
    """Binary cache format: magic, n, count (little-endian int64), raw float64."""
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<q", matrix.n))
        fh.write(struct.pack("<q", matrix.values.shape[0]))
        fh.write(matrix.values.astype("<f8", copy=False).tobytes())


def load_matrix(path) -> CondensedMatrix:
    with open(path, "rb") as fh:
        magic = fh.read(len(_MAGIC))
        if magic != _MAGIC:
            raise DataError(f"{path}: not a condensed-matrix file")
        n = struct.unpack("<q", fh.read(8))[0]
        count = struct.unpack("<q", fh.read(8))[0]
        if count != condensed_size(n):
            raise DataError(f"{path}: header count {count} != n(n-1)/2 for n={n}")
        data = np.frombuffer(fh.read(8 * count), dtype="<f8").astype(np.float64)
    if data.shape[0] != count:
        raise DataError(f"{path}: truncated value block")
    return CondensedMatrix(n=n, values=data)
