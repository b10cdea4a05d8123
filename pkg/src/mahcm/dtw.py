"""Alignment distance between two segments, the sole similarity primitive.

The distance is the minimum over all monotone warping paths (diagonal,
horizontal and vertical steps, both endpoints anchored) of the summed
per-frame Euclidean cost. No warping window, no slope weights.
"""

from typing import Union

import numpy as np

from . import kernels
from .data import Segment
from .errors import DataError

ArrayLike = Union[Segment, np.ndarray, list]


def _as_frames(x: ArrayLike) -> np.ndarray:
    if isinstance(x, Segment):
        return x.frames
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2 or arr.shape[0] < 1:
        raise DataError("expected a Segment or a non-empty (n, d) array")
    return np.ascontiguousarray(arr)


def frame_cost(x, y) -> float:
    """Euclidean distance between two feature vectors of equal dimension."""
    xv = np.asarray(x, dtype=np.float64).ravel()
    yv = np.asarray(y, dtype=np.float64).ravel()
    if xv.shape[0] != yv.shape[0]:
        raise DataError(f"dimension mismatch: {xv.shape[0]} vs {yv.shape[0]}")
    return float(np.linalg.norm(xv - yv))


def dtw_distance(a: ArrayLike, b: ArrayLike, *, squared_cost: bool = False,
                 normalize: bool = False) -> float:
    """Alignment cost between two segments.

    ``squared_cost`` switches the local cost to squared Euclidean.
    ``normalize`` divides the summed cost by len(a) + len(b); off by default,
    matching what the clustering stages consume.
    """
    fa = _as_frames(a)
    fb = _as_frames(b)
    if fa.shape[1] != fb.shape[1]:
        raise DataError(f"dimension mismatch: {fa.shape[1]} vs {fb.shape[1]}")
    return kernels.dtw_pair(fa, fb, squared_cost, normalize)
