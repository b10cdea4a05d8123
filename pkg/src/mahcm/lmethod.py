"""Knee detection on the merge-height curve: pick the cluster count where the
curve is best explained by two straight lines.

The curve pairs each candidate cluster count c (from 2 up) with the height of
the merge undone when moving to c clusters. The selected count minimizes the
point-count-weighted total RMSE of a left fit (x <= c) and a right fit
(x > c); each side needs at least two points, ties go to the smallest c.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DataError


@dataclass(frozen=True)
class EvaluationCurve:
    """Points (x = cluster count, y = merge height), x consecutive from 2."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=np.int64)
        y = np.asarray(self.y, dtype=np.float64)
        if x.shape != y.shape or x.ndim != 1 or x.shape[0] == 0:
            raise DataError("curve needs matching non-empty x and y arrays")
        if x[0] != 2 or np.any(np.diff(x) != 1):
            raise DataError("curve x values must be consecutive integers starting at 2")
        if np.any(y < 0):
            raise DataError("curve y values must be non-negative")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def __len__(self) -> int:
        return self.x.shape[0]


@dataclass(frozen=True)
class LineFit:
    slope: float
    intercept: float
    rmse: float


@dataclass(frozen=True)
class KneeResult:
    k: int
    fallback: bool = False


def fit_line(x, y) -> LineFit:
    """Ordinary least squares over >= 2 points; rmse is the RMS residual."""
    xv = np.asarray(x, dtype=np.float64)
    yv = np.asarray(y, dtype=np.float64)
    if xv.shape[0] < 2:
        raise DataError("line fit needs at least 2 points")
    xm = xv.mean()
    ym = yv.mean()
    dx = xv - xm
    denom = np.dot(dx, dx)
    if denom == 0.0:
        raise DataError("degenerate fit: all x identical")
    slope = float(np.dot(dx, yv - ym) / denom)
    intercept = float(ym - slope * xm)
    resid = yv - (slope * xv + intercept)
    rmse = float(np.sqrt(np.mean(resid * resid)))
    return LineFit(slope=slope, intercept=intercept, rmse=rmse)


def _scan(x, y, b):
    # exhaustive scan over admissible split points; both sides need 2 points,
    # so c runs from 3 to b-2
    best_c = -1
    best_total = np.inf
    for c in range(3, b - 1):
        nl = c - 1  # points with x <= c
        left = fit_line(x[:nl], y[:nl])
        right = fit_line(x[nl:], y[nl:])
        total = (c - 1) / (b - 1) * left.rmse + (b - c) / (b - 1) * right.rmse
        if total < best_total:
            best_total = total
            best_c = c
    return best_c


def l_method(curve: EvaluationCurve, refine: bool = False) -> KneeResult:
    """Select the cluster count at the knee of the evaluation curve.

    Curves with fewer than 4 points cannot hold two 2-point fits; they fall
    back to k = 2 with the fallback flag set. ``refine`` enables the iterative
    variant that re-runs the scan on the curve truncated to twice the current
    knee until the knee stops decreasing.
    """
    m = len(curve)
    b = int(curve.x[-1])
    if m < 4:
        return KneeResult(k=2, fallback=True)

    k = _scan(curve.x, curve.y, b)
    if refine:
        cutoff = b
        while True:
            new_cutoff = max(2 * k, 5)  # keep at least 4 points (x in [2, cutoff])
            if new_cutoff >= cutoff:
                break
            cutoff = new_cutoff
            npts = cutoff - 1
            k2 = _scan(curve.x[:npts], curve.y[:npts], cutoff)
            if k2 >= k:
                break
            k = k2
    return KneeResult(k=k, fallback=False)
