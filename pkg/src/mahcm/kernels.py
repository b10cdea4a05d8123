"""Hot numeric kernels: DTW alignment cost, pairwise matrix fill, NN-chain.

Every kernel exists twice: a numba ``@njit`` build (default) and a numpy
build used when numba is unavailable or ``MAHCM_NO_NUMBA=1`` is set. The two
builds execute the same IEEE-754 operations in the same order, so results are
bit-identical across backends and across any worker count.
"""

import math

import numpy as np

from ._backend import NUMBA_AVAILABLE, NUMBA_ENABLED, set_kernel_threads
from ._nnchain import nn_chain_core


def _dtw_scalar(a, b, squared_cost, normalize):
    # Reference cell-by-cell DP, two rolling rows. numba-compatible source.
    if b.shape[0] > a.shape[0]:
        a, b = b, a
    na = a.shape[0]
    nb = b.shape[0]
    d = a.shape[1]
    prev = np.empty(nb, dtype=np.float64)
    cur = np.empty(nb, dtype=np.float64)

    acc = 0.0
    for k in range(d):
        t = a[0, k] - b[0, k]
        acc += t * t
    prev[0] = acc if squared_cost else math.sqrt(acc)
    for j in range(1, nb):
        acc = 0.0
        for k in range(d):
            t = a[0, k] - b[j, k]
            acc += t * t
        lc = acc if squared_cost else math.sqrt(acc)
        prev[j] = prev[j - 1] + lc

    for i in range(1, na):
        acc = 0.0
        for k in range(d):
            t = a[i, k] - b[0, k]
            acc += t * t
        lc = acc if squared_cost else math.sqrt(acc)
        cur[0] = prev[0] + lc
        for j in range(1, nb):
            acc = 0.0
            for k in range(d):
                t = a[i, k] - b[j, k]
                acc += t * t
            lc = acc if squared_cost else math.sqrt(acc)
            m = prev[j]
            if prev[j - 1] < m:
                m = prev[j - 1]
            if cur[j - 1] < m:
                m = cur[j - 1]
            cur[j] = lc + m
        tmp = prev
        prev = cur
        cur = tmp

    res = prev[nb - 1]
    if normalize:
        res = res / (na + nb)
    return res


def _dtw_numpy(a, b, squared_cost=False, normalize=False):
    """Anti-diagonal vectorized DP; bit-identical to the scalar kernel.

    Local costs accumulate dimension-by-dimension and each DP cell performs
    one addition onto the three-way minimum, exactly as the scalar code does.
    """
    if b.shape[0] > a.shape[0]:
        a, b = b, a
    na = a.shape[0]
    nb = b.shape[0]
    d = a.shape[1]

    acc = np.zeros((na, nb), dtype=np.float64)
    for k in range(d):
        diff = a[:, k].reshape(-1, 1) - b[:, k].reshape(1, -1)
        acc += diff * diff
    lc = acc if squared_cost else np.sqrt(acc)

    # Diagonals indexed by i+j; slot i+1 holds row i, slot 0 stays +inf.
    prev2 = np.full(na + 1, np.inf)
    prev1 = np.full(na + 1, np.inf)
    prev1[1] = lc[0, 0]
    for kdiag in range(1, na + nb - 1):
        i0 = max(0, kdiag - nb + 1)
        i1 = min(kdiag, na - 1)
        rows = np.arange(i0, i1 + 1)
        cell = lc[rows, kdiag - rows]
        up = prev1[i0 : i1 + 1]
        left = prev1[i0 + 1 : i1 + 2]
        diag = prev2[i0 : i1 + 1]
        best = np.minimum(np.minimum(up, left), diag)
        cur = np.full(na + 1, np.inf)
        cur[i0 + 1 : i1 + 2] = cell + best
        prev2 = prev1
        prev1 = cur

    res = float(prev1[na])
    if normalize:
        res = res / (na + nb)
    return res


def _pairwise_numpy(flat, offsets, members, squared_cost=False, normalize=False):
    m = members.shape[0]
    out = np.empty(m * (m - 1) // 2, dtype=np.float64)
    f = 0
    for i in range(m - 1):
        si = members[i]
        a = flat[offsets[si] : offsets[si + 1]]
        for j in range(i + 1, m):
            sj = members[j]
            b = flat[offsets[sj] : offsets[sj + 1]]
            out[f] = _dtw_numpy(a, b, squared_cost, normalize)
            f += 1
    return out


if NUMBA_AVAILABLE:
    from numba import njit, prange

    _dtw_njit = njit(cache=True)(_dtw_scalar)
    _nn_chain_njit = njit(cache=True)(nn_chain_core)

    @njit(parallel=True, cache=True)
    def _pairwise_njit(flat, offsets, members, squared_cost, normalize):
        m = members.shape[0]
        total = m * (m - 1) // 2
        out = np.empty(total, dtype=np.float64)
        for f in prange(total):
            # invert the row-major condensed layout: find row i with R(i) <= f
            i = int((2 * m - 1 - math.sqrt((2.0 * m - 1) * (2.0 * m - 1) - 8.0 * f)) / 2)
            if i < 0:
                i = 0
            if i > m - 2:
                i = m - 2
            while i + 1 <= m - 2 and (i + 1) * m - (i + 1) * (i + 2) // 2 <= f:
                i += 1
            while i * m - i * (i + 1) // 2 > f:
                i -= 1
            j = f - (i * m - i * (i + 1) // 2) + i + 1
            si = members[i]
            sj = members[j]
            out[f] = _dtw_njit(
                flat[offsets[si] : offsets[si + 1]],
                flat[offsets[sj] : offsets[sj + 1]],
                squared_cost,
                normalize,
            )
        return out


def dtw_pair(a, b, squared_cost=False, normalize=False):
    """Alignment cost between two (n, d) float64 frame arrays."""
    if NUMBA_ENABLED:
        return float(_dtw_njit(a, b, squared_cost, normalize))
    return _dtw_numpy(a, b, squared_cost, normalize)


def pairwise_condensed(flat, offsets, members, workers=1, squared_cost=False, normalize=False):
    """Condensed matrix of alignment costs between the listed segments.

    ``flat`` is the (total_frames, d) pack, ``offsets`` the (N+1,) frame
    offsets, ``members`` the segment positions to compare. Work is split over
    flat pair indices; each index is written exactly once, so the output is
    identical for any ``workers``.
    """
    members = np.ascontiguousarray(members, dtype=np.int64)
    if NUMBA_ENABLED:
        set_kernel_threads(workers)
        return _pairwise_njit(flat, offsets, members, squared_cost, normalize)
    return _pairwise_numpy(flat, offsets, members, squared_cost, normalize)


def nn_chain(vals, n):
    """Raw reciprocal-nearest-neighbor merges over a condensed array.

    ``vals`` is consumed in place. Returns (slot_a, slot_b, height) arrays in
    discovery order; callers re-sort into canonical dendrogram order.
    """
    if NUMBA_ENABLED:
        return _nn_chain_njit(vals, n)
    return nn_chain_core(vals, n)


def warmup():
    """Compile the jitted kernels on a tiny input (no-op on the numpy path)."""
    flat = np.array([[0.0], [1.0], [0.5], [2.0]])
    offsets = np.array([0, 2, 3, 4], dtype=np.int64)
    members = np.arange(3, dtype=np.int64)
    vals = pairwise_condensed(flat, offsets, members, workers=1)
    dtw_pair(flat[:2], flat[2:3], True, True)
    pairwise_condensed(flat, offsets, members, workers=1, squared_cost=True, normalize=True)
    nn_chain(vals.copy(), 3)
