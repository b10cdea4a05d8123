"""Independent reference implementations the tests check against.

Each oracle deliberately takes a different route than the library: exhaustive
path enumeration instead of dynamic programming, a cubic global-scan
agglomerator instead of the nearest-neighbor chain, polyfit-based knee
scanning, and a dict-based scorer.
"""

import numpy as np


def dtw_brute_force(a, b):
    """Minimum summed cost over every monotone alignment path (DFS)."""
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    b = np.atleast_2d(np.asarray(b, dtype=np.float64))
    na, nb = a.shape[0], b.shape[0]
    cost = np.empty((na, nb))
    for i in range(na):
        for j in range(nb):
            cost[i, j] = np.linalg.norm(a[i] - b[j])
    best = [np.inf]

    def walk(i, j, acc):
        if i == na - 1 and j == nb - 1:
            if acc < best[0]:
                best[0] = acc
            return
        if i + 1 < na and j + 1 < nb:
            walk(i + 1, j + 1, acc + cost[i + 1, j + 1])
        if i + 1 < na:
            walk(i + 1, j, acc + cost[i + 1, j])
        if j + 1 < nb:
            walk(i, j + 1, acc + cost[i, j + 1])

    walk(0, 0, cost[0, 0])
    return best[0]


def naive_ward(condensed, n, square_first=False):
    """Cubic agglomerator: full square matrix, global closest-pair scan each
    step (ties by smallest node ids), Lance-Williams Ward update.

    Returns a list of (left, right, height, size) with leaf ids 0..n-1 and
    internal ids n.. in merge order.
    """
    square = np.full((n, n), np.inf)
    iu, ju = np.triu_indices(n, 1)
    square[iu, ju] = square[ju, iu] = (
        np.asarray(condensed) ** 2 if square_first else condensed
    )

    node = np.arange(n)
    size = np.ones(n, dtype=np.int64)
    alive = np.ones(n, dtype=bool)
    merges = []
    next_id = n
    for _ in range(n - 1):
        dmin = square.min()
        ci, cj = np.nonzero(square == dmin)
        keep = ci < cj
        candidates = sorted(
            (min(node[a], node[b]), max(node[a], node[b]), a, b)
            for a, b in zip(ci[keep], cj[keep])
        )
        lo, hi, bi, bj = candidates[0]
        si, sj = int(size[bi]), int(size[bj])
        others = alive.copy()
        others[bi] = others[bj] = False
        sz = size[others]
        updated = (
            (si + sz) * square[bi, others] + (sj + sz) * square[bj, others] - sz * dmin
        ) / (si + sj + sz)
        square[bi, others] = square[others, bi] = updated
        square[bj, :] = square[:, bj] = np.inf
        alive[bj] = False
        size[bi] = si + sj
        merges.append((int(lo), int(hi), float(dmin), si + sj))
        node[bi] = next_id
        next_id += 1
    return merges


def l_method_scan(x, y):
    """Exhaustive split scan with polyfit-based fits; returns the best count."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    b = int(x[-1])
    best_total = np.inf
    best_c = -1
    for c in range(3, b - 1):
        nl = c - 1
        total = ((c - 1) / (b - 1)) * _polyfit_rmse(x[:nl], y[:nl]) + (
            (b - c) / (b - 1)
        ) * _polyfit_rmse(x[nl:], y[nl:])
        if total < best_total:
            best_total = total
            best_c = c
    return best_c


def _polyfit_rmse(x, y):
    coeffs = np.polyfit(x, y, 1)
    resid = y - np.polyval(coeffs, x)
    return float(np.sqrt(np.mean(resid**2)))


def f_measure_brute(cluster_ids, class_labels):
    """Dict-based scorer applying the per-pair definitions directly."""
    pairs = {}
    cluster_totals = {}
    class_totals = {}
    for k, l in zip(cluster_ids, class_labels):
        pairs[(k, l)] = pairs.get((k, l), 0) + 1
        cluster_totals[k] = cluster_totals.get(k, 0) + 1
        class_totals[l] = class_totals.get(l, 0) + 1
    n = len(cluster_ids)
    total = 0.0
    for l, n_l in class_totals.items():
        best = 0.0
        for k, n_k in cluster_totals.items():
            n_kl = pairs.get((k, l), 0)
            if n_kl == 0:
                continue
            pr = n_kl / n_k
            re = n_kl / n_l
            f = 2 * re * pr / (re + pr)
            if f > best:
                best = f
        total += (n_l / n) * best
    return total
