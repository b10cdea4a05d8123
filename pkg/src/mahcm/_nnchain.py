"""Nearest-neighbor-chain agglomeration core.

Written in the numba-compatible subset of Python: the same source runs
uncompiled on the numpy backend and is wrapped with ``@njit`` on the numba
backend, so both produce bit-identical merges.
"""

import numpy as np


def nn_chain_core(vals, n):
    # vals: condensed upper-triangular array of n*(n-1)//2 entries, consumed
    # in place by the Lance-Williams update (Ward coefficients). Returns the
    # merges in discovery order as (slot_a, slot_b, height) arrays.
    #
    # Active clusters live in slots 0..n-1; a merged cluster keeps the smaller
    # of the two slots, so a slot index always equals the smallest leaf inside
    # that cluster. Nearest-neighbor ties go to the smallest slot, and the
    # previous chain element wins ties so reciprocal pairs terminate the walk.
    size = np.ones(n, dtype=np.int64)
    chain = np.zeros(n, dtype=np.int64)
    chain_len = 0
    out_a = np.zeros(n - 1, dtype=np.int64)
    out_b = np.zeros(n - 1, dtype=np.int64)
    out_h = np.zeros(n - 1, dtype=np.float64)

    for m in range(n - 1):
        if chain_len == 0:
            for s in range(n):
                if size[s] > 0:
                    chain[0] = s
                    chain_len = 1
                    break
        while True:
            x = chain[chain_len - 1]
            if chain_len > 1:
                y = chain[chain_len - 2]
                lo = x if x < y else y
                hi = y if x < y else x
                cur_min = vals[lo * n - lo * (lo + 1) // 2 + hi - lo - 1]
            else:
                y = -1
                cur_min = np.inf
            for z in range(n):
                if size[z] > 0 and z != x:
                    lo = x if x < z else z
                    hi = z if x < z else x
                    d = vals[lo * n - lo * (lo + 1) // 2 + hi - lo - 1]
                    if d < cur_min:
                        cur_min = d
                        y = z
            if chain_len > 1 and y == chain[chain_len - 2]:
                break
            chain[chain_len] = y
            chain_len += 1
        chain_len -= 2

        x = chain[chain_len + 1]
        y = chain[chain_len]
        a = x if x < y else y
        b = y if x < y else x
        sa = size[a]
        sb = size[b]
        out_a[m] = a
        out_b[m] = b
        out_h[m] = cur_min

        for z in range(n):
            if size[z] > 0 and z != a and z != b:
                sz = size[z]
                lo = a if a < z else z
                hi = z if a < z else a
                ia = lo * n - lo * (lo + 1) // 2 + hi - lo - 1
                lo = b if b < z else z
                hi = z if b < z else b
                ib = lo * n - lo * (lo + 1) // 2 + hi - lo - 1
                vals[ia] = (
                    (sa + sz) * vals[ia] + (sb + sz) * vals[ib] - sz * cur_min
                ) / (sa + sb + sz)
        size[a] = sa + sb
        size[b] = 0

    return out_a, out_b, out_h
