"""Compiled inner loops for the partitioners.

Tags are encoded as ``0`` for VByte and ``1`` for bitmap.
"""

import numba
import numpy as np


@numba.njit(cache=True, inline="always")
def _vbyte_bits(d):
    nbytes = 1
    while d >= 128:
        d >>= 7
        nbytes += 1
    return 8 * nbytes


@numba.njit(cache=True)
def linear_partition(gaps, F):
    """One pass over the gain function; returns (splits, tags, steps)."""
    n = gaps.shape[0]
    splits = np.empty(n + 2, dtype=np.int64)
    tags = np.empty(n + 2, dtype=np.uint8)
    m = 0
    T = F
    i = 0
    j = 0
    g = 0
    lo = 0
    hi = 0
    steps = 0
    for k in range(n):
        d = gaps[k]
        delta = _vbyte_bits(d) - d
        g += delta
        steps += 1
        if delta >= 0:
            if g > hi:
                hi = g
                i = k + 1
            if lo < -T and lo - g < -2 * F:
                splits[m] = j
                tags[m] = 0
                m += 1
                T = 2 * F
                i = k + 1
                g -= lo
                lo = 0
                hi = g
        else:
            if g < lo:
                lo = g
                j = k + 1
            if hi > T and hi - g > 2 * F:
                splits[m] = i
                tags[m] = 1
                m += 1
                T = 2 * F
                j = k + 1
                g -= hi
                hi = 0
                lo = g
    # close
    if hi > F and hi - g > F:
        splits[m] = i
        tags[m] = 1
        m += 1
        j = n
        g -= hi
        hi = 0
        lo = g
    if lo < -F and lo - g < -F:
        splits[m] = j
        tags[m] = 0
        m += 1
        i = n
        g -= lo
        lo = 0
        hi = g
    splits[m] = n
    tags[m] = 1 if g > 0 else 0
    m += 1
    return splits[:m].copy(), tags[:m].copy(), steps


@numba.njit(cache=True, inline="always")
def _edge(pe, pb, i, j, F):
    e = pe[j] - pe[i]
    b = pb[j] - pb[i]
    return (e if e < b else b) + F


@numba.njit(cache=True)
def epsilon_partition(gaps, F, bounds):
    """Shortest path over the sparsified DAG.

    For every start position and every cost bound in ``bounds`` only the edges
    up to (and including) the first one reaching the bound are relaxed; the edge
    from 0 to every position is always present.  Returns the chosen end points.
    """
    n = gaps.shape[0]
    pe = np.zeros(n + 1, dtype=np.int64)
    pb = np.zeros(n + 1, dtype=np.int64)
    for k in range(n):
        pe[k + 1] = pe[k] + _vbyte_bits(gaps[k])
        pb[k + 1] = pb[k] + gaps[k]
    best = np.empty(n + 1, dtype=np.int64)
    parent = np.zeros(n + 1, dtype=np.int64)
    best[0] = 0
    for j in range(1, n + 1):
        best[j] = _edge(pe, pb, 0, j, F)
    h = bounds.shape[0]
    ends = np.zeros(h, dtype=np.int64)
    for i in range(n):
        last_end = i + 1
        for w in range(h):
            e = ends[w]
            if e < last_end:
                e = last_end
            while True:
                c = _edge(pe, pb, i, e, F)
                if best[i] + c < best[e]:
                    best[e] = best[i] + c
                    parent[e] = i
                last_end = e
                if e == n or c >= bounds[w]:
                    break
                e += 1
            ends[w] = e
    count = 0
    p = n
    while p > 0:
        count += 1
        p = parent[p]
    out = np.empty(count, dtype=np.int64)
    p = n
    while p > 0:
        count -= 1
        out[count] = p
        p = parent[p]
    return out
