"""Shared test utilities: seeded sequence generators and brute-force oracles."""

import itertools

import numpy as np

from pvbyte.codec import vbyte_cost

GAP_KINDS = ("ones", "geometric", "mixed")


def random_gaps(rng: np.random.Generator, n: int, kind: str) -> np.ndarray:
    if kind == "ones":
        return np.ones(n, dtype=np.int64)
    if kind == "geometric":
        return rng.geometric(0.01, size=n).astype(np.int64)
    # 50/50 dense runs and sparse stretches
    out = []
    while sum(map(len, out)) < n:
        length = int(rng.integers(1, 40))
        if rng.random() < 0.5:
            out.append(np.where(rng.random(length) < 0.9, 1, rng.integers(1, 10, length)))
        else:
            out.append(rng.geometric(0.002, size=length))
    return np.concatenate(out)[:n].astype(np.int64)


def random_sequence(rng, n, kind="mixed"):
    return np.cumsum(random_gaps(rng, n, kind)) - 1


def toy_lists():
    """Three hand-made lists: dense-then-sparse, short sparse, sparse-dense-sparse."""
    term0 = list(range(100)) + [1100 + 1000 * k for k in range(20)]
    term1 = [3, 17, 42, 99, 100, 101]
    term2 = [5, 900, 4000] + list(range(5000, 5300)) + [9000, 15000, 20999]
    freqs0 = [1 + (k % 3) for k in range(len(term0))]
    freqs1 = [2, 1, 3, 1, 1, 7]
    freqs2 = [1] * len(term2)
    return [(term0, freqs0), (term1, freqs1), (term2, freqs2)]


TOY_NUM_DOCS = 21000


def slice_cost(gaps, F):
    e = sum(vbyte_cost(int(d)) for d in gaps)
    b = int(sum(gaps))
    return min(e, b) + F


def brute_force_cost(S, F):
    """Cheapest cost over all 2**(n-1) ways to cut ``S``."""
    s = [int(x) for x in S]
    gaps = [s[0] + 1] + [b - a for a, b in zip(s, s[1:])]
    n = len(s)
    best = None
    for mask in itertools.product((0, 1), repeat=n - 1):
        cuts = [k + 1 for k, bit in enumerate(mask) if bit] + [n]
        start = 0
        total = 0
        for stop in cuts:
            total += slice_cost(gaps[start:stop], F)
            start = stop
        best = total if best is None else min(best, total)
    return best
