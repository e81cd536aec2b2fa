"""Seeded synthetic collections with clustered docIDs.

Every list alternates dense stretches (consecutive docIDs) with sparse
stretches whose gaps are geometric.  List sizes follow a Zipf law over term
ranks.  ``dense_fraction`` is the share of each list's postings that sit in
dense stretches.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .index import write_collection


@dataclass(frozen=True)
class SynthConfig:
    num_docs: int = 1_000_000
    num_terms: int = 5_000
    dense_fraction: float = 0.7
    seed: int = 42
    zipf_exponent: float = 1.0
    # longest list, as a fraction of num_docs
    max_list_fraction: float = 0.3
    min_list_size: int = 16
    # mean postings per stretch; lists shorter than two stretches get one of each
    run_length: int = 4096
    mean_freq: float = 2.0

    def __post_init__(self):
        if not 0.0 <= self.dense_fraction <= 1.0:
            raise ValueError("dense_fraction must lie in [0, 1]")
        if self.num_docs < 2 or self.num_terms < 1:
            raise ValueError("need at least 2 documents and 1 term")

    def as_dict(self) -> dict:
        return asdict(self)


def list_sizes(cfg: SynthConfig) -> np.ndarray:
    ranks = np.arange(1, cfg.num_terms + 1, dtype=np.float64)
    top = cfg.max_list_fraction * cfg.num_docs
    sizes = np.maximum(cfg.min_list_size, np.floor(top / ranks**cfg.zipf_exponent))
    return np.minimum(sizes, cfg.num_docs).astype(np.int64)


def _split(total: int, parts: int, rng) -> np.ndarray:
    if parts <= 1:
        return np.array([total], dtype=np.int64)
    return rng.multinomial(total, np.full(parts, 1.0 / parts))


def generate_list(n: int, cfg: SynthConfig, rng: np.random.Generator) -> np.ndarray:
    """One strictly increasing list of ``n`` docIDs below ``cfg.num_docs``."""
    n_dense = int(round(cfg.dense_fraction * n))
    n_sparse = n - n_dense
    stretches = max(1, n // cfg.run_length)
    dense = _split(n_dense, stretches, rng) if n_dense else np.zeros(0, np.int64)
    sparse = _split(n_sparse, stretches, rng) if n_sparse else np.zeros(0, np.int64)
    free = cfg.num_docs - n
    mean_gap = max(1.0, free / max(n_sparse + stretches, 1))
    pieces = []
    order = rng.permutation(2) if n_dense and n_sparse else [0, 1]
    for k in range(stretches):
        for kind in order:
            if kind == 0 and n_dense:
                run = np.ones(dense[k], dtype=np.int64)
                if run.size:
                    run[0] = rng.geometric(1.0 / mean_gap)
                pieces.append(run)
            elif kind == 1 and n_sparse:
                pieces.append(rng.geometric(1.0 / mean_gap, size=sparse[k]).astype(np.int64))
    d = np.concatenate(pieces) if pieces else np.ones(n, np.int64)
    limit = cfg.num_docs
    while d.sum() > limit:
        big = d > 1
        excess = d.sum() - limit
        room = (d[big] - 1).sum()
        d[big] = 1 + np.floor((d[big] - 1) * (1 - excess / room)).astype(np.int64)
    docs = np.cumsum(d) - 1
    shift = rng.integers(0, limit - docs[-1]) if docs[-1] + 1 < limit else 0
    return docs + shift


def generate(cfg: SynthConfig):
    """Yield ``(docs, freqs)`` for every term in rank order."""
    rng = np.random.default_rng(cfg.seed)
    p = 1.0 / max(cfg.mean_freq, 1.0)
    for n in list_sizes(cfg):
        docs = generate_list(int(n), cfg, rng)
        freqs = rng.geometric(p, size=docs.size).astype(np.int64)
        yield docs, freqs


def write_synthetic(basename, cfg: SynthConfig):
    return write_collection(basename, cfg.num_docs, generate(cfg))


def random_queries(num_terms: int, count: int, seed: int = 0, min_terms: int = 2,
                   max_terms: int = 4) -> list[tuple[int, ...]]:
    """Uniformly drawn conjunctive queries over distinct term ids."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        k = int(rng.integers(min_terms, max_terms + 1))
        k = min(k, num_terms)
        out.append(tuple(int(t) for t in rng.choice(num_terms, size=k, replace=False)))
    return out


def write_queries(path, queries) -> None:
    with open(path, "w") as fh:
        for q in queries:
            fh.write(" ".join(map(str, q)) + "\n")
