"""Collection statistics: dense/sparse block census and NextGEQ jump sizes."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .codec import gaps, vbyte_costs
from .index import IndexFile
from .query import intersect_and

CLASSES = ("short", "medium", "long")


def size_class(n: int, thresholds=(10_000, 7_000_000)) -> str:
    lo, hi = thresholds
    if n < lo:
        return "short"
    return "medium" if n < hi else "long"


def block_census(docs, block: int = 128) -> tuple[int, int]:
    """``(dense, sparse)`` integer counts over blocks of ``block`` postings.

    A block is sparse when VByte on its gaps is strictly cheaper than its
    characteristic bit-vector.
    """
    d = gaps(docs)
    if d.size == 0:
        return 0, 0
    starts = np.arange(0, d.size, block)
    vb = np.add.reduceat(vbyte_costs(d), starts)
    bm = np.add.reduceat(d, starts)
    counts = np.diff(np.append(starts, d.size))
    sparse = vb < bm
    return int(counts[~sparse].sum()), int(counts[sparse].sum())


@dataclass
class DensityReport:
    block: int
    thresholds: tuple[int, int]
    dense: dict = field(default_factory=lambda: dict.fromkeys(CLASSES, 0))
    sparse: dict = field(default_factory=lambda: dict.fromkeys(CLASSES, 0))

    @property
    def total(self) -> int:
        return sum(self.dense.values()) + sum(self.sparse.values())

    def rows(self) -> list[dict]:
        out = []
        for cls in CLASSES:
            n = self.dense[cls] + self.sparse[cls]
            out.append(
                {
                    "class": cls,
                    "postings": n,
                    "share_pct": 100.0 * n / self.total if self.total else 0.0,
                    "dense_pct": 100.0 * self.dense[cls] / n if n else 0.0,
                    "sparse_pct": 100.0 * self.sparse[cls] / n if n else 0.0,
                }
            )
        return out

    @property
    def dense_share(self) -> float:
        """Percentage of all integers that sit in dense blocks."""
        return 100.0 * sum(self.dense.values()) / self.total if self.total else 0.0

    def table(self) -> str:
        lines = [f"{'class':<8} {'postings':>12} {'share%':>8} {'dense%':>8} {'sparse%':>8}"]
        for r in self.rows():
            lines.append(
                f"{r['class']:<8} {r['postings']:>12} {r['share_pct']:>8.2f} "
                f"{r['dense_pct']:>8.2f} {r['sparse_pct']:>8.2f}"
            )
        lines.append(f"{'all':<8} {self.total:>12} {100.0 if self.total else 0.0:>8.2f} "
                     f"{self.dense_share:>8.2f} {100.0 - self.dense_share if self.total else 0.0:>8.2f}")
        return "\n".join(lines)


def density(lists, block: int = 128, thresholds=(10_000, 7_000_000)) -> DensityReport:
    """Dense/sparse census of every list, grouped by list size class."""
    report = DensityReport(block, tuple(thresholds))
    for item in lists:
        docs = getattr(item, "docs", item)
        dense, sparse = block_census(docs, block)
        cls = size_class(len(docs), thresholds)
        report.dense[cls] += dense
        report.sparse[cls] += sparse
    return report


def jump_bucket(d: int) -> int:
    """Bucket ``b`` holds jumps in ``(2**(b-1), 2**b]``; jumps of 0 or 1 go to bucket 1."""
    return 1 if d <= 1 else (d - 1).bit_length()


@dataclass
class JumpHistogram:
    counts: Counter = field(default_factory=Counter)

    def add(self, jumps):
        self.counts.update(jump_bucket(d) for d in jumps)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def percentages(self) -> dict[int, float]:
        total = self.total
        return {b: 100.0 * c / total for b, c in sorted(self.counts.items())} if total else {}

    def table(self) -> str:
        lines = [f"{'bucket':>6} {'range':>24} {'count':>10} {'pct':>8}"]
        for b, pct in self.percentages().items():
            lo = 0 if b == 1 else 2 ** (b - 1) + 1
            lines.append(f"{b:>6} {f'[{lo}, {2 ** b}]':>24} {self.counts[b]:>10} {pct:>8.3f}")
        return "\n".join(lines)


def jump_histogram(index: IndexFile, queries) -> JumpHistogram:
    hist = JumpHistogram()
    for terms in queries:
        jumps = []
        intersect_and(index, terms, jumps=jumps)
        hist.add(jumps)
    return hist
