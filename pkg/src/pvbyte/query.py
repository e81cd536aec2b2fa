"""Boolean conjunctions over an index and the timing harness around them."""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field

from .errors import QueryParseError
from .index import IndexFile
from .sequence import EXHAUSTED, SequenceCursor

logger = logging.getLogger(__name__)


def parse_queries(path) -> list[tuple[int, ...]]:
    """One query per line, whitespace-separated term ids; duplicates dropped."""
    queries = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            tokens = line.split()
            if not tokens:
                continue
            terms = []
            for tok in tokens:
                try:
                    term = int(tok)
                except ValueError:
                    raise QueryParseError(f"not a term id: {tok!r}", lineno) from None
                if term < 0:
                    raise QueryParseError(f"negative term id {term}", lineno)
                terms.append(term)
            queries.append(tuple(dict.fromkeys(terms)))
    return queries


def intersect_cursors(cursors: list[SequenceCursor]) -> list[int]:
    """Intersect forward cursors; the shortest list drives the candidates."""
    if not cursors:
        return []
    cursors = sorted(cursors, key=len)
    lead = cursors[0]
    m = len(cursors)
    result = []
    candidate = lead.next_geq(0)
    i = 1
    while candidate != EXHAUSTED:
        while i < m:
            value = cursors[i].next_geq(candidate)
            if value != candidate:
                candidate = value
                i = 0
                break
            i += 1
        if i == m:
            result.append(candidate)
            candidate = lead.next_geq(candidate + 1)
            i = 1
    return result


def intersect_and(index: IndexFile, terms, jumps: list | None = None) -> list[int]:
    """Documents containing every term.  Unknown term ids give an empty result.

    If ``jumps`` is a list, the position delta of every NextGEQ call on every
    list is appended to it.
    """
    terms = list(dict.fromkeys(terms))
    bad = [t for t in terms if not 0 <= t < index.num_terms]
    if bad:
        logger.warning("unknown term ids %s, returning no results", bad)
        return []
    record = jumps is not None
    cursors = [index.docs_sequence(t).cursor(record) for t in terms]
    result = intersect_cursors(cursors)
    if record:
        for c in cursors:
            jumps.extend(c.jumps)
    return result


@dataclass
class BenchmarkReport:
    query_ms: list[float]
    matches: list[int]
    repetitions: int
    results: list[list[int]] = field(repr=False, default_factory=list)

    @property
    def query_count(self) -> int:
        return len(self.query_ms)

    @property
    def mean_ms(self) -> float:
        return sum(self.query_ms) / len(self.query_ms) if self.query_ms else 0.0

    @property
    def total_matches(self) -> int:
        return sum(self.matches)

    def table(self) -> str:
        return "\n".join(
            [
                f"{'queries':>10} {'mean ms':>10} {'matches':>12} {'reps':>5}",
                f"{self.query_count:>10} {self.mean_ms:>10.4f} {self.total_matches:>12} "
                f"{self.repetitions:>5}",
            ]
        )

    def records(self) -> str:
        """Line-delimited JSON, one record per query."""
        return "\n".join(
            json.dumps({"query_id": q, "ms": round(ms, 6), "matches": k})
            for q, (ms, k) in enumerate(zip(self.query_ms, self.matches))
        )


def run_benchmark(index: IndexFile, queries, repetitions: int = 3) -> BenchmarkReport:
    """Time every query ``repetitions`` times on one thread; report the mean per query."""
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    index.touch()
    totals = [0.0] * len(queries)
    results = [None] * len(queries)
    for _ in range(repetitions):
        for q, terms in enumerate(queries):
            start = time.perf_counter()
            res = intersect_and(index, terms)
            totals[q] += time.perf_counter() - start
            results[q] = res
    return BenchmarkReport(
        query_ms=[1000.0 * t / repetitions for t in totals],
        matches=[len(r) for r in results],
        repetitions=repetitions,
        results=results,
    )
