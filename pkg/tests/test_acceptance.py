"""End-to-end acceptance checks.

Each test records one PASS/FAIL line in ``conftest.ACCEPTANCE``; the lines are
printed in the terminal summary after the run.
"""

import time

import numpy as np
import pytest

from conftest import ACCEPTANCE
from helpers import GAP_KINDS, random_sequence
from pvbyte.codec import vbyte_cost, vbyte_encode
from pvbyte.index import STRATEGIES, Collection, build_index, read_index, write_index
from pvbyte.partition import (
    approximation_factor,
    dp_epsilon_partition,
    dp_exact_partition,
    optimal_partition,
)
from pvbyte.query import intersect_and
from pvbyte.synth import SynthConfig, random_queries, write_synthetic

pytestmark = pytest.mark.slow


def record(name, passed, detail):
    ACCEPTANCE.append((name, bool(passed), detail))
    return passed


def small_corpus(count=1200, seed=2024):
    rng = np.random.default_rng(seed)
    for k in range(count):
        yield random_sequence(rng, int(rng.integers(1, 201)), GAP_KINDS[k % 3])


@pytest.fixture(scope="module")
def corpus():
    return list(small_corpus())


@pytest.fixture(scope="module")
def clustered(tmp_path_factory):
    base = tmp_path_factory.mktemp("clustered") / "c"
    write_synthetic(base, SynthConfig(num_docs=1_000_000, num_terms=5_000, dense_fraction=0.7, seed=42))
    collection = Collection.from_basename(base)
    return collection, {s: build_index(collection, s) for s in STRATEGIES}


@pytest.fixture(scope="module")
def query_collection(tmp_path_factory):
    base = tmp_path_factory.mktemp("queries") / "q"
    write_synthetic(base, SynthConfig(num_docs=100_000, num_terms=300, seed=9, max_list_fraction=0.3))
    return Collection.from_basename(base)


def test_optimal_equals_exact_dp(corpus):
    start = time.perf_counter()
    checked = failures = 0
    for S in corpus:
        for F in (8, 16, 64):
            checked += 1
            failures += optimal_partition(S, F).modeled_cost != dp_exact_partition(S, F).modeled_cost
    elapsed = time.perf_counter() - start
    ok = record("1 optimality", failures == 0 and elapsed < 60,
                f"{checked} cases, {failures} mismatches, {elapsed:.1f}s")
    assert ok


def test_epsilon_dp_bound(corpus):
    bound = approximation_factor(0.03, 0.3)
    worst = 1.0
    violations = 0
    for S in corpus:
        for F in (8, 16, 64):
            exact = dp_exact_partition(S, F).modeled_cost
            approx = dp_epsilon_partition(S, F, 0.03, 0.3).modeled_cost
            worst = max(worst, approx / exact)
            violations += approx > 1.339 * exact
    ok = record("2 approximation bound", violations == 0,
                f"worst ratio {worst:.4f} (limit 1.339, theory {bound:.3f}), {violations} violations")
    assert ok


def test_compression_on_clustered_collection(clustered):
    _, indexes = clustered
    bpi = {s: idx.space()["total_bpi"] for s, idx in indexes.items()}
    ratio = bpi["optimal"] / bpi["unpartitioned"]
    detail = ", ".join(f"{s} {bpi[s]:.2f}" for s in STRATEGIES) + f" bpi; optimal/unpartitioned {ratio:.3f}"
    ok = record("3 compression", ratio <= 0.65 and bpi["optimal"] <= bpi["uniform"], detail)
    assert ok


def test_roundtrip_all_strategies(clustered, toy_collection, small_synthetic):
    big, big_indexes = clustered
    collections = [("toy", toy_collection, None), ("small", small_synthetic, None), ("clustered", big, big_indexes)]
    bad = []
    lists = 0
    for name, coll, prebuilt in collections:
        for strategy in STRATEGIES:
            index = prebuilt[strategy] if prebuilt else build_index(coll, strategy)
            for term in coll:
                lists += 1
                cursor, freqs = index.get_list(term.term_id)
                if not (np.array_equal(cursor.seq.decode(), term.docs)
                        and np.array_equal(freqs.all(), term.freqs)):
                    bad.append((name, strategy, term.term_id))
    ok = record("4 round trip", not bad, f"{lists} lists decoded, {len(bad)} mismatches")
    assert ok, bad[:5]


def test_query_equivalence(query_collection):
    sets = {t.term_id: set(t.docs.tolist()) for t in query_collection}
    indexes = {s: build_index(query_collection, s) for s in STRATEGIES}
    queries = random_queries(len(sets), 10_000, seed=17)
    mismatches = 0
    matches = 0
    for terms in queries:
        expected = sorted(set.intersection(*(sets[t] for t in terms)))
        matches += len(expected)
        for index in indexes.values():
            mismatches += intersect_and(index, terms) != expected
    ok = record("5 query equivalence", mismatches == 0,
                f"{len(queries)} queries x {len(indexes)} strategies, {matches} matches, {mismatches} mismatches")
    assert ok


def test_partitioner_speed():
    rng = np.random.default_rng(31)
    n = 10_000_000
    dense = np.repeat(rng.random(n // 1000) < 0.6, 1000)
    gaps = np.where(dense, np.where(rng.random(n) < 0.9, 1, 2), rng.geometric(0.002, n))
    S = np.cumsum(gaps) - 1
    optimal_partition(S[:1000])
    dp_epsilon_partition(S[:1000])

    def best_of(fn, reps):
        times = []
        for _ in range(reps):
            t = time.perf_counter()
            fn(S)
            times.append(time.perf_counter() - t)
        return min(times)

    t_opt = best_of(optimal_partition, 3)
    t_eps = best_of(dp_epsilon_partition, 2)
    ok = record("6 partitioner speed", t_opt <= 0.5 * t_eps,
                f"optimal {t_opt:.3f}s, epsdp {t_eps:.3f}s, ratio {t_opt / t_eps:.3f}, "
                f"throughput {n / t_opt / 1e6:.1f}M ints/s")
    assert ok


def test_vbyte_cost_boundaries():
    points = {0, 2**32 - 1}
    k = 1
    while 2 ** (7 * k) - 1 < 2**32:
        for d in (2 ** (7 * k) - 1, 2 ** (7 * k), 2 ** (7 * k) + 1):
            if d < 2**32:
                points.add(d)
        k += 1
    wrong = [
        d for d in sorted(points)
        if not vbyte_cost(d) == 8 * max(1, -(-d.bit_length() // 7)) == 8 * len(vbyte_encode([d]))
    ]
    ok = record("7 vbyte costs", not wrong, f"{len(points)} boundary values, {len(wrong)} wrong")
    assert ok, wrong


def test_bit_exact_persistence(toy_collection, data_dir, tmp_path):
    golden = (data_dir / "toy.optimal.pvb").read_bytes()
    rebuilt = build_index(toy_collection, "optimal", F=64)
    identical = True
    for strategy in STRATEGIES:
        index = build_index(toy_collection, strategy)
        path = tmp_path / f"{strategy}.pvb"
        write_index(index, path)
        with read_index(path) as loaded:
            identical &= loaded.to_bytes() == index.to_bytes() == path.read_bytes()
    matches_golden = rebuilt.to_bytes() == golden
    ok = record("8 persistence", identical and matches_golden,
                f"write/read identical: {identical}, golden re-derived: {matches_golden} ({len(golden)} bytes)")
    assert ok
