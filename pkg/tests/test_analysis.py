import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pvbyte.analysis import (
    JumpHistogram,
    block_census,
    density,
    jump_bucket,
    jump_histogram,
    size_class,
)
from pvbyte.index import build_index
from pvbyte.synth import SynthConfig, generate, random_queries


class TestCensus:
    def test_consecutive_block_is_dense(self):
        assert block_census(np.arange(128)) == (128, 0)

    def test_wide_gaps_are_sparse(self):
        assert block_census(np.arange(1, 129) * 1000 - 1) == (0, 128)

    def test_partial_last_block(self):
        docs = np.concatenate([np.arange(128), 128 + np.arange(1, 11) * 1000])
        assert block_census(docs) == (128, 10)

    def test_empty(self):
        assert block_census(np.array([], dtype=np.int64)) == (0, 0)

    def test_size_classes(self):
        assert size_class(9_999) == "short"
        assert size_class(10_000) == "medium"
        assert size_class(7_000_000) == "long"
        assert size_class(50, (10, 40)) == "long"


class TestDensityReport:
    def test_rows_sum_to_hundred(self, small_synthetic):
        report = density(small_synthetic, 128, (1_000, 5_000))
        rows = report.rows()
        assert sum(r["share_pct"] for r in rows) == pytest.approx(100.0)
        for r in rows:
            if r["postings"]:
                assert r["dense_pct"] + r["sparse_pct"] == pytest.approx(100.0)
        assert len(report.table().splitlines()) == 5

    def test_accepts_plain_arrays(self):
        report = density([np.arange(128), np.arange(1, 129) * 1000 - 1])
        assert report.dense_share == pytest.approx(50.0)

    def test_generator_dense_share(self):
        # long lists so partial stretches at block edges are negligible
        cfg = SynthConfig(num_docs=2_000_000, num_terms=4, dense_fraction=0.8, seed=5,
                          max_list_fraction=0.25, zipf_exponent=0.5)
        report = density((docs for docs, _ in generate(cfg)), 128)
        assert abs(report.dense_share - 80.0) <= 5.0


class TestJumps:
    @pytest.mark.parametrize("d, bucket", [(0, 1), (1, 1), (2, 1), (3, 2), (4, 2), (5, 3), (8, 3), (9, 4), (1024, 10)])
    def test_bucket_edges(self, d, bucket):
        assert jump_bucket(d) == bucket

    @given(st.integers(2, 2**40))
    def test_bucket_range(self, d):
        b = jump_bucket(d)
        assert 2 ** (b - 1) < d <= 2**b

    def test_histogram_conserves(self, small_synthetic):
        index = build_index(small_synthetic)
        hist = jump_histogram(index, random_queries(index.num_terms, 100, seed=11))
        assert hist.total > 0
        assert sum(hist.percentages().values()) == pytest.approx(100.0)
        assert hist.table().splitlines()[0].split()[0] == "bucket"

    def test_empty_histogram(self):
        assert JumpHistogram().percentages() == {}
