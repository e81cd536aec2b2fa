import json

import pytest

from pvbyte.cli import main
from pvbyte.index import read_index, write_collection

from helpers import TOY_NUM_DOCS, toy_lists


@pytest.fixture
def toy_base(tmp_path):
    base = tmp_path / "toy"
    write_collection(base, TOY_NUM_DOCS, toy_lists())
    return base


@pytest.fixture
def small_gen(tmp_path):
    base = tmp_path / "gen"
    argv = ["gen", "--output", str(base), "--num-docs", "20000", "--num-terms", "40",
            "--num-queries", "30", "--seed", "3"]
    assert main(argv) == 0
    return base


class TestGen:
    def test_deterministic(self, tmp_path, capsys):
        for name in ("a", "b"):
            assert main(["gen", "--output", str(tmp_path / name), "--num-docs", "5000",
                         "--num-terms", "20", "--seed", "42"]) == 0
        for ext in (".docs", ".freqs"):
            assert (tmp_path / f"a{ext}").read_bytes() == (tmp_path / f"b{ext}").read_bytes()
        params = json.loads(capsys.readouterr().out.splitlines()[0])
        assert params["seed"] == 42 and params["num_terms"] == 20

    def test_queries_written(self, small_gen):
        lines = (small_gen.parent / "gen.queries").read_text().splitlines()
        assert len(lines) == 30


class TestBuildVerify:
    @pytest.mark.parametrize("strategy", ["unpartitioned", "uniform", "epsdp", "optimal"])
    def test_build_then_verify(self, toy_base, tmp_path, capsys, strategy):
        out = tmp_path / f"{strategy}.pvb"
        assert main(["build", str(toy_base), "--output", str(out), "--strategy", strategy, "--F", "64"]) == 0
        with read_index(out) as index:
            assert index.strategy == strategy
            assert index.header_bits == 64
        assert main(["verify", str(out), str(toy_base)]) == 0
        assert capsys.readouterr().out.splitlines()[-1] == "OK, 3 lists"

    def test_verify_detects_mismatch(self, toy_base, tmp_path, capsys):
        out = tmp_path / "i.pvb"
        main(["build", str(toy_base), "--output", str(out)])
        capsys.readouterr()
        other = tmp_path / "other"
        lists = toy_lists()
        lists[1] = ([3, 17, 42], [1, 1, 1])
        write_collection(other, TOY_NUM_DOCS, lists)
        assert main(["verify", str(out), str(other)]) == 1
        assert capsys.readouterr().out.startswith("FAIL")

    def test_docs_path_accepted(self, toy_base, tmp_path):
        assert main(["build", f"{toy_base}.docs", "--output", str(tmp_path / "x.pvb")]) == 0


class TestQueryAndAnalysis:
    def test_query(self, small_gen, tmp_path, capsys):
        index = tmp_path / "g.pvb"
        main(["build", str(small_gen), "--output", str(index)])
        records = tmp_path / "rec.jsonl"
        assert main(["query", str(index), "--queries", f"{small_gen}.queries",
                     "--repetitions", "1", "--records", str(records)]) == 0
        assert "mean ms" in capsys.readouterr().out
        assert len(records.read_text().splitlines()) == 30

    def test_density(self, small_gen, capsys):
        assert main(["density", str(small_gen), "--thresholds", "100", "1000"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert [line.split()[0] for line in lines] == ["class", "short", "medium", "long", "all"]

    def test_jumps(self, small_gen, tmp_path, capsys):
        index = tmp_path / "g.pvb"
        main(["build", str(small_gen), "--output", str(index)])
        capsys.readouterr()
        assert main(["jumps", str(index), "--queries", f"{small_gen}.queries"]) == 0
        assert capsys.readouterr().out.split()[0] == "bucket"


class TestExitCodes:
    def test_missing_file_is_io(self, tmp_path):
        assert main(["build", str(tmp_path / "nothing"), "--output", str(tmp_path / "o.pvb")]) == 2

    def test_bad_index_is_validation(self, tmp_path):
        bad = tmp_path / "bad.pvb"
        bad.write_bytes(b"\0" * 64)
        (tmp_path / "q").write_text("1 2\n")
        assert main(["query", str(bad), "--queries", str(tmp_path / "q")]) == 1

    def test_bad_query_file(self, toy_base, tmp_path):
        index = tmp_path / "i.pvb"
        main(["build", str(toy_base), "--output", str(index)])
        (tmp_path / "q").write_text("0 x\n")
        assert main(["query", str(index), "--queries", str(tmp_path / "q")]) == 1

    def test_unknown_strategy_rejected(self, toy_base, tmp_path):
        with pytest.raises(SystemExit) as info:
            main(["build", str(toy_base), "--output", str(tmp_path / "o"), "--strategy", "greedy"])
        assert info.value.code == 2
