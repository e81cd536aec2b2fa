from pathlib import Path

import numpy as np
import pytest

from helpers import TOY_NUM_DOCS, toy_lists
from pvbyte.index import Collection, write_collection
from pvbyte.synth import SynthConfig, write_synthetic

DATA = Path(__file__).parent / "data"

# filled in by test_acceptance.py, one (criterion, passed, detail) per check
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def data_dir():
    return DATA


@pytest.fixture(scope="session")
def toy_collection(tmp_path_factory):
    base = tmp_path_factory.mktemp("toy") / "toy"
    write_collection(base, TOY_NUM_DOCS, toy_lists())
    return Collection.from_basename(base)


@pytest.fixture(scope="session")
def small_synthetic(tmp_path_factory):
    base = tmp_path_factory.mktemp("synth") / "small"
    cfg = SynthConfig(num_docs=50_000, num_terms=120, seed=7, max_list_fraction=0.2)
    write_synthetic(base, cfg)
    return Collection.from_basename(base)
