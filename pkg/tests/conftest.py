import sys
from pathlib import Path

import pytest
from hypothesis import settings

from pseudoamr.graph import AmrGraph
from pseudoamr.ingest import read_conllu, read_srl_jsonl

DATA = Path(__file__).parent / "data"

# same examples on every run
settings.register_profile("repro", derandomize=True, deadline=None)
settings.load_profile("repro")


@pytest.fixture
def data_dir():
    return DATA


@pytest.fixture
def fig_amr():
    """(w / want-01 :ARG0 (b / boy) :ARG1 (l / leave-01 :ARG0 b))"""
    return AmrGraph.build(["want-01", "boy", "leave-01"], [(0, ":ARG0", 1), (0, ":ARG1", 2), (2, ":ARG0", 1)])


@pytest.fixture
def fig_dep():
    return read_conllu((DATA / "fig1.conllu").read_text())[0]


@pytest.fixture
def fig_srl():
    return read_srl_jsonl((DATA / "fig1.srl.jsonl").read_text())[0]


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is not None and module.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in module.RESULTS:
            terminalreporter.write_line(line)
