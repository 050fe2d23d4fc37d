import os
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

from feyntope import load_graph  # noqa: E402

GRAPHS = Path(__file__).resolve().parent.parent / "graphs"

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("ci", deadline=None, max_examples=200)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def graphs_dir():
    return GRAPHS


@pytest.fixture(scope="session")
def single_edge():
    return load_graph(GRAPHS / "single_edge.json")


@pytest.fixture(scope="session")
def bubble():
    return load_graph(GRAPHS / "bubble.json")


@pytest.fixture(scope="session")
def bubble_d4():
    return load_graph(GRAPHS / "bubble_d4.json")


@pytest.fixture(scope="session")
def triangle():
    return load_graph(GRAPHS / "triangle.json")


@pytest.fixture(scope="session")
def tadpole():
    return load_graph(GRAPHS / "tadpole.json")


@pytest.fixture(scope="session")
def sunrise():
    return load_graph(GRAPHS / "sunrise.json")


# -- acceptance report: one line per criterion in the terminal summary -----------

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def criterion():
    def record(number: int, ok: bool, detail: str) -> bool:
        ACCEPTANCE[number] = (bool(ok), detail)
        print(f"criterion {number}: {'PASS' if ok else 'FAIL'} ({detail})")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
