from pathlib import Path

import pytest

from markov_entropy import regular

DATA = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture(scope="session")
def golden_pdfa_path():
    return DATA / "golden_mean.pdfa"


@pytest.fixture(scope="session")
def golden_mean():
    """Binary words without factor 11 (two states)."""
    return regular.load_pdfa(DATA / "golden_mean.pdfa")


ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
