import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from bcm.generators import budget_path, gap_cycle, greedy_adversary, single_edge  # noqa: E402

CORPUS = Path(__file__).parent / "corpus"

# filled by test_acceptance, printed once at the end of the session
ACCEPTANCE_LINES: list = []


@pytest.fixture
def c4gap():
    return gap_cycle(4)


@pytest.fixture
def adversary():
    return greedy_adversary()


@pytest.fixture
def bpath4():
    return budget_path(4)


@pytest.fixture
def edge5():
    return single_edge(5)


@pytest.fixture
def corpus_dir():
    return CORPUS


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
