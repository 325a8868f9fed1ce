import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from bilinred.demo import (demo_consistent_input, demo_selection, demo_switching_input,
                           demo_system)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture(scope="session")
def demo_sys():
    return demo_system()


@pytest.fixture(scope="session")
def demo_gamma():
    return demo_selection()


@pytest.fixture(scope="session")
def consistent_u():
    return demo_consistent_input()


@pytest.fixture(scope="session")
def switching_u():
    return demo_switching_input()


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
