import numpy as np
import pytest

from qgvertex import mps
from qgvertex.coupling import table1


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def free3():
    return table1("Free", 0.0, 3)


@pytest.fixture
def delta3():
    return table1("Delta", 3.0, 3)


@pytest.fixture(scope="session")
def catalogs():
    return {n: mps.search_real_mps(n) for n in range(2, 6)}


def J(n):
    return np.ones((n, n), dtype=complex)


def I(n):
    return np.eye(n, dtype=complex)


ACCEPTANCE_LINES = {}


def record_acceptance(number, title, passed, detail=""):
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:2d}: {title}"
    if detail:
        line += f" ({detail})"
    ACCEPTANCE_LINES[number] = line
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])
