import numpy as np
import pytest

from drivenosc import LatticeParams

ACCEPTANCE_REPORT = []


def record(criterion, passed, detail):
    ACCEPTANCE_REPORT.append((criterion, bool(passed), detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_REPORT:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in ACCEPTANCE_REPORT:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {criterion}: {detail}")


@pytest.fixture
def lattice():
    return LatticeParams(120, 1.0, 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
