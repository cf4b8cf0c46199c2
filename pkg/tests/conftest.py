import numpy as np
import pytest

from translate_lab.grid import make_grid


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def wide_grid():
    return make_grid(32.0, 4096)


ACCEPTANCE_LINES = {}


def record_acceptance(number, ok, detail):
    """Remember one acceptance outcome for the end-of-run summary."""
    ACCEPTANCE_LINES[number] = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(ACCEPTANCE_LINES[number])


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[number])
