import numpy as np
import pytest

from soficlyap.shift import AB, golden_mean_shift, make_full_shift
from soficlyap.system import SwitchedSystem, positive_golden_mean_system


@pytest.fixture(scope="session")
def full():
    return make_full_shift(AB)


@pytest.fixture(scope="session")
def golden():
    return golden_mean_shift()


@pytest.fixture(scope="session")
def positive():
    return positive_golden_mean_system()


def random_nonnegative(shift, n, rng, spread=1.0):
    return SwitchedSystem(shift, {s: rng.uniform(0, spread, (n, n)) for s in shift.alphabet})


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
