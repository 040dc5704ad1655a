import sys

import numpy as np
import pytest

from impulsive_pressure.systems import get_system


@pytest.fixture(scope="session")
def circle_sys():
    return get_system("impulsive_circle")


@pytest.fixture(scope="session")
def rotation_sys():
    return get_system("rotation_circle")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(results, key=int):
        terminalreporter.write_line(results[key])
