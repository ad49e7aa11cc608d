import numpy as np
import pytest

from btq.geometry import manifold

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def cp1():
    return manifold("cp1")


@pytest.fixture(scope="session")
def cp1xcp1():
    return manifold("cp1xcp1")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)
