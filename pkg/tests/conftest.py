import functools

import numpy as np
import pytest

from affinezoll import make_surface

ACCEPTANCE_LINES = []


@functools.lru_cache(maxsize=None)
def surface(kind, c=0.0):
    return make_surface(kind, c)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
