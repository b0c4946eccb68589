import math

import numpy as np
import pytest
from hypothesis import strategies as st

from hdch.grid import Grid
from hdch.stepper import smooth_random_field

L = 4 * math.pi


def smooth(grid, seed, mean=0.0):
    return mean + smooth_random_field(grid, seed)


def profile(s):
    """Cubic ``3 s^2 - 2 s^3`` and its first two derivatives.

    Flat at both ends, so built fields satisfy the wall condition, while the
    nonzero third derivative keeps the discretisation error algebraic.
    """
    return 3 * s**2 - 2 * s**3, 6 * s - 6 * s**2, 6 - 12 * s


seeds = st.integers(min_value=0, max_value=2**32 - 1)


@pytest.fixture
def grid32():
    return Grid(32, 32, L, L)


@pytest.fixture
def grid64():
    return Grid(64, 64, L, L)


@pytest.fixture
def rect():
    return Grid(16, 24, 2.0, 3.0)


# acceptance verdicts, printed once at the end of the session
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
