import math

import numpy as np
import pytest

from helstrom_nosig.bloch_core import pure_from_amplitudes

THETA_GRID = [round(0.05 * k, 2) for k in range(1, 32)]  # 0.05 .. 1.55
ACCEPT_GRID = [round(0.1 * k, 1) for k in range(1, 16)]  # 0.1 .. 1.5

_acceptance_lines: list[str] = []


def random_pure(rng):
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    return pure_from_amplitudes(*v)


@pytest.fixture
def rng():
    return np.random.default_rng(20261017)


@pytest.fixture(scope="session")
def acceptance_log():
    return _acceptance_lines


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)


PI6 = math.pi / 6
PI4 = math.pi / 4
