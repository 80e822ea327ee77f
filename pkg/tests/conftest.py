import numpy as np
import pytest

from optosqueeze import BASELINE_PARAMS, ModulationParams, compute_modes, critical_modulation

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def modes():
    return compute_modes(BASELINE_PARAMS)


@pytest.fixture(scope="session")
def m_c(modes):
    return float(critical_modulation(modes)[0])


@pytest.fixture(scope="session")
def phase(modes):
    return modes.squeezing_phase(0)


@pytest.fixture(scope="session")
def modulation(m_c, phase):
    return lambda fraction: ModulationParams(fraction * m_c, phase)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
