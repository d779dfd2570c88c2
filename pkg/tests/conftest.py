import pytest

from nwharnack.field import Grid
from nwharnack.params import PDEParams, validate
from nwharnack.solver import Equilibrium, SinePerturbed, SolverConfig, evolve

UNIT = PDEParams(1.0, 1.0, 1)


def sine_run(points, pde=UNIT, extent=20.0, t_end=5.0, interval=0.05, amplitude=0.1):
    cfg = SolverConfig(pde, Grid(1, points, extent), t_end, interval, SinePerturbed(amplitude, 1))
    return evolve(cfg)


@pytest.fixture(scope="session")
def unit_pde():
    return UNIT


@pytest.fixture(scope="session")
def params_c():
    return validate(1.0, 0.0, -1.0, UNIT)


@pytest.fixture(scope="session")
def params_d():
    return validate(1.0, 0.9, -2.0, UNIT)


@pytest.fixture(scope="session")
def sine256():
    return sine_run(256)


@pytest.fixture(scope="session")
def sine512():
    return sine_run(512)


@pytest.fixture(scope="session")
def equilibrium_run():
    cfg = SolverConfig(UNIT, Grid(1, 16, 20.0), 2.0, 0.1, Equilibrium())
    return evolve(cfg)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
