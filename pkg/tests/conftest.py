import pytest

from pulse_dicke import (IntegratorConfig, SweepGrid, default_upsilon_grid,
                         find_ustar, negativity_trace, sweep_fidelity)
from pulse_dicke.validate import run_validation


@pytest.fixture(scope="session")
def full_grid():
    return default_upsilon_grid()


@pytest.fixture(scope="session")
def sweep3(full_grid):
    return sweep_fidelity(SweepGrid(n_values=(3,), upsilon_values=full_grid),
                          samples=121)


@pytest.fixture(scope="session")
def sweep1(full_grid):
    return sweep_fidelity(SweepGrid(n_values=(1,), upsilon_values=full_grid),
                          samples=121)


@pytest.fixture(scope="session")
def sweep5(full_grid):
    return sweep_fidelity(SweepGrid(n_values=(5,), upsilon_values=full_grid),
                          samples=121)


@pytest.fixture(scope="session")
def ustar3():
    return find_ustar(3)


@pytest.fixture(scope="session")
def ustar5():
    return find_ustar(5)


@pytest.fixture(scope="session")
def ustar7():
    return find_ustar(7)


@pytest.fixture(scope="session")
def retention_traces():
    """Open-system negativity runs for the two preset group sizes.

    Truncations were fixed by running the closed doubling policy once for
    each size at this speed; the per-run tail diagnostic still guards the
    open runs.
    """
    config = IntegratorConfig(steps_per_unit_time=400)
    kappas = (0.0, 0.05, 0.1)
    t5 = negativity_trace(5, 0.25, kappa_values=kappas, samples=41,
                          config=config, n_max=32)
    t11 = negativity_trace(11, 0.25, kappa_values=kappas, samples=41,
                           config=config, n_max=48)
    return t5, t11


@pytest.fixture(scope="session")
def validation_results():
    return {r.name: r for r in run_validation()}
