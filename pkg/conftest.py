import pytest

from integrator import InitialCondition, evolve
from model import default_params

SCENARIO_OMEGAS = (0.1, 4.5, 10.0)


@pytest.fixture(scope='session')
def scenario_trajectories():
    """RK4 runs from the level-1 start to t = 14 ns, sampled every 0.01 ns."""
    return {
        omega: evolve(default_params(omega), InitialCondition.excited(), 14.0, 1e-3, stride=10)
        for omega in SCENARIO_OMEGAS
    }


@pytest.fixture(autouse=True)
def _isolated_env(monkeypatch):
    for name in ('LAMBDA3_LOG_LEVEL', 'LAMBDA3_DT', 'LAMBDA3_OUTPUT_DIR', 'LAMBDA3_WORKERS'):
        monkeypatch.delenv(name, raising=False)
