import numpy as np
import pytest

from errors import InvalidStateError
from fullsystem import (
    FullState,
    decoupling_residual,
    evolve_full,
    full_generator,
    hermiticity_drift,
    reduce,
    trace_drift,
)
from integrator import InitialCondition, evolve
from model import build_generator, default_params


@pytest.fixture(scope='module')
def full_runs():
    return {
        omega: evolve_full(default_params(omega), FullState.excited(), 14.0, 1e-3, stride=10)
        for omega in (0.1, 4.5, 10.0)
    }


@pytest.mark.parametrize('omega', [0.1, 4.5, 10.0])
def test_full_system_reduces_to_reduced_equations(full_runs, scenario_trajectories, omega):
    reduced = full_runs[omega].reduced()
    diff = np.max(np.abs(reduced.states - scenario_trajectories[omega].states))
    assert diff <= 1e-6


@pytest.mark.parametrize('omega', [0.1, 4.5, 10.0])
def test_decoupled_elements_stay_zero(full_runs, omega):
    assert decoupling_residual(full_runs[omega]) <= 1e-10


@pytest.mark.parametrize('omega', [0.1, 4.5, 10.0])
def test_hermiticity_and_trace(full_runs, omega):
    traj = full_runs[omega]
    assert hermiticity_drift(traj) <= 1e-10
    assert trace_drift(traj) <= 1e-5


@pytest.mark.parametrize('omega', [0.0, 1.0, 4.5])
def test_generator_projects_onto_reduced_generator(omega):
    # d/dt of (rho00, Im rho01, rho11, rho22) computed from the 9x9 generator
    rng = np.random.default_rng(7)
    a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    rho = a @ a.conj().T
    rho /= np.trace(rho).real
    rho[0, 1] = 1j * rho[0, 1].imag
    rho[1, 0] = np.conj(rho[0, 1])
    rho[0, 2] = rho[1, 2] = rho[2, 0] = rho[2, 1] = 0.0

    p = default_params(omega)
    d_rho = (full_generator(p) @ rho.reshape(9)).reshape(3, 3)
    x = reduce(rho).as_array()
    got = [d_rho[0, 0].real, d_rho[0, 1].imag, d_rho[1, 1].real, d_rho[2, 2].real]
    np.testing.assert_allclose(got, build_generator(p) @ x, atol=1e-10)


def test_level2_coherences_decay_analytically():
    p = default_params(4.5)
    rho = np.diag([0.4, 0.3, 0.3]).astype(complex)
    rho[0, 2] = rho[2, 0] = 0.1
    traj = evolve_full(p, FullState(rho), 1.0, 1e-3, stride=100)
    t = traj.times
    envelope = 0.1 * np.exp(-t / p.t2)
    np.testing.assert_allclose(traj.element(0, 2), envelope * np.cos(p.omega * t / 2), atol=1e-8)
    np.testing.assert_allclose(traj.element(1, 2), -1j * envelope * np.sin(p.omega * t / 2),
                               atol=1e-8)


def test_embedding_round_trip():
    x = InitialCondition(0.2, 0.05, 0.5, 0.3)
    full = FullState.from_density_vector(x)
    assert reduce(full).as_array() == pytest.approx(x.as_array())
    assert full.rho[0, 1] == 0.05j


def test_invalid_full_states():
    with pytest.raises(InvalidStateError):
        FullState(np.eye(3))
    with pytest.raises(InvalidStateError):
        FullState(np.zeros((2, 2)))
    bad = np.diag([0.5, 0.5, 0.0]).astype(complex)
    bad[0, 1] = 0.1
    with pytest.raises(InvalidStateError):
        FullState(bad)


def test_from_reduced_start_matches_reduced_run():
    p = default_params(4.5)
    init = InitialCondition(0.3, 0.1, 0.4, 0.3)
    full = evolve_full(p, FullState.from_density_vector(init), 2.0, 1e-3, stride=10)
    reduced = evolve(p, init, 2.0, 1e-3, stride=10)
    np.testing.assert_allclose(full.reduced().states, reduced.states, atol=1e-10)


def test_undriven_excited_level_decays():
    p = default_params(0.0)
    traj = evolve_full(p, FullState.excited(), 2.0, 1e-3, stride=10)
    expected = np.exp(-p.level1_loss_rate * traj.times)
    np.testing.assert_allclose(traj.element(1, 1).real, expected, atol=1e-8)


def test_real_part_of_drive_coherence_does_not_feed_populations():
    p = default_params(4.5)
    rho = np.diag([0.5, 0.5, 0.0]).astype(complex)
    rho[0, 1] = 0.05j
    rho[1, 0] = -0.05j
    with_real = rho.copy()
    with_real[0, 1] += 0.1
    with_real[1, 0] += 0.1

    plain = evolve_full(p, FullState(rho), 2.0, 1e-3, stride=10)
    shifted = evolve_full(p, FullState(with_real), 2.0, 1e-3, stride=10)
    np.testing.assert_allclose(shifted.reduced().states, plain.reduced().states, atol=1e-11)
    np.testing.assert_allclose(shifted.element(0, 1).real,
                               0.1 * np.exp(-shifted.times / p.t2), atol=1e-8)
