"""
Full 3x3 density-matrix evolution used to cross-check the reduced equations.

The drive couples levels 0 and 1 only, with V01 = V10 = hbar*omega/2 on
resonance. Relaxation is phenomenological: level 1 empties into level 0 at
1/t1 and into level 2 at k21, level 2 empties into level 0 at k02, and every
off-diagonal element decays at 1/t2. With rhoB = Im(rho01) these equations
reduce exactly to the four reduced ones; the (rho02, rho12) and
(rho20, rho21) pairs and Re(rho01) never feed the populations.
"""

from dataclasses import dataclass
import logging

import numpy as np

from errors import InvalidStateError, StepSizeError
from integrator import (
    CONSERVATION_TOL,
    DEFAULT_DT,
    Trajectory,
    check_step_stability,
    propagate,
    step_count,
)
from model import DensityVector

logger = logging.getLogger(__name__)

HERMITIAN_TOL = 1e-10
DIAGONAL_SLACK = 1e-8

# Elements outside the reduced description; Re(rho01) is checked separately.
DECOUPLED_ELEMENTS = ((0, 2), (1, 2), (2, 0), (2, 1))


def _flat(i, j):
    # row-major vec(rho)
    return 3 * i + j


@dataclass(frozen=True, eq=False)
class FullState:
    """A 3x3 Hermitian, unit-trace density matrix."""

    rho: np.ndarray

    def __post_init__(self):
        rho = np.array(self.rho, dtype=complex)
        if rho.shape != (3, 3):
            raise InvalidStateError(f"density matrix must be 3x3, got shape {rho.shape}")
        if np.max(np.abs(rho - rho.conj().T)) > HERMITIAN_TOL:
            raise InvalidStateError('density matrix is not Hermitian')
        diagonal = np.diag(rho).real
        if np.any(diagonal < -DIAGONAL_SLACK) or np.any(diagonal > 1 + DIAGONAL_SLACK):
            raise InvalidStateError(f"populations outside [0, 1]: {diagonal}")
        if abs(diagonal.sum() - 1.0) > CONSERVATION_TOL:
            raise InvalidStateError(f"trace must be 1, got {diagonal.sum()!r}")
        rho.setflags(write=False)
        object.__setattr__(self, 'rho', rho)

    @classmethod
    def from_density_vector(cls, x):
        """Embed a reduced state with Re(rho01) = 0 and no level-2 coherences."""
        rho = np.diag([x.rho00, x.rho11, x.rho22]).astype(complex)
        rho[0, 1] = 1j * x.rhoB
        rho[1, 0] = -1j * x.rhoB
        return cls(rho)

    @classmethod
    def excited(cls):
        return cls(np.diag([0.0, 1.0, 0.0]))


def reduce(full):
    """(rho00, Im rho01, rho11, rho22) of a full density matrix."""
    rho = full.rho if isinstance(full, FullState) else np.asarray(full)
    return DensityVector(rho[0, 0].real, rho[0, 1].imag, rho[1, 1].real, rho[2, 2].real)


def full_generator(params):
    """
    The 9x9 complex generator acting on row-major vec(rho).

    d rho/dt = -i [H, rho] + relaxation, with H = (omega/2)(|0><1| + |1><0|)
    in units of hbar. For row-major vectorisation vec(A rho B) = (A kron B^T) vec(rho).
    """
    h = np.zeros((3, 3), dtype=complex)
    h[0, 1] = h[1, 0] = params.omega / 2.0
    eye = np.eye(3)
    gen = -1j * (np.kron(h, eye) - np.kron(eye, h.T))

    for i in range(3):
        for j in range(3):
            if i != j:
                gen[_flat(i, j), _flat(i, j)] -= 1.0 / params.t2

    p00, p11, p22 = _flat(0, 0), _flat(1, 1), _flat(2, 2)
    gen[p11, p11] -= params.level1_loss_rate
    gen[p00, p11] += params.k01
    gen[p22, p11] += params.k21
    gen[p22, p22] -= params.k02
    gen[p00, p22] += params.k02
    return gen


@dataclass(frozen=True, eq=False)
class FullTrajectory:
    """Sampled full density matrices; states has shape (n, 3, 3)."""

    times: np.ndarray
    states: np.ndarray
    params: object

    def __len__(self):
        return self.times.size

    def state(self, index):
        return FullState(self.states[index])

    def reduced(self):
        """The reduced Trajectory (rho00, Im rho01, rho11, rho22)."""
        s = self.states
        columns = np.stack([s[:, 0, 0].real, s[:, 0, 1].imag, s[:, 1, 1].real, s[:, 2, 2].real],
                           axis=1)
        return Trajectory(self.times, columns, self.params)

    def element(self, i, j):
        return self.states[:, i, j]


def evolve_full(params, init=None, t_end=14.0, dt=DEFAULT_DT, stride=1):
    """
    Integrate all nine density-matrix elements with the shared RK4 kernel.

    Args:
        params: SystemParams
        init: FullState (defaults to all population in level 1)
        t_end: Final time (ns)
        dt: Internal step (ns); must divide t_end
        stride: Internal steps per output sample

    Returns:
        FullTrajectory
    """
    init = FullState.excited() if init is None else init
    if not isinstance(init, FullState):
        init = FullState(init)
    n_steps = step_count(t_end, dt)
    gen = full_generator(params)
    check_step_stability(gen, dt)

    logger.info("Evolving full density matrix at omega=%g to t=%g ns", params.omega, t_end)
    flat = propagate(gen, init.rho.reshape(9), dt, n_steps, stride)
    times = np.arange(flat.shape[0]) * (stride * dt)
    traj = FullTrajectory(times, flat.reshape(-1, 3, 3), params)

    drift = trace_drift(traj)
    if drift > CONSERVATION_TOL:
        raise StepSizeError(drift, dt)
    return traj


def hermiticity_drift(traj):
    """max |rho - rho^dagger| over all samples."""
    s = traj.states
    return float(np.max(np.abs(s - np.conj(np.swapaxes(s, 1, 2)))))


def trace_drift(traj):
    """max |trace(rho) - 1| over all samples."""
    traces = np.trace(traj.states, axis1=1, axis2=2)
    drift = np.abs(traces - 1.0)
    if not np.all(np.isfinite(drift)):
        return float('inf')
    return float(drift.max())


def decoupling_residual(traj):
    """Largest magnitude reached by rho02, rho12, rho20, rho21 or Re(rho01)."""
    worst = float(np.max(np.abs(traj.element(0, 1).real)))
    for i, j in DECOUPLED_ELEMENTS:
        worst = max(worst, float(np.max(np.abs(traj.element(i, j)))))
    return worst
