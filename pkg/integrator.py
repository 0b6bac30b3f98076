"""Time evolution of the reduced state: fixed-step RK4 and the exact eigen-propagator."""

from dataclasses import dataclass
import logging
import math

import numpy as np
from scipy import linalg

from errors import (
    IllConditionedError,
    InvalidParameterError,
    InvalidStateError,
    NumericalFailureError,
    StepSizeError,
)
from model import POPULATION_INDICES, STATE_ORDER, DensityVector, build_generator

logger = logging.getLogger(__name__)

DEFAULT_DT = 1e-3
CONSERVATION_TOL = 1e-5
IMAG_TOL = 1e-10
COND_LIMIT = 1e6
RK4_ORDER = 4


@dataclass(frozen=True)
class InitialCondition(DensityVector):
    """A reduced state at t = 0 with unit total population."""

    def __post_init__(self):
        super().__post_init__()
        populations = (self.rho00, self.rho11, self.rho22)
        if any(p < 0 or p > 1 for p in populations):
            raise InvalidStateError(f"populations must lie in [0, 1], got {populations}")
        if abs(sum(populations) - 1.0) > 1e-9:
            raise InvalidStateError(f"populations must sum to 1, got {sum(populations)!r}")

    @classmethod
    def excited(cls):
        """All population in the excited level 1."""
        return cls(0.0, 0.0, 1.0, 0.0)

    @classmethod
    def ground(cls):
        return cls(1.0, 0.0, 0.0, 0.0)


def as_initial_condition(init):
    """Coerce None, a DensityVector or four numbers into a validated InitialCondition."""
    if init is None:
        return InitialCondition.excited()
    if isinstance(init, InitialCondition):
        return init
    if isinstance(init, DensityVector):
        return InitialCondition(*init.as_array())
    return InitialCondition.from_array(init)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled reduced states; row i of `states` is the state at `times[i]`."""

    times: np.ndarray
    states: np.ndarray
    params: object

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        states = np.asarray(self.states, dtype=float)
        if times.ndim != 1 or times.size == 0:
            raise ValueError('times must be a non-empty 1-d grid')
        if times[0] != 0.0:
            raise ValueError(f"times must start at 0, got {times[0]!r}")
        if np.any(np.diff(times) <= 0):
            raise ValueError('times must be strictly increasing')
        if states.shape != (times.size, 4):
            raise ValueError(f"states must have shape ({times.size}, 4), got {states.shape}")
        times.setflags(write=False)
        states.setflags(write=False)
        object.__setattr__(self, 'times', times)
        object.__setattr__(self, 'states', states)

    def __len__(self):
        return self.times.size

    def state(self, index):
        return DensityVector.from_array(self.states[index])

    @property
    def final(self):
        return self.state(-1)

    def component(self, name):
        return self.states[:, STATE_ORDER.index(name)]

    def index_of(self, t, atol=1e-9):
        """Index of the grid point equal to t; raises KeyError when t is off-grid."""
        idx = int(np.searchsorted(self.times, t - atol))
        if idx < self.times.size and abs(self.times[idx] - t) <= atol:
            return idx
        raise KeyError(f"t={t:g} ns is not a sample of this trajectory")

    def sample_at(self, t):
        return self.state(self.index_of(t))

    def population_sums(self):
        return self.states[:, list(POPULATION_INDICES)].sum(axis=1)


def rk4_transfer(matrix, dt):
    """
    One classical RK4 step for the linear autonomous system y' = M y.

    For a linear right-hand side the four RK4 stages collapse to the matrix
    I + hM + (hM)^2/2 + (hM)^3/6 + (hM)^4/24, which is what this returns.
    """
    a = dt * np.asarray(matrix)
    eye = np.eye(a.shape[0], dtype=a.dtype)
    return eye + a @ (eye + a @ (eye + a @ (eye + a / 4) / 3) / 2)


def propagate(matrix, y0, dt, n_steps, stride=1):
    """
    Step y' = M y with fixed-step RK4 and keep every `stride`-th state.

    Args:
        matrix: Square (real or complex) system matrix
        y0: Initial state vector
        dt: Internal step (ns)
        n_steps: Number of internal steps; must be a multiple of stride
        stride: Internal steps per output sample

    Returns:
        Array of shape (n_steps // stride + 1, len(y0)), row 0 equal to y0
    """
    if n_steps % stride:
        raise InvalidParameterError('stride', f"{stride} does not divide {n_steps} steps")
    step = rk4_transfer(matrix, dt)
    # stride steps between samples applied as one matrix
    jump = np.linalg.matrix_power(step, stride)

    y = np.array(y0, dtype=np.result_type(step, np.asarray(y0)))
    samples = np.empty((n_steps // stride + 1,) + y.shape, dtype=y.dtype)
    samples[0] = y
    for i in range(1, samples.shape[0]):
        y = jump @ y
        samples[i] = y
    return samples


def step_count(t_end, dt):
    """Number of fixed steps covering [0, t_end]; dt must divide t_end."""
    if not t_end > 0:
        raise InvalidParameterError('t_end', f"must be > 0, got {t_end!r}")
    if not dt > 0:
        raise InvalidParameterError('dt', f"must be > 0, got {dt!r}")
    n_steps = int(round(t_end / dt))
    if n_steps < 1 or abs(n_steps * dt - t_end) > 1e-9 * max(1.0, t_end):
        raise InvalidParameterError('dt', f"{dt:g} does not divide t_end={t_end:g}")
    return n_steps


def check_step_stability(matrix, dt):
    """Raise StepSizeError if the RK4 step amplifies any mode."""
    radius = float(np.max(np.abs(np.linalg.eigvals(rk4_transfer(matrix, dt)))))
    if radius > 1.0 + 1e-12:
        raise StepSizeError(radius - 1.0, dt)


def conservation_residual(traj):
    """Largest |rho00 + rho11 + rho22 - 1| over the trajectory."""
    residual = np.abs(traj.population_sums() - 1.0)
    if not np.all(np.isfinite(residual)):
        return math.inf
    return float(residual.max())


def coherence_bound_violations(traj, slack=1e-6):
    """Number of samples with |rhoB| > 2 sqrt(rho00 rho11) + slack."""
    rho00 = np.clip(traj.component('rho00'), 0.0, None)
    rho11 = np.clip(traj.component('rho11'), 0.0, None)
    bound = 2.0 * np.sqrt(rho00 * rho11) + slack
    return int(np.count_nonzero(np.abs(traj.component('rhoB')) > bound))


def evolve(params, init=None, t_end=14.0, dt=DEFAULT_DT, stride=1):
    """
    Integrate the reduced equations of motion with fixed-step RK4.

    Args:
        params: SystemParams
        init: InitialCondition (defaults to all population in level 1)
        t_end: Final time (ns)
        dt: Internal step (ns); must divide t_end
        stride: Internal steps per output sample

    Returns:
        Trajectory on the grid 0, stride*dt, ..., t_end
    """
    init = as_initial_condition(init)
    n_steps = step_count(t_end, dt)
    gen = build_generator(params)
    check_step_stability(gen.entries, dt)

    logger.info("Evolving omega=%g to t=%g ns (dt=%g, %d steps, stride %d)",
                params.omega, t_end, dt, n_steps, stride)
    states = propagate(gen.entries, init.as_array(), dt, n_steps, stride)
    times = np.arange(states.shape[0]) * (stride * dt)
    traj = Trajectory(times, states, params)

    residual = conservation_residual(traj)
    if residual > CONSERVATION_TOL:
        raise StepSizeError(residual, dt)

    violations = coherence_bound_violations(traj)
    if violations:
        logger.warning("Coherence bound |rhoB| <= 2 sqrt(rho00 rho11) exceeded at %d of %d samples "
                       "(omega=%g)", violations, len(traj), params.omega)
    return traj


@dataclass(frozen=True, eq=False)
class ModalExpansion:
    """x(t) = sum_k coefficients[:, k] * exp(gammas[k] t)."""

    gammas: np.ndarray
    coefficients: np.ndarray
    condition: float

    def evaluate(self, times):
        phases = np.exp(np.outer(np.asarray(times, dtype=float), self.gammas))
        return phases @ self.coefficients.T


def modal_expansion(params, init):
    """
    Diagonalise the generator and project the initial state on its modes.

    Returns:
        ModalExpansion whose coefficients[i, k] is the weight of mode k in component i
    """
    gen = build_generator(params)
    gammas, vectors = linalg.eig(gen.entries)
    condition = float(np.linalg.cond(vectors))
    if not np.isfinite(condition) or condition > COND_LIMIT:
        raise IllConditionedError(params.omega, condition)
    weights = linalg.solve(vectors, np.asarray(init.as_array(), dtype=complex))
    return ModalExpansion(gammas, vectors * weights, condition)


def exact_solution(params, init=None, times=None):
    """
    Evaluate x(t) = V exp(Gamma t) V^-1 x(0) on a time grid.

    Args:
        params: SystemParams
        init: InitialCondition (defaults to all population in level 1)
        times: Strictly increasing grid starting at 0 (ns)

    Returns:
        Trajectory
    """
    init = as_initial_condition(init)
    times = np.array([0.0, 14.0]) if times is None else np.asarray(times, dtype=float)
    expansion = modal_expansion(params, init)
    values = expansion.evaluate(times)

    imag = float(np.max(np.abs(values.imag)))
    if imag > IMAG_TOL:
        raise NumericalFailureError(
            f"exact propagator left an imaginary residue of {imag:.3g} at omega={params.omega:g}"
        )
    states = values.real
    # exp(0) is the identity; return the initial state bit-for-bit
    if times.size and times[0] == 0.0:
        states[0] = init.as_array()
    return Trajectory(times, states, params)


def measured_order(params, init=None, t_end=2.0, dt=0.02):
    """
    Observed convergence order of evolve() from one dt halving.

    Both runs are compared with exact_solution() on a shared output grid of
    spacing 2*dt; the order is log2(err(dt) / err(dt/2)).
    """
    init = as_initial_condition(init)
    coarse = evolve(params, init, t_end, dt, stride=2)
    fine = evolve(params, init, t_end, dt / 2, stride=4)
    exact = exact_solution(params, init, coarse.times)
    err_coarse = float(np.max(np.abs(coarse.states - exact.states)))
    err_fine = float(np.max(np.abs(fine.states - exact.states)))
    logger.info("Order check: err(dt=%g)=%.3g, err(dt=%g)=%.3g", dt, err_coarse, dt / 2, err_fine)
    if err_fine == 0.0:
        raise NumericalFailureError('fine-step error is exactly zero; increase dt')
    return math.log2(err_coarse / err_fine)
