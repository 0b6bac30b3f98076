"""Decay-constant fits, short-time decay and omega sweeps built on the other modules."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import logging
import math

import numpy as np

from errors import InsufficientSignalError, InvalidParameterError
from model import STATE_ORDER, build_generator
from spectrum import eigenvalues
from steady_state import steady_state

logger = logging.getLogger(__name__)

SIGNIFICANCE_FLOOR = 1e-12
FIT_TIMES = (11.0, 14.0)
EARLY_WINDOW = (0.0, 0.4)


@dataclass(frozen=True)
class DecayFit:
    """Two-point exponential fit of one component's approach to steady state."""

    tau: float
    component: str
    t1: float
    t2: float
    residuals: tuple


@dataclass(frozen=True)
class SweepRow:
    omega: float
    steady: object
    spectrum: object
    tau3: float


def _check_component(component):
    if component not in STATE_ORDER:
        raise InvalidParameterError('component', f"expected one of {STATE_ORDER}, got {component!r}")


def fit_decay_constant(traj, target, component='rho00', t1=FIT_TIMES[0], t2=FIT_TIMES[1],
                       floor=SIGNIFICANCE_FLOOR):
    """
    Decay time from the deviations from steady state at two sample times.

    Args:
        traj: Trajectory containing samples at t1 and t2
        target: SteadyState the trajectory approaches
        component: One of rho00, rhoB, rho11, rho22
        t1, t2: Fit abscissae (ns), t1 < t2
        floor: Smallest deviation treated as signal

    Returns:
        DecayFit with tau = (t2 - t1) / ln(|r1| / |r2|)
    """
    _check_component(component)
    if not t1 < t2:
        raise InvalidParameterError('t1', f"must be < t2, got {t1:g} >= {t2:g}")

    samples = {}
    for name, t in (('t1', t1), ('t2', t2)):
        try:
            samples[name] = traj.sample_at(t)
        except KeyError:
            raise InvalidParameterError(name, f"{t:g} ns is not a sample time of the trajectory")
    r1 = samples['t1'][component] - target[component]
    r2 = samples['t2'][component] - target[component]
    if abs(r1) <= floor or abs(r2) <= floor:
        raise InsufficientSignalError(
            component, f"deviation from steady state below {floor:g} (r1={r1:.3g}, r2={r2:.3g})"
        )
    if (r1 > 0) != (r2 > 0):
        raise InsufficientSignalError(component, 'deviation changes sign between the fit times')
    if abs(r2) >= abs(r1):
        raise InsufficientSignalError(component, 'deviation is not decaying between the fit times')

    tau = (t2 - t1) / math.log(abs(r1) / abs(r2))
    return DecayFit(tau, component, t1, t2, (r1, r2))


def check_fit_grid(dt, stride, times=FIT_TIMES):
    """Raise InvalidParameterError unless every fit time lands on the dt * stride sample grid."""
    step = dt * stride
    for t in times:
        n = t / step
        if abs(n - round(n)) * step > 1e-9:
            raise InvalidParameterError(
                'stride', f"sample spacing {step:g} ns (dt={dt:g}, stride={stride}) misses t={t:g} ns")


def effective_initial_decay(params):
    """Weak-field lifetime of the initially excited level: 1 / (1/t1 + k21)."""
    return 1.0 / params.level1_loss_rate


def fit_early_decay(traj, component='rho11', window=EARLY_WINDOW):
    """
    Log-linear least-squares decay time over an early time window.

    Args:
        traj: Trajectory
        component: Component to fit (must stay positive in the window)
        window: (start, stop) in ns, inclusive

    Returns:
        tau in ns
    """
    _check_component(component)
    start, stop = window
    mask = (traj.times >= start - 1e-12) & (traj.times <= stop + 1e-12)
    values = traj.component(component)[mask]
    if values.size < 2:
        raise InsufficientSignalError(component, f"fewer than two samples in window {window}")
    if np.any(values <= 0):
        raise InsufficientSignalError(component, 'non-positive values in the fit window')
    slope, _ = np.polyfit(traj.times[mask], np.log(values), 1)
    if slope >= 0:
        raise InsufficientSignalError(component, 'no decay in the fit window')
    return -1.0 / float(slope)


def deviation_series(traj, target):
    """x(t) - x_inf for every sample, columns in state order."""
    return traj.states - target.as_array()


def time_crossover(traj):
    """
    First time rho22(t) catches up with rho00(t), linearly interpolated.

    Returns:
        Time in ns, or None if rho22 stays below rho00 on the whole grid
    """
    gap = traj.component('rho22') - traj.component('rho00')
    crossing = np.nonzero((gap[:-1] < 0) & (gap[1:] >= 0))[0]
    if crossing.size == 0:
        return None
    i = int(crossing[0])
    t0, t1 = traj.times[i], traj.times[i + 1]
    return float(t0 + (t1 - t0) * (-gap[i]) / (gap[i + 1] - gap[i]))


def sweep_row(params, omega):
    driven = params.with_omega(omega)
    spec = eigenvalues(build_generator(driven))
    return SweepRow(float(omega), steady_state(driven), spec, spec.tau3)


def sweep(params, omegas, workers=1):
    """
    Steady state and spectrum for each drive strength.

    Args:
        params: SystemParams (omega is ignored)
        omegas: Non-empty sequence of omega >= 0
        workers: Thread count; rows always come back in input order

    Returns:
        List of SweepRow
    """
    omegas = [float(w) for w in omegas]
    if not omegas:
        raise InvalidParameterError('omegas', 'must not be empty')
    if any(w < 0 or not math.isfinite(w) for w in omegas):
        raise InvalidParameterError('omegas', 'every omega must be finite and >= 0')

    logger.info("Sweeping %d omega values with %d worker(s)", len(omegas), workers)
    if workers <= 1:
        return [sweep_row(params, w) for w in omegas]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda w: sweep_row(params, w), omegas))
