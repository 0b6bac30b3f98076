"""Closed-form steady state and the omega at which level 2 overtakes the ground state."""

from dataclasses import dataclass
import logging
import math

import numpy as np
from scipy import optimize

from errors import BracketError, InvalidParameterError, NumericalFailureError
from model import DensityVector, build_generator

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SteadyState(DensityVector):
    """The t -> infinity limit of the reduced state."""


def steady_state(params):
    """
    Steady state of the reduced equations of motion.

    With no drive all population relaxes to the ground state, so omega = 0
    returns (1, 0, 0, 0).

    Args:
        params: SystemParams

    Returns:
        SteadyState
    """
    omega = params.omega
    if omega < 0:
        raise InvalidParameterError('omega', f"must be >= 0, got {omega:g}")
    if omega == 0:
        return SteadyState(1.0, 0.0, 0.0, 0.0)

    w2 = omega * omega
    denominator = (w2 * (1.0 + params.k21 / (2.0 * params.k02))
                   + 1.0 / (params.t1 * params.t2)
                   + params.k21 / params.t2)
    rho11 = 0.5 * w2 / denominator
    rho22 = params.k21 / params.k02 * rho11
    rho_b = params.level1_loss_rate * rho11 / omega
    rho00 = rho11 + 2.0 * rho_b / (omega * params.t2)
    return SteadyState(rho00, rho_b, rho11, rho22)


def null_residual(params):
    """max |L x_inf|; zero up to rounding for every valid parameter set."""
    gen = build_generator(params)
    return float(np.max(np.abs(gen @ steady_state(params).as_array())))


def large_drive_limit(params):
    """Limit of rho11(inf) as omega -> infinity: 1 / (2 + k21/k02)."""
    return 1.0 / (2.0 + params.k21 / params.k02)


def population_gap(params):
    """rho22(inf) - rho00(inf); positive once the level-2 bottleneck dominates."""
    x = steady_state(params)
    return x.rho22 - x.rho00


def crossover_omega_bisect(params, bracket, tol=1e-10):
    """
    Locate rho22(inf) = rho00(inf) by bisection inside `bracket`.

    Args:
        params: SystemParams (omega is ignored)
        bracket: (lo, hi) omega interval in GHz
        tol: Absolute omega tolerance

    Returns:
        omega at the crossing
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not 0 <= lo < hi:
        raise BracketError(lo, hi, 'needs 0 <= lo < hi')

    def gap(omega):
        return population_gap(params.with_omega(omega))

    if gap(lo) > 0 or gap(hi) < 0:
        raise BracketError(lo, hi, 'rho22(inf) - rho00(inf) does not change sign')
    return optimize.bisect(gap, lo, hi, xtol=tol)


def crossover_omega(params, bracket=None, tol=1e-10):
    """
    Drive strength where rho22(inf) overtakes rho00(inf).

    Solved from the closed-form steady state:
    omega*^2 = 2 (1/t1 + k21) / (t2 (k21/k02 - 1)).

    Args:
        params: SystemParams (omega is ignored)
        bracket: Optional (lo, hi); when given the closed form is cross-checked
            by bisection inside the bracket
        tol: Agreement tolerance for the cross-check

    Returns:
        omega* in GHz, or None when k21 <= k02 (level 2 never dominates)
    """
    ratio = params.k21 / params.k02
    if ratio <= 1.0:
        logger.info("No crossover: k21=%g <= k02=%g", params.k21, params.k02)
        return None

    omega_star = math.sqrt(2.0 * params.level1_loss_rate / (params.t2 * (ratio - 1.0)))

    if bracket is not None:
        checked = crossover_omega_bisect(params, bracket, tol=tol / 10)
        if abs(checked - omega_star) > tol:
            raise NumericalFailureError(
                f"closed-form crossover {omega_star!r} disagrees with bisection {checked!r}"
            )
        logger.info("Crossover %.12g confirmed by bisection in %s", omega_star, tuple(bracket))
    return omega_star
