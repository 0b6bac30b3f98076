"""
Eigenvalues of the 4x4 generator.

Probability conservation makes (1, 0, 1, 1) a left null vector, so the
characteristic polynomial always factors as gamma * cubic(gamma). The zero
root is taken exactly and the cubic is solved in closed form; whether the
two fast modes form a complex pair is read off the cubic's discriminant.
"""

from dataclasses import dataclass
from itertools import combinations
import logging
import math

import numpy as np
from scipy import linalg, optimize

from errors import BracketError, NumericalFailureError
from model import build_generator

logger = logging.getLogger(__name__)

ZERO_TOL = 1e-10
NEWTON_STEPS = 3
IMAG_TOL = 1e-12


@dataclass(frozen=True)
class Spectrum:
    """Four eigenvalues (a complex pair in gamma1, gamma2; gamma4 = 0 last) and three decay times."""

    gammas: tuple
    taus: tuple
    complex_pair: bool
    discriminant: float

    @property
    def gamma3(self):
        """Slowest decaying mode; sets the approach to steady state."""
        return self.gammas[2]

    @property
    def tau3(self):
        return self.taus[2]

    @property
    def total(self):
        return complex(sum(self.gammas))


def cubic_coefficients(gen):
    """
    Coefficients (B, C, D) of gamma^3 + B gamma^2 + C gamma + D.

    det(gamma I - L) = gamma^4 - E1 gamma^3 + E2 gamma^2 - E3 gamma + E4, where Ek
    is the sum of the k x k principal minors of L. E4 = det L = 0, so dividing
    by gamma leaves the cubic with B = -E1, C = E2, D = -E3.
    """
    m = gen.entries
    e1 = float(np.trace(m))
    e2 = sum(float(np.linalg.det(m[np.ix_(idx, idx)])) for idx in combinations(range(4), 2))
    e3 = sum(float(np.linalg.det(m[np.ix_(idx, idx)])) for idx in combinations(range(4), 3))
    return -e1, e2, -e3


def cubic_discriminant(gen):
    """> 0: three distinct real roots; < 0: one real root and a complex pair."""
    b, c, d = cubic_coefficients(gen)
    return 18 * b * c * d - 4 * b ** 3 * d + b ** 2 * c ** 2 - 4 * c ** 3 - 27 * d ** 2


def _polish(root, b, c, d):
    # Newton on the monic cubic; one or two steps recover the digits Cardano loses.
    # A step is kept only if it shrinks the residual, which stops it wandering near repeated roots.
    value = ((root + b) * root + c) * root + d
    for _ in range(NEWTON_STEPS):
        slope = (3 * root + 2 * b) * root + c
        if slope == 0:
            break
        candidate = root - value / slope
        new_value = ((candidate + b) * candidate + c) * candidate + d
        if not abs(new_value) < abs(value):
            break
        root, value = candidate, new_value
    return root


def solve_cubic(b, c, d, discriminant):
    """
    Roots of the monic cubic; returns (roots, has_complex_pair).

    A zero discriminant counts as real (repeated roots). With a non-negative
    discriminant and p >= 0 the roots coincide to rounding and the triple-root
    limit -b/3 is returned.
    """
    shift = b / 3.0
    p = c - b * b / 3.0
    q = 2.0 * b ** 3 / 27.0 - b * c / 3.0 + d

    if discriminant >= 0:
        if p >= 0:
            return [-shift] * 3, False
        # three real roots, trigonometric form
        r = 2.0 * math.sqrt(-p / 3.0)
        arg = 3.0 * q / (p * r)
        theta = math.acos(max(-1.0, min(1.0, arg))) / 3.0
        roots = [r * math.cos(theta - 2.0 * math.pi * k / 3.0) - shift for k in range(3)]
        return [_polish(root, b, c, d) for root in roots], False

    half = math.sqrt(max(q * q / 4.0 + p ** 3 / 27.0, 0.0))
    u = float(np.cbrt(-q / 2.0 + half))
    v = float(np.cbrt(-q / 2.0 - half))
    real = _polish(u + v - shift, b, c, d)
    pair = _polish(complex(-(u + v) / 2.0 - shift, math.sqrt(3.0) / 2.0 * (u - v)), b, c, d)
    return [real, pair, pair.conjugate()], True


def _order(values):
    """
    Conjugate pair first (ascending imaginary part), then real values ascending.

    A pair can share its real part with a real root, so real part alone does
    not keep the pair in the gamma1, gamma2 slots.
    """
    values = [complex(v) for v in values]
    pair = sorted((v for v in values if abs(v.imag) > IMAG_TOL * max(1.0, abs(v))),
                  key=lambda v: v.imag)
    real = sorted((v for v in values if abs(v.imag) <= IMAG_TOL * max(1.0, abs(v))),
                  key=lambda v: v.real)
    return pair + [complex(v.real, 0.0) for v in real]


def eigenvalues(gen):
    """
    Spectrum of the generator.

    Args:
        gen: GeneratorMatrix

    Returns:
        Spectrum with gamma4 exactly 0
    """
    b, c, d = cubic_coefficients(gen)
    if not all(math.isfinite(x) for x in (b, c, d)):
        raise NumericalFailureError(f"non-finite cubic coefficients {(b, c, d)}")
    discriminant = cubic_discriminant(gen)
    roots, complex_pair = solve_cubic(b, c, d, discriminant)

    if complex_pair:
        real, pair, conjugate = roots
        decaying = sorted((complex(pair), complex(conjugate)), key=lambda g: g.imag) + [complex(real)]
    else:
        decaying = sorted((complex(r) for r in roots), key=lambda g: g.real)
    for gamma in decaying:
        if not (math.isfinite(gamma.real) and math.isfinite(gamma.imag)):
            raise NumericalFailureError(f"cubic solver returned {gamma}")
        if abs(gamma) <= ZERO_TOL:
            raise NumericalFailureError(f"second zero eigenvalue {gamma} at omega={gen.omega:g}")
        if gamma.real >= 0:
            raise NumericalFailureError(f"non-decaying eigenvalue {gamma} at omega={gen.omega:g}")

    gammas = tuple(decaying) + (0j,)
    taus = tuple(-1.0 / g.real for g in decaying)
    return Spectrum(gammas, taus, complex_pair, float(discriminant))


def generic_eigenvalues(gen):
    """All four eigenvalues from a dense solver, in the same order as eigenvalues()."""
    return _order(linalg.eigvals(gen.entries))


def trace_residual(gen, spec):
    """|sum of eigenvalues - trace(L)|, a health check on the solver."""
    return abs(spec.total - gen.trace)


def weak_field_limits(params):
    """
    Eigenvalues of the decaying modes as omega -> 0.

    Returns:
        (-1/t1 - k21, -1/t2, -k02)
    """
    return (-params.level1_loss_rate, -1.0 / params.t2, -params.k02)


def spectrum_at(params, omega):
    return eigenvalues(build_generator(params.with_omega(omega)))


def spectrum_scan(params, omegas):
    """Spectra on a grid of drive strengths (params.omega is ignored)."""
    return [spectrum_at(params, omega) for omega in omegas]


def complex_onset(params, bracket=(1.0, 3.0), tol=1e-3):
    """
    Drive strength where gamma1 and gamma2 merge into a complex pair.

    Bisection on the sign of the cubic's discriminant.

    Args:
        params: SystemParams (omega is ignored)
        bracket: (lo, hi) with three real roots at lo and a complex pair at hi
        tol: Absolute omega tolerance

    Returns:
        omega_c in GHz
    """
    lo, hi = float(bracket[0]), float(bracket[1])

    def discriminant(omega):
        return cubic_discriminant(build_generator(params.with_omega(omega)))

    if not (lo < hi and discriminant(lo) > 0 and discriminant(hi) < 0):
        raise BracketError(lo, hi)
    omega_c = optimize.bisect(discriminant, lo, hi, xtol=tol)
    logger.info("Complex pair appears at omega=%.6g (bracket %g..%g)", omega_c, lo, hi)
    return omega_c


def power_law_exponent(params, omegas=None):
    """
    Least-squares slope of log(-gamma3) against log(omega).

    Args:
        params: SystemParams (omega is ignored)
        omegas: Positive grid; defaults to 25 points on [4, 10]

    Returns:
        The fitted exponent
    """
    omegas = np.linspace(4.0, 10.0, 25) if omegas is None else np.asarray(omegas, dtype=float)
    rates = [-spec.gamma3.real for spec in spectrum_scan(params, omegas)]
    slope, _ = np.polyfit(np.log(omegas), np.log(rates), 1)
    return float(slope)
