import numpy as np
import pytest

import benchmarks
from errors import BracketError
from model import SystemParams, build_generator, default_params
from spectrum import (
    complex_onset,
    cubic_coefficients,
    cubic_discriminant,
    eigenvalues,
    generic_eigenvalues,
    power_law_exponent,
    solve_cubic,
    spectrum_scan,
    trace_residual,
    weak_field_limits,
)


@pytest.mark.parametrize('omega', sorted(benchmarks.WEAK_FIELD_EIGENVALUES))
def test_weak_field_table(omega):
    spec = eigenvalues(build_generator(default_params(omega)))
    expected = benchmarks.WEAK_FIELD_EIGENVALUES[omega]
    got = [g.real for g in spec.gammas[:3]]
    assert got == pytest.approx(expected, abs=benchmarks.EIGENVALUE_ATOL)
    assert spec.gammas[3] == 0
    assert not spec.complex_pair


def test_weak_field_limits():
    limits = weak_field_limits(default_params())
    assert limits == pytest.approx(benchmarks.WEAK_FIELD_LIMITS, rel=5e-6)
    taus = [-1 / g for g in limits]
    assert taus == pytest.approx(benchmarks.WEAK_FIELD_TAUS, rel=5e-6)


@pytest.mark.parametrize('omega', [0.0001, 0.1, 1.0, 2.0, 2.5, 4.5, 10.0])
def test_eigenvalue_sum_is_trace(omega):
    gen = build_generator(default_params(omega))
    spec = eigenvalues(gen)
    assert trace_residual(gen, spec) < 1e-6
    assert spec.total.real == pytest.approx(benchmarks.TRACE, abs=benchmarks.TRACE_ATOL)
    assert abs(spec.total.imag) < 1e-12


@pytest.mark.parametrize('omega', [0.0, 0.5, 1.0, 2.0, 2.5, 4.5, 10.0])
def test_matches_dense_solver(omega):
    gen = build_generator(default_params(omega))

    def key(g):
        return (round(g.real, 6), g.imag)

    ours = sorted(eigenvalues(gen).gammas, key=key)
    dense = sorted(generic_eigenvalues(gen), key=key)
    np.testing.assert_allclose(np.array(ours), np.array(dense), atol=1e-8)


@pytest.mark.parametrize('omega', [0.1, 1.0, 2.5, 4.5, 10.0])
def test_all_modes_decay(omega):
    spec = eigenvalues(build_generator(default_params(omega)))
    assert all(g.real < 0 for g in spec.gammas[:3])
    assert spec.tau3 == pytest.approx(-1 / spec.gamma3.real)
    assert spec.taus[2] == max(spec.taus)


def test_cubic_coefficients_match_characteristic_polynomial():
    gen = build_generator(default_params(4.5))
    b, c, d = cubic_coefficients(gen)
    quartic = np.poly(gen.entries)
    np.testing.assert_allclose(quartic[:4], [1.0, b, c, d], rtol=1e-10)
    assert quartic[4] == pytest.approx(0.0, abs=1e-9)


def test_solve_cubic_on_known_roots():
    # (x + 1)(x + 2)(x + 3)
    roots, pair = solve_cubic(6.0, 11.0, 6.0, 4.0)
    assert not pair
    assert sorted(roots) == pytest.approx([-3.0, -2.0, -1.0])
    # (x + 1)(x^2 + 2x + 5): roots -1, -1 +- 2i
    roots, pair = solve_cubic(3.0, 7.0, 5.0, -256.0)
    assert pair
    assert roots[0] == pytest.approx(-1.0)
    assert roots[1] == pytest.approx(complex(-1, 2)) or roots[1] == pytest.approx(complex(-1, -2))
    assert roots[2] == roots[1].conjugate()


def test_complex_pair_is_exact_conjugate():
    spec = eigenvalues(build_generator(default_params(4.5)))
    assert spec.complex_pair
    assert spec.discriminant < 0
    assert spec.gammas[0] == spec.gammas[1].conjugate()
    assert spec.gamma3.imag == 0


def test_complex_onset():
    onset = complex_onset(default_params(), (1.0, 3.0), 1e-4)
    assert onset == pytest.approx(benchmarks.COMPLEX_ONSET, abs=benchmarks.COMPLEX_ONSET_ATOL)
    below = build_generator(default_params(onset - 0.01))
    above = build_generator(default_params(onset + 0.01))
    assert cubic_discriminant(below) > 0 > cubic_discriminant(above)


def test_complex_onset_barely_moves_with_k02():
    onsets = [complex_onset(SystemParams(0.0923333, 0.132, 1.0, k02), (1.0, 3.0), 1e-4)
              for k02 in (0.1, 0.2, 0.3, 0.4)]
    assert max(onsets) - min(onsets) < 0.15


def test_complex_onset_bad_bracket():
    with pytest.raises(BracketError):
        complex_onset(default_params(), (3.0, 5.0))


def test_power_law_exponent():
    assert power_law_exponent(default_params()) == pytest.approx(
        benchmarks.POWER_LAW_EXPONENT, abs=benchmarks.POWER_LAW_ATOL)


def test_imaginary_part_grows_roughly_linearly():
    omegas = np.linspace(4.5, 10.0, 12)
    imag = [abs(s.gammas[0].imag) for s in spectrum_scan(default_params(), omegas)]
    slope, intercept = np.polyfit(omegas, imag, 1)
    fitted = slope * omegas + intercept
    assert slope > 0
    assert np.max(np.abs(fitted - imag)) < 0.05 * max(imag)


def test_tau3_decreases_with_drive():
    taus = [s.tau3 for s in spectrum_scan(default_params(), [0.1, 1.0, 4.5, 10.0])]
    assert all(a > b for a, b in zip(taus, taus[1:]))
    assert taus[2] == pytest.approx(benchmarks.DECAY_TIMES[4.5], rel=0.01)
    assert taus[3] == pytest.approx(benchmarks.DECAY_TIMES[10.0], rel=0.01)


def test_solve_cubic_zero_discriminant_is_real():
    # (x + 1)^3
    roots, pair = solve_cubic(3.0, 3.0, 1.0, 0.0)
    assert not pair
    assert roots == pytest.approx([-1.0, -1.0, -1.0])
    # (x + 1)^2 (x + 2)
    roots, pair = solve_cubic(4.0, 5.0, 2.0, 0.0)
    assert not pair
    assert sorted(roots) == pytest.approx([-2.0, -1.0, -1.0])


def test_solve_cubic_rounding_positive_discriminant_near_triple_root():
    roots, pair = solve_cubic(3.0, 3.0 + 1e-15, 1.0, 4.6e-14)
    assert not pair
    assert roots == pytest.approx([-1.0, -1.0, -1.0], abs=1e-4)


EQUAL_RATES = SystemParams(1.0, 1.0, 0.0, 1.0)


@pytest.mark.parametrize('omega', np.logspace(-9, 1, 200))
def test_equal_relaxation_rates_near_degenerate(omega):
    gen = build_generator(EQUAL_RATES.with_omega(omega))
    spec = eigenvalues(gen)
    assert spec.gamma3.imag == 0
    assert all(g.real < 0 for g in spec.gammas[:3])
    ours = sorted(g.real for g in spec.gammas)
    dense = sorted(g.real for g in generic_eigenvalues(gen))
    np.testing.assert_allclose(ours, dense, atol=1e-4)


def test_pair_sharing_real_part_with_real_root():
    gen = build_generator(EQUAL_RATES.with_omega(0.5))
    spec = eigenvalues(gen)
    assert spec.complex_pair
    assert spec.gammas[0].imag < 0 < spec.gammas[1].imag
    assert spec.gammas[0] == spec.gammas[1].conjugate()
    assert spec.gamma3.imag == 0
    assert spec.gamma3.real == pytest.approx(-1.0, abs=1e-9)
    assert spec.tau3 == pytest.approx(1.0, abs=1e-8)
    np.testing.assert_allclose(np.array(spec.gammas), np.array(generic_eigenvalues(gen)), atol=1e-8)


def test_spectrum_is_continuous_in_omega():
    spectra = spectrum_scan(default_params(), np.linspace(0.0, 10.0, 1001))
    real = np.array([[g.real for g in s.gammas[:3]] for s in spectra])
    tau3 = np.array([s.tau3 for s in spectra])
    assert np.max(np.abs(np.diff(real[:, :2], axis=0))) < 0.5
    assert np.max(np.abs(np.diff(real[:, 2]))) < 2e-3
    assert np.max(np.abs(np.diff(tau3)) / tau3[1:]) < 0.02
