import numpy as np
import pytest

from errors import InvalidParameterError
from model import (
    CONSERVATION_ROW,
    DensityVector,
    SystemParams,
    build_generator,
    default_params,
    drive_matrix,
    rabi_frequency,
)


def test_rabi_frequency_is_e_mu_over_hbar():
    assert rabi_frequency(2.0, 3.0, 1.5) == pytest.approx(4.0)
    assert rabi_frequency(1.0, 1.0, 1.0) == 1.0
    assert rabi_frequency(4.0, 3.0, 1.5) == pytest.approx(2 * rabi_frequency(2.0, 3.0, 1.5))


@pytest.mark.parametrize('args', [(0.0, 1.0, 1.0), (1.0, -2.0, 1.0), (1.0, 1.0, 0.0)])
def test_rabi_frequency_rejects_non_positive_inputs(args):
    with pytest.raises(InvalidParameterError):
        rabi_frequency(*args)


def test_default_params():
    p = default_params()
    assert p.t1 == 0.0923333
    assert p.t2 == 0.132
    assert p.k21 == 1.0
    assert p.k02 == 0.1
    assert p.omega == 0.0
    assert p.k01 == pytest.approx(1 / 0.0923333)
    assert p.level1_loss_rate == pytest.approx(11.830, abs=5e-4)


@pytest.mark.parametrize('field, value', [
    ('t1', 0.0), ('t2', -1.0), ('k21', -0.1), ('k02', 0.0), ('omega', -1.0), ('t1', float('nan')),
])
def test_invalid_params_name_the_field(field, value):
    values = default_params().as_dict()
    values[field] = value
    with pytest.raises(InvalidParameterError) as excinfo:
        SystemParams(**values)
    assert excinfo.value.field == field


def test_with_omega_copies():
    p = default_params()
    q = p.with_omega(4.5)
    assert q.omega == 4.5
    assert p.omega == 0.0
    assert q.t1 == p.t1


def test_generator_layout():
    p = default_params(4.5)
    L = build_generator(p).entries
    a = 1 / p.t1
    expected = np.array([
        [0, -4.5, a, 0.1],
        [2.25, -1 / p.t2, -2.25, 0],
        [0, 4.5, -a - 1.0, 0],
        [0, 0, 1.0, -0.1],
    ])
    np.testing.assert_allclose(L, expected, rtol=0, atol=1e-12)
    assert np.count_nonzero(L[3]) == 2


def test_drive_terms_vanish_without_drive():
    L = build_generator(default_params()).entries
    assert L[0, 1] == 0
    assert L[2, 1] == 0


@pytest.mark.parametrize('omega', [0.0, 0.1, 2.185, 4.5, 10.0, 100.0])
def test_conservation_row_annihilates_generator(omega):
    L = build_generator(default_params(omega)).entries
    np.testing.assert_allclose(CONSERVATION_ROW @ L, 0, atol=1e-12)


def test_generator_is_singular():
    L = build_generator(default_params(4.5)).entries
    assert abs(np.linalg.det(L)) < 1e-9


def test_generator_is_affine_in_omega():
    base = build_generator(default_params()).entries
    driven = build_generator(default_params(3.0)).entries
    np.testing.assert_allclose(driven, base + 3.0 * drive_matrix(), atol=1e-12)


def test_generator_is_read_only():
    gen = build_generator(default_params(1.0))
    with pytest.raises(ValueError):
        gen.entries[0, 0] = 1.0


def test_trace_matches_formula():
    p = default_params(1.0)
    gen = build_generator(p)
    assert gen.trace == pytest.approx(-1 / p.t1 - p.k21 - 1 / p.t2 - p.k02, abs=1e-9)
    assert gen.trace == pytest.approx(-19.50608, abs=1e-5)


def test_density_vector_access():
    x = DensityVector.from_array([0.5, 0.1, 0.3, 0.2])
    assert x['rhoB'] == 0.1
    assert x.population_sum == pytest.approx(1.0)
    assert list(x.as_dict()) == ['rho00', 'rhoB', 'rho11', 'rho22']
    with pytest.raises(KeyError):
        x['rho01']
