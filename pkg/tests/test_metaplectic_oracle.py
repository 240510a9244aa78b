import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from dualpair_symbols.metaplectic_oracle import (
    HermiteModel, center_lifts, center_section_exists, central_character_check, fit_u1u1,
    hermite_functions, lift, lift_rotation, multiply_lifts_projectively, o1_operator_identity,
    omega_grid, omega_hermite, projector_O1, projector_U1, u1u1_oracle_profiles, xi_squared)
from dualpair_symbols.pair_catalog import covering_splits, make_pair

angles = st.floats(0.05, 4 * math.pi - 0.05).filter(lambda t: abs(t - 2 * math.pi) > 0.05)


def test_hermite_orthonormal_by_quadrature():
    for j in range(4):
        for k in range(4):
            val = integrate.quad(lambda x: hermite_functions(np.array([x]), 4)[0, j]
                                 * hermite_functions(np.array([x]), 4)[0, k], -np.inf, np.inf)[0]
            assert abs(val - (j == k)) < 1e-10


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_hermite_fourier_eigenfunctions(n):
    """h_n is an eigenfunction of f -> int f(x) e^{-2 pi i x xi} dx with eigenvalue (-i)^n."""
    xi = 0.37
    h = lambda x: hermite_functions(np.array([x]), n + 1)[0, n]
    re = integrate.quad(lambda x: h(x) * math.cos(2 * math.pi * x * xi), -np.inf, np.inf)[0]
    im = integrate.quad(lambda x: -h(x) * math.sin(2 * math.pi * x * xi), -np.inf, np.inf)[0]
    assert abs((re + 1j * im) - (-1j) ** n * h(xi)) < 1e-10


def test_grid_gram():
    assert HermiteModel(16, 128, 5.0).gram_error() < 1e-10


def test_rotation_acts_diagonally_with_half_integral_phase():
    theta = 1.0
    o = omega_hermite(lift_rotation(theta), 10)
    d = np.diag(o)
    assert np.linalg.norm(o - np.diag(d)) < 1e-12
    assert np.allclose(np.abs(d), 1)
    ratios = d[1:] / d[:-1]
    assert np.allclose(ratios, ratios[0])
    assert abs(abs(np.angle(ratios[0])) - theta) < 1e-12
    assert abs(d[0] ** 2 - ratios[0]) < 1e-12


def test_grid_and_hermite_routes_agree():
    model = HermiteModel(16, 128, 5.0)
    for theta in (2.0, 3.0, 5.0):
        g = lift_rotation(theta)
        assert np.linalg.norm(omega_grid(g, model)[:8, :8] - omega_hermite(g, 16)[:8, :8]) < 1e-10


def test_grid_route_converges_for_small_angles():
    # small angles give a sharp chirp in the symbol; the grid must resolve it
    g = lift_rotation(0.7)
    errs = [np.linalg.norm(omega_grid(g, HermiteModel(16, n, e))[:8, :8] - omega_hermite(g, 16)[:8, :8])
            for n, e in ((128, 5.0), (256, 6.0), (512, 8.0))]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-8


@settings(max_examples=15, deadline=None)
@given(angles, angles)
def test_projective_multiplication(t1, t2):
    assert multiply_lifts_projectively(lift_rotation(t1), lift_rotation(t2), 16) < 1e-6


def test_two_lifts_differ_by_sign():
    g = lift_rotation(1.3).g
    a, b = lift(g)
    assert abs(a.xi + b.xi) < 1e-14
    assert abs(a.xi ** 2 - xi_squared(g)) < 1e-12


def test_central_characters():
    assert central_character_check(24) < 1e-12


def test_center_lifts_are_central_values():
    lifts = center_lifts(2)
    assert lifts[0].is_identity() and lifts[2].is_minus_identity()


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_center_section_matches_covering_predicate(m):
    # the centre of Sp_{2m} is the image of O_1, so both searches answer the same question
    assert center_section_exists(2 * m) == covering_splits(make_pair("O-Sp", 1, 2 * m))[0]


def test_o1_projectors_split_identity():
    pe, po = projector_O1(1, 16), projector_O1(-1, 16)
    # projector_O1 is d/2 times the projector with d = 2
    assert np.allclose(pe + po, np.eye(16))
    assert np.allclose(pe @ po, 0)
    assert np.allclose(pe @ pe, pe)


def test_o1_operator_identity_small_grid():
    rep = o1_operator_identity(1, HermiteModel(24, 128, 5.0))
    assert rep["operator_error"] < 1e-6
    assert abs(rep["odd_lag_value"] - 1) < 1e-12
    assert abs(rep["mu_coeff_recovered"] - 0.5) < 1e-12
    rep = o1_operator_identity(-1, HermiteModel(24, 128, 5.0))
    assert rep["operator_error"] < 1e-6
    assert abs(rep["mu_coeff_recovered"] + 0.5) < 1e-12


@pytest.mark.parametrize("k", [0, 1, 3])
def test_u1_projector_is_rank_one(k):
    p = projector_U1(k + 0.5, 16, 1, nodes=256)
    assert np.linalg.norm(p @ p - p) < 1e-10
    assert np.linalg.matrix_rank(p, 1e-6) == 1


def test_u1u1_fit_small():
    y, prof, _ = u1u1_oracle_profiles(kmax=1, cutoff=24, npts=128, extent=5.0, nodes=256)
    fit = fit_u1u1(y, prof)
    assert max(fit.residuals.values()) < 1e-3
    assert fit.shared_ok
    assert min(abs(fit.scale / math.pi - 1), abs(fit.scale / (2 * math.pi) - 1)) < 0.01


def test_odd_grid_rejected():
    with pytest.raises(ValueError):
        HermiteModel(8, 101, 5.0)
