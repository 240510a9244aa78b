from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dualpair_symbols.pair_catalog import lie_algebra_dim
from dualpair_symbols.root_weyl import (
    RootSystem, TorusPoint, pi_gh, pi_gh_linear_factors, pi_gh_real_part, skew_sum, weyl_character,
    weyl_dimension, weyl_elements, weyl_order)

GROUPS = [("O", 3), ("O", 4), ("O", 5), ("O", 6), ("U", 2), ("U", 3), ("Sp", 1), ("Sp", 2), ("Sp", 3)]


@pytest.mark.parametrize("group,d", GROUPS)
def test_root_count_matches_dimension(group, d):
    rs = RootSystem(group, d)
    rank = rs.l if group != "U" else d
    assert 2 * rs.m + rank == lie_algebra_dim(group, d)


@pytest.mark.parametrize("group,d", GROUPS)
def test_enumeration_size(group, d):
    rs = RootSystem(group, d)
    assert sum(1 for _ in weyl_elements(rs.rtype, rs.l)) == weyl_order(rs.rtype, rs.l)


@pytest.mark.parametrize("group,d,lam,dim", [
    ("O", 3, (1,), 3), ("O", 5, (1, 0), 5), ("O", 6, (1, 0, 0), 6), ("O", 5, (1, 1), 10),
    ("U", 3, (1, 0, 0), 3), ("U", 3, (1, 0, -1), 8), ("Sp", 2, (1, 0), 4), ("Sp", 3, (1, 0, 0), 6),
    ("Sp", 2, (2, 0), 10),
])
def test_classical_dimensions(group, d, lam, dim):
    # vector, adjoint and symmetric-square representations
    rs = RootSystem(group, d)
    mu = tuple(Fraction(x) + r for x, r in zip(lam, rs.rho))
    assert weyl_dimension(rs, mu) == dim


def _character_at_identity(rs, mu):
    base = (1 + np.arange(rs.l)) / rs.l
    c1, c2, c4 = (weyl_character(rs, mu, TorusPoint.from_angles(h * base)) for h in (0.025, 0.05, 0.1))
    return (8 * c1 - 6 * c2 + c4) / 3


@pytest.mark.parametrize("group,d,lam", [("O", 5, (2, 1)), ("U", 3, (2, 1, 0)), ("Sp", 2, (2, 1)),
                                         ("O", 3, (2,))])
def test_dimension_two_routes(group, d, lam):
    rs = RootSystem(group, d)
    mu = tuple(Fraction(x) + r for x, r in zip(lam, rs.rho))
    assert abs(_character_at_identity(rs, mu) - weyl_dimension(rs, mu)) < 1e-3 * weyl_dimension(rs, mu)


@settings(max_examples=25)
@given(st.sampled_from([("O", 5), ("U", 3), ("Sp", 2), ("O", 3)]),
       st.lists(st.floats(-3, 3), min_size=3, max_size=3))
def test_skew_sum_alternates(gd, angles):
    rs = RootSystem(*gd)
    mu = tuple(r + 1 for r in rs.rho)
    u = TorusPoint.from_angles(angles[:rs.l]).u
    base = skew_sum(rs, mu, u)
    for w in weyl_elements(rs.rtype, rs.l):
        assert abs(skew_sum(rs, mu, w.act_torus(u)) - w.sgn * base) < 1e-9 * max(1, abs(base))


@settings(max_examples=25)
@given(st.sampled_from([("O", 5), ("U", 3), ("Sp", 2), ("Sp", 3)]),
       st.lists(st.floats(-3, 3), min_size=3, max_size=3))
def test_character_is_weyl_invariant(gd, angles):
    rs = RootSystem(*gd)
    mu = tuple(r + 1 for r in rs.rho)
    h = TorusPoint.from_angles(angles[:rs.l])
    try:
        base = weyl_character(rs, mu, h, tol=1e-6)
    except ZeroDivisionError:
        return
    for w in list(weyl_elements(rs.rtype, rs.l))[:8]:
        moved = weyl_character(rs, mu, TorusPoint(w.act_torus(h.u)), tol=1e-6)
        assert abs(moved - base) < 1e-7 * max(1, abs(base))


def test_weyl_action_preserves_pairing():
    for w in weyl_elements("C", 2):
        mu, y = (Fraction(3), Fraction(1)), (Fraction(1, 2), Fraction(-2))
        assert sum(a * b for a, b in zip(w.act(mu), w.act(y))) == sum(a * b for a, b in zip(mu, y))


def test_compose_and_inverse():
    els = list(weyl_elements("B", 2))
    v = (Fraction(2), Fraction(5))
    for s in els:
        assert s.inverse().act(s.act(v)) == v
        for t in els[:3]:
            assert s.compose(t).act(v) == s.act(t.act(v))


@given(st.sampled_from("ABCD"), st.lists(st.integers(-4, 4), min_size=3, max_size=3))
def test_pi_product_and_polynomial_agree(rtype, ys):
    ys = [Fraction(v) for v in ys]
    const, poly = pi_gh_real_part(rtype, 3)
    assert abs(pi_gh(ys, rtype) - const * float(poly(ys))) < 1e-9


@given(st.sampled_from("ABCD"), st.lists(st.integers(-4, 4), min_size=3, max_size=3))
def test_linear_factors_multiply_to_polynomial(rtype, ys):
    const, poly = pi_gh_real_part(rtype, 3)
    prod = Fraction(1)
    for j, k, sign in pi_gh_linear_factors(rtype, 3):
        prod *= ys[j] if k < 0 else ys[j] - sign * ys[k]
    assert poly(ys) == prod


def test_singular_point_raises():
    rs = RootSystem("U", 2)
    with pytest.raises(ZeroDivisionError):
        weyl_character(rs, rs.rho, TorusPoint.from_angles([0.3, 0.3]), tol=1e-12)


def test_non_dominant_dimension_raises():
    with pytest.raises(ValueError):
        weyl_dimension(RootSystem("U", 2), (Fraction(0), Fraction(1)))
