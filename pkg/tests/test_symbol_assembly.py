import math
from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import assume, given, settings, strategies as st
from scipy import integrate

from dualpair_symbols.kernel_functions import DeltaJet, ExpPolyKernel, P_ab, Q_poly, RationalPolynomial
from dualpair_symbols.pair_catalog import (HCParameter, IntegralityError, PairError, delta_jets_vanish,
                                           derivative_free, make_pair, parse_pair)
from dualpair_symbols.root_weyl import weyl_elements
from dualpair_symbols.symbol_assembly import (
    L_LE_LP, O1_BASE, O2L_SPECIAL, O2LP1_LARGE, O2LP1_SMALL, Domain, Factor, GridError,
    OrbitalSample, SymbolDensity, assemble, assemble_l_gt_lp, assemble_l_le_lp, assemble_special_O2l,
    assemble_special_O2lp1, central_phase, derivative_weights, fd_stencil, o1_base, o1_gaussian_pairing,
    o1_pairing, pair_with_orbital, skew_value, slice_domain, support_witness)


def _param(pair, values):
    return HCParameter.from_values(values).validate(pair)


def _half_line(f, side):
    lo, hi = (0.0, np.inf) if side > 0 else (-np.inf, 0.0)
    re = integrate.quad(lambda y: complex(f(y)).real, lo, hi, limit=200, epsabs=1e-13)[0]
    im = integrate.quad(lambda y: complex(f(y)).imag, lo, hi, limit=200, epsabs=1e-13)[0]
    return re + 1j * im


# ---------------------------------------------------------------------------
# case construction
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("k", range(6))
def test_u1u1_factor_exponents_and_degree(k):
    pair = parse_pair("U-U:1,1,1,0")
    sym = assemble_l_le_lp(pair, _param(pair, [Fraction(2 * k + 1, 2)]))
    (f,) = sym.factors
    assert (f.a, f.b) == (-k, k + 1)
    assert f.kernel.plus_poly.degree == k
    assert f.kernel.minus_poly.is_zero()
    assert f.jet.is_zero()
    assert sym.domain.allows([1]) and not sym.domain.allows([-1])


def test_o1_routes_to_base_case():
    sym = assemble(make_pair("O-Sp", 1, 4))
    assert sym.case == O1_BASE
    assert sym.delta_coeff == 1 and sym.mu_coeff == pytest.approx(0.25)


def test_u1_u11_has_no_derivatives():
    pair = parse_pair("U-U:1,2,1,1")
    assert derivative_free(pair)
    for mu in (0, 1, -1):
        sym = assemble(pair, _param(pair, [mu]))
        assert max(sym.jet_degrees()) <= 0


pairs_small = st.one_of(
    st.builds(lambda d, m: make_pair("O-Sp", d, 2 * m), st.integers(2, 6), st.integers(1, 4)),
    st.builds(lambda d, pq: make_pair("U-U", d, sum(pq), pq), st.integers(1, 3),
              st.tuples(st.integers(0, 3), st.integers(0, 3)).filter(lambda pq: sum(pq) > 0)),
    st.builds(lambda d, dp: make_pair("Sp-Ostar", d, dp), st.integers(1, 3), st.integers(1, 4)),
)


def _some_parameter(pair, shifts):
    """A strictly decreasing parameter meeting the integrality condition."""
    for offset in (Fraction(0), Fraction(1, 2)):
        vals = []
        top = Fraction(0)
        for j, s in enumerate(reversed(shifts[:pair.l])):
            top = top + 1 + s if j else Fraction(s) - 2
            vals.append(top + offset)
        mu = HCParameter.from_values(list(reversed(vals)))
        try:
            return mu.validate(pair)
        except (IntegralityError, PairError):
            continue
    return None


@settings(max_examples=60)
@given(pairs_small, st.lists(st.integers(0, 2), min_size=4, max_size=4))
def test_derivative_count_law(pair, shifts):
    assume(0 < pair.l <= pair.lprime)
    mu = _some_parameter(pair, shifts)
    assume(mu is not None)
    sym = assemble_l_le_lp(pair, mu)
    order = 2 * pair.delta - 2
    expected = int(order) if order >= 0 else -1
    assert sym.jet_degrees() == [expected] * pair.l
    assert (not sym.has_delta_jets()) == delta_jets_vanish(pair)
    assert derivative_free(pair) == (max(sym.jet_degrees()) <= 0)


@given(st.integers(0, 3), st.integers(0, 3), st.integers(1, 3))
def test_unitary_domain_counts(p, q, l):
    assume(p + q > 0)
    pair = make_pair("U-U", l, p + q, (p, q))
    dom = slice_domain(pair, l)
    for signs in np.ndindex(*([2] * l)):
        pattern = [1 if s else -1 for s in signs]
        m = sum(1 for v in pattern if v > 0)
        assert dom.allows(pattern) == (max(l - q, 0) <= m <= min(p, l))


def test_non_unitary_domain_is_full():
    assert slice_domain(parse_pair("O-Sp:4,4"), 2).kind == "full"


# ---------------------------------------------------------------------------
# larger rank
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("spec,mu", [("O-Sp:5,2", ["5/2", "1/2"]), ("O-Sp:7,2", ["7/2", "3/2", "1/2"]),
                                     ("U-U:2,1,1,0", [1, 0]), ("U-U:3,2,2,0", [2, 1, 0]),
                                     ("U-U:3,1,1,0", ["5/2", "1/2", "-1/2"])])
def test_exact_divisibility(spec, mu):
    pair = parse_pair(spec)
    sym = assemble_l_gt_lp(pair, _param(pair, mu))
    assert not sym.zero
    assert sym.quotient.divisible
    assert sym.quotient.remainder.is_zero()


@pytest.mark.parametrize("spec,mu", [("O-Sp:7,4", ["7/2", "3/2", "1/2"]), ("Sp-Ostar:3,2", [5, 2, 1])])
def test_known_non_divisible_rank_two_partner(spec, mu):
    # the factor y_2 + y_1 of the partner root product does not divide the skew sum
    pair = parse_pair(spec)
    sym = assemble_l_gt_lp(pair, _param(pair, mu))
    assert not sym.quotient.divisible
    assert sym.quotient.leftover == [(1, 0, -1)]


def test_rank_one_partner_quotient_is_the_kernel():
    pair = parse_pair("U-U:2,1,1,0")
    sym = assemble_l_gt_lp(pair, _param(pair, [1, 0]))
    qd = sym.quotient
    assert len(qd.exponents) == 1
    (a, b), = qd.exponents[0]
    # mirrored orthant: the negative half-line piece of P_{a,b}
    ref = P_ab(a, b)
    for y in (-0.3, -1.0, -2.5):
        want = float(ref.minus_poly(pair.beta_form * y)) * math.exp(-pair.beta_form * abs(y))
        assert abs(sym.smooth_value([y]) / sym.total_factor() - want) < 1e-12


def test_unmatched_parameter_gives_zero_symbol():
    pair = parse_pair("O-Sp:5,2")
    sym = assemble_l_gt_lp(pair, _param(pair, ["7/2", "3/2"]))
    assert sym.zero and sym.is_zero()
    assert pair_with_orbital(sym, lambda y: np.exp(-y * y)) == 0


@settings(max_examples=20)
@given(st.sampled_from([("U-U:3,2,2,0", [2, 1, 0]), ("O-Sp:7,4", ["7/2", "3/2", "1/2"]),
                        ("Sp-Ostar:3,2", [5, 2, 1])]),
       st.lists(st.floats(0.1, 3.0), min_size=2, max_size=2))
def test_quotient_invariant_under_permutations(case, y):
    spec, mu = case
    pair = parse_pair(spec)
    sym = assemble_l_gt_lp(pair, _param(pair, mu))
    qd = sym.quotient
    assume(abs(y[0] - y[1]) > 1e-3)
    signed = [v * s for v, s in zip(y, qd.signs)]
    base = skew_value(qd, signed)
    for w in weyl_elements("A", 2):
        moved = w.act(signed)
        assert abs(skew_value(qd, moved) - base) < 1e-9 * max(1.0, abs(base))


def test_compact_partner_flag():
    assert assemble_l_gt_lp(parse_pair("U-U:2,1,1,0"), [1, 0]).gaussian
    sym = assemble_l_gt_lp(parse_pair("O-Sp:5,2"), [Fraction(5, 2), Fraction(1, 2)])
    assert not sym.gaussian


# ---------------------------------------------------------------------------
# special orthogonal cases
# ---------------------------------------------------------------------------

def test_o2_sp4_special_prefactor_and_inner():
    pair = parse_pair("O-Sp:2,4")
    for sign in (1, -1):
        sym = assemble_special_O2l(pair, [0], sign)
        assert sym.case == O2L_SPECIAL
        assert sym.prefactor == pytest.approx(sign * (0.5j) ** 2)
        assert sym.inner.case == O1_BASE
        assert sym.inner.pair == make_pair("O-Sp", 1, 4)


def test_o4_special_reduces_to_odd_case():
    sym = assemble_special_O2l(parse_pair("O-Sp:4,4"), [1, 0])
    assert sym.inner.case == O2LP1_SMALL
    assert sym.inner.pair == make_pair("O-Sp", 3, 4)
    assert sym.inner.mu == (Fraction(3, 2),)


@pytest.mark.parametrize("spec,lam", [("O-Sp:2,2", [0]), ("O-Sp:4,2", [0, 0]), ("O-Sp:4,4", [1, 1]),
                                      ("O-Sp:3,2", [0]), ("O-Sp:4,4", [1])])
def test_special_even_rejections(spec, lam):
    with pytest.raises(PairError):
        assemble_special_O2l(parse_pair(spec), lam)


def test_o2_sp2_trivial_factor_two():
    pair = parse_pair("O-Sp:2,2")
    sym = assemble_l_le_lp(pair, [0])
    assert sym.prefactor == 2


def test_odd_special_cases():
    small = assemble_special_O2lp1(parse_pair("O-Sp:3,2"), [Fraction(3, 2)])
    assert small.case == O2LP1_SMALL and small.extra_derivatives
    assert [(f.a, f.b) for f in small.factors] == [(-1, 2)]
    large = assemble_special_O2lp1(parse_pair("O-Sp:5,2"), [Fraction(5, 2), Fraction(1, 2)])
    assert large.case == O2LP1_LARGE and large.nvars == 1
    assert [(f.a, f.b) for f in large.factors] == [(-1, 4)]
    assert all(f.jet.is_zero() for f in large.factors)


def test_rank_order_errors():
    with pytest.raises(PairError):
        assemble_l_le_lp(parse_pair("O-Sp:5,2"), [Fraction(5, 2), Fraction(1, 2)])
    with pytest.raises(PairError):
        assemble_l_gt_lp(parse_pair("O-Sp:3,2"), [Fraction(3, 2)])


# ---------------------------------------------------------------------------
# pairing
# ---------------------------------------------------------------------------

def test_pairing_without_jets_against_quadrature():
    pair = parse_pair("U-U:1,1,1,0")
    sym = assemble_l_le_lp(pair, [Fraction(5, 2)])
    F = lambda y: np.exp(-y * y)
    ref = sym.total_factor() * _half_line(lambda y: complex(sym.factors[0].kernel(y)) * math.exp(-y * y), 1)
    assert abs(pair_with_orbital(sym, F) - ref) < 1e-8 * abs(ref)


def test_pairing_product_of_gaussians():
    pair = parse_pair("U-U:2,2,2,0")
    sym = assemble_l_le_lp(pair, [Fraction(3, 2), Fraction(1, 2)])
    assert not sym.has_delta_jets()
    F = lambda y1, y2: np.exp(-y1 * y1 - 2 * y2 * y2)
    one = [_half_line(lambda y, f=f, c=c: complex(f.kernel(y)) * math.exp(-c * y * y), 1)
           for f, c in zip(sym.factors, (1, 2))]
    ref = sym.total_factor() * one[0] * one[1]
    got = pair_with_orbital(sym, OrbitalSample.tabulate(F, 2, halfwidth=6.0, n=400))
    assert abs(got - ref) < 1e-6 * abs(ref)


def test_jet_only_pairing_is_exact_on_polynomials():
    y = sp.Symbol("y")
    poly_expr = 1 + 2 * y - 3 * y ** 2 + y ** 3 / 2
    q = Q_poly(-3, 1)  # degree 2
    jet = DeltaJet(q, prefactor=0.7, argument_scale=0.5)
    zero = ExpPolyKernel(RationalPolynomial(), RationalPolynomial())
    sym = SymbolDensity(L_LE_LP, parse_pair("U-U:1,1,1,0"), (), Domain("full", 1), [Factor(-3, 1, zero, jet)])
    expected = 0.7 * sum(float(c) * 0.5 ** n * float(sp.diff(poly_expr, y, n).subs(y, 0))
                         for n, c in enumerate(q.coeffs))
    F = sp.lambdify(y, poly_expr, "numpy")
    got = pair_with_orbital(sym, OrbitalSample.tabulate(F, 1, halfwidth=2.0, n=40))
    assert abs(got - expected) < 1e-9


def test_pairing_with_jets_against_quadrature():
    pair = parse_pair("U-U:1,3,3,0")
    assert pair.delta == Fraction(3, 2)
    sym = assemble_l_le_lp(pair, [Fraction(5, 2)])
    (f,) = sym.factors
    assert f.jet.order == 1 and not f.kernel.is_zero()
    y = sp.Symbol("y")
    expr = sp.exp(-(y - sp.Rational(1, 3)) ** 2)
    F = sp.lambdify(y, expr, "numpy")
    beta = pair.beta_form
    jet = (2 * math.pi / beta) * sum(float(c) * beta ** (-n) * float(sp.diff(expr, y, n).subs(y, 0))
                                     for n, c in enumerate(f.jet.q.coeffs))
    smooth = _half_line(lambda t: complex(f.kernel(t)) * F(t), 1)
    ref = sym.total_factor() * (smooth + jet)
    got = pair_with_orbital(sym, F)
    assert abs(got - ref) < 1e-7 * abs(ref)


def test_extra_derivative_pairing():
    pair = parse_pair("O-Sp:3,2")
    sym = assemble_special_O2lp1(pair, [Fraction(3, 2)])
    (f,) = sym.factors
    F = lambda t: np.exp(-(t - 0.2) ** 2)
    dF = lambda t: -2 * (t - 0.2) * np.exp(-(t - 0.2) ** 2)
    ref = sym.total_factor() * (_half_line(lambda t: complex(f.kernel(t)) * dF(t), 1)
                                + _half_line(lambda t: complex(f.kernel(t)) * dF(t), -1))
    assert abs(pair_with_orbital(sym, F) - ref) < 1e-8 * abs(ref)


def test_special_pairing_scales_inner():
    pair = parse_pair("O-Sp:4,4")
    sym = assemble_special_O2l(pair, [1, 0], sign=-1)
    F = lambda t: np.exp(-t * t)
    assert abs(pair_with_orbital(sym, F) - sym.prefactor * pair_with_orbital(sym.inner, F)) < 1e-14


def test_larger_rank_pairing_against_quadrature():
    pair = parse_pair("O-Sp:5,2")
    sym = assemble_l_gt_lp(pair, [Fraction(5, 2), Fraction(1, 2)])
    F = lambda t: np.exp(-t * t)
    ref = _half_line(lambda t: sym.smooth_value([t]) * F(t), 1)
    assert abs(pair_with_orbital(sym, F) - ref) < 1e-8 * abs(ref)


def test_zero_test_function_gives_zero():
    pair = parse_pair("U-U:1,3,3,0")
    sym = assemble_l_le_lp(pair, [Fraction(5, 2)])
    assert pair_with_orbital(sym, lambda y: np.zeros_like(y)) == 0


def test_coarse_grid_rejected():
    sample = OrbitalSample.tabulate(lambda y: np.exp(-y * y), 1, halfwidth=1.0, n=4)
    with pytest.raises(GridError):
        derivative_weights(10, sample)


def test_fd_stencil_exact_on_monomials():
    w = fd_stencil(2, 3)
    for p in range(7):
        got = sum(c * Fraction(k) ** p for k, c in zip(range(-3, 4), w))
        assert got == (2 if p == 2 else 0)


def test_sample_dimension_mismatch():
    sym = assemble_l_le_lp(parse_pair("U-U:1,1,1,0"), [Fraction(1, 2)])
    with pytest.raises(PairError):
        pair_with_orbital(sym, OrbitalSample.tabulate(lambda a, b: a * b, 2, n=8))


# ---------------------------------------------------------------------------
# O_1 base case
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("dprime", [2, 4, 6])
@pytest.mark.parametrize("parity", [1, -1])
def test_o1_gaussian_pairing(dprime, parity):
    pair = make_pair("O-Sp", 1, dprime)
    sym = o1_base(pair, parity)
    expected = 1 + parity * 2.0 ** (-pair.dimW / 2)
    assert abs(o1_gaussian_pairing(sym) - expected) < 1e-15
    got = o1_pairing(sym, lambda r2: np.exp(-math.pi * r2), pair.dimW)
    assert abs(got - expected) < 1e-10


def test_o1_homogeneity_degrees():
    sym = o1_base(make_pair("O-Sp", 1, 4))
    assert sym.homogeneity() == {"delta": -4, "mu_W": 0}


def test_o1_pairing_rejects_slice_route():
    with pytest.raises(PairError):
        pair_with_orbital(o1_base(make_pair("O-Sp", 1, 2)), lambda: 1.0)


# ---------------------------------------------------------------------------
# support
# ---------------------------------------------------------------------------

def test_support_witnesses():
    w = support_witness(o1_base(make_pair("O-Sp", 1, 2)))
    assert w is not None and any(w)
    sym = assemble_l_le_lp(parse_pair("U-U:1,1,1,0"), [Fraction(1, 2)])
    y = support_witness(sym)
    assert y is not None and y[0] > 0 and abs(sym.smooth_value(y)) > 0
    big = assemble_l_gt_lp(parse_pair("U-U:3,2,2,0"), [2, 1, 0])
    y = support_witness(big)
    assert y is not None and abs(big.smooth_value(y)) > 0


def test_central_phase():
    assert central_phase([Fraction(1, 2)]) == pytest.approx(-1j)


def test_summary_is_serializable():
    import json
    sym = assemble_l_gt_lp(parse_pair("O-Sp:7,4"), [Fraction(7, 2), Fraction(3, 2), Fraction(1, 2)])
    data = json.loads(json.dumps(sym.summary()))
    assert data["divisible"] is False
    assert data["non_dividing_factors"] == [[1, 0, -1]]
