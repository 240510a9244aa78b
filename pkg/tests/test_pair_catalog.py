from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from dualpair_symbols.pair_catalog import (
    HCParameter, IntegralityError, PairError, covering_splits, covering_splits_by_search, delta_jets_vanish,
    derivative_free, kernel_exponents, make_pair, parse_pair, rho_vector)

pair_specs = st.one_of(
    st.builds(lambda d, m: make_pair("O-Sp", d, 2 * m), st.integers(1, 8), st.integers(1, 4)),
    st.builds(lambda d, p, q: make_pair("U-U", d, p + q, (p, q)), st.integers(1, 6), st.integers(0, 4),
              st.integers(1, 4)),
    st.builds(lambda d, dp: make_pair("Sp-Ostar", d, dp), st.integers(1, 5), st.integers(1, 5)),
)


def test_o3_sp2_constants():
    pair = make_pair("O-Sp", 3, 2)
    assert pair.r == 2
    assert pair.delta == Fraction(1, 2)
    assert pair.dimW == 6


@given(pair_specs)
def test_r_is_twice_dim_g_over_dim_v(pair):
    # r = 2 dim_R(g) / dim_R(V) with V = D^d
    assert pair.r == Fraction(2 * pair.dim_g, pair.algebra.real_dim * pair.d)


@given(pair_specs)
def test_rho_is_half_sum_of_positive_roots(pair):
    from dualpair_symbols.root_weyl import RootSystem

    rs = RootSystem(pair.compact_group, pair.d)
    half = [sum(Fraction(a[j]) for a in rs.positive) / 2 for j in range(rs.l)]
    assert tuple(half) == rho_vector(pair.compact_group, pair.d)


@given(pair_specs)
def test_exponent_sum_is_two_minus_two_delta(pair):
    rho = pair.rho
    mu = HCParameter.from_values(rho)
    try:
        mu.validate(pair)
    except IntegralityError:
        return
    for a, b in kernel_exponents(pair, mu):
        assert a + b == 2 - 2 * pair.delta


@given(pair_specs)
def test_jets_vanish_iff_delta_small(pair):
    assert delta_jets_vanish(pair) == (pair.delta <= Fraction(1, 2))


@given(pair_specs)
def test_derivative_free_only_for_small_rank(pair):
    if pair.l > pair.lprime:
        with pytest.raises(PairError):
            derivative_free(pair)
    else:
        assert derivative_free(pair) == (pair.delta <= 1)


@given(pair_specs)
def test_covering_predicate_two_routes(pair):
    assert covering_splits(pair)[0] == covering_splits_by_search(pair)


@pytest.mark.parametrize("spec,splits", [
    ("O-Sp:1,2", False), ("O-Sp:3,4", True), ("O-Sp:4,2", False),
    ("U-U:1,1,1,0", False), ("U-U:2,2,1,1", True), ("U-U:3,3,2,1", False),
    ("Sp-Ostar:1,1", True), ("Sp-Ostar:2,3", True), ("U-U:4,4,4,0", True),
])
def test_covering_truth_table(spec, splits):
    pair = parse_pair(spec)
    assert covering_splits(pair)[0] is splits
    assert covering_splits_by_search(pair) is splits


def test_integrality_error_reports_index_and_value():
    pair = make_pair("O-Sp", 3, 2)
    with pytest.raises(IntegralityError) as exc:
        HCParameter.from_values([Fraction(1, 3)]).validate(pair)
    assert exc.value.index == 1
    assert exc.value.value == Fraction(1, 3) + Fraction(1, 2)


def test_non_decreasing_parameter_rejected():
    pair = make_pair("U-U", 2, 2, (2, 0))
    with pytest.raises(PairError):
        HCParameter.from_values([0, 1]).validate(pair)


def test_highest_weight_adds_rho():
    pair = make_pair("O-Sp", 5, 2)
    mu = HCParameter.from_highest_weight(pair, [1, 0])
    assert mu.mu == (Fraction(5, 2), Fraction(1, 2))


@pytest.mark.parametrize("spec", ["O-Sp:3", "U-U:1,2,1,0", "O-Sp:3,3", "X:1,1", "U-U:1,1", "O-Sp:a,b"])
def test_malformed_specs(spec):
    with pytest.raises(PairError):
        parse_pair(spec)


def test_signature_only_for_unitary():
    with pytest.raises(PairError):
        make_pair("O-Sp", 2, 2, (1, 1))
