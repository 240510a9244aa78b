import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dualpair_symbols.kernel_functions import P_ab
from dualpair_symbols.pair_catalog import make_pair, parse_pair
from dualpair_symbols.symbol_assembly import o1_base
from dualpair_symbols.wavefront_asymptotics import (
    ScalingProbe, degree_ordering, fourier_lemma_bound_check, mtau_law_check, orbit_fiber_classify,
    pullback_by_degrees, pullback_scale, scaling_limit, slice_zoom_limit)


def gaussian(a):
    return lambda r2: np.exp(-math.pi * a * r2)


@pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
def test_o1_scaling_slope_is_two(a):
    res = scaling_limit(ScalingProbe(o1_base(make_pair("O-Sp", 1, 2)), gaussian(a)))
    assert abs(res.slope - 2.0) < 0.05
    assert res.converged
    # the limit is the mu_W term: (1/2) a^{-1} for the normalised Gaussian
    assert abs(res.limit - 0.5 / a) < 1e-10


@settings(max_examples=15, deadline=None)
@given(st.floats(0.05, 4.0), st.sampled_from([2, 4]), st.floats(0.3, 3.0))
def test_pullback_two_routes(t, dprime, a):
    sym = o1_base(make_pair("O-Sp", 1, dprime))
    q = pullback_scale(sym, t, gaussian(a))
    d = pullback_by_degrees(sym, t, gaussian(a))
    assert abs(q - d) < 1e-8 * max(1.0, abs(d))


def test_degree_ordering():
    assert degree_ordering(o1_base(make_pair("O-Sp", 1, 2)))


def test_probe_rejects_bad_sequences():
    sym = o1_base(make_pair("O-Sp", 1, 2))
    with pytest.raises(ValueError):
        ScalingProbe(sym, gaussian(1), ts=[0.5, 0.5])
    with pytest.raises(ValueError):
        ScalingProbe(sym, gaussian(1), ts=[0.25, 0.5])


@pytest.mark.parametrize("spec", ["O-Sp:3,2", "U-U:2,3,2,1", "Sp-Ostar:1,2"])
@pytest.mark.parametrize("t", [0.3, 1.7])
def test_moment_dilation_law(spec, t):
    rep = mtau_law_check(parse_pair(spec), t, samples=60)
    assert rep["relative_error"] < 1e-10


def test_slice_zoom_limit():
    kern = P_ab(1, 2)
    phi = lambda y: math.exp(-y * y)
    res = slice_zoom_limit(kern, phi, [2.0 ** -k for k in range(2, 8)])
    assert res.converged
    assert abs(res.limit - kern.prefactor * float(kern.plus_poly(0.0)) * math.sqrt(math.pi) / 2) < 1e-10
    assert res.slope > 0.8


@pytest.mark.parametrize("spec,orbit_dim,forced", [
    ("O-Sp:1,2", 2, False),     # nilpotent cone of sl_2
    ("O-Sp:3,2", 4, False),     # pairs of parallel vectors in R^3
    ("U-U:1,2,1,1", 3, False),  # null cone of a (1,1) hermitian form on C^2
    ("U-U:1,1,1,0", 0, True),   # compact partner: the fibre is {0}
    ("Sp-Ostar:1,1", 0, True),
])
def test_null_fibre_orbit_dimensions(spec, orbit_dim, forced):
    desc = orbit_fiber_classify(parse_pair(spec), samples=40)
    assert desc.orbit_dimension == orbit_dim
    assert desc.forced_zero is forced
    assert desc.degree == orbit_dim - desc.dim_W
    assert desc.max_rank <= desc.rank_bound
    assert desc.square_zero_defect < 1e-10 and desc.tau_defect < 1e-10


def test_fibre_sampling_is_seeded():
    a = orbit_fiber_classify(parse_pair("O-Sp:2,2"), samples=20, seed=3).as_dict()
    b = orbit_fiber_classify(parse_pair("O-Sp:2,2"), samples=20, seed=3).as_dict()
    assert a == b


def test_fibre_size_limit():
    with pytest.raises(ValueError):
        orbit_fiber_classify(parse_pair("O-Sp:5,2"))


@pytest.mark.parametrize("a,b", [(1, 1), (2, 1), (2, 3), (0, 2), (3, 3)])
def test_fourier_decay_matches_exponent_sum(a, b):
    # the transform is a multiple of (1+iy)^-a (1-iy)^-b, so it decays like |y|^-(a+b)
    rep = fourier_lemma_bound_check(P_ab(a, b))
    assert rep.c == a + b - 1
    assert abs(rep.slope + (a + b)) < 0.05
    assert rep.bound_ok


def test_decay_check_needs_unscaled_kernel():
    with pytest.raises(ValueError):
        fourier_lemma_bound_check(P_ab(1, 1).with_scale(2.0))
