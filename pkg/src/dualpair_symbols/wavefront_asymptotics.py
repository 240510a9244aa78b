"""Dilations, scaling limits, null fibres of the moment map, Fourier decay.

Conventions: M_t v = t v and (M_t^* u)(phi) = t^{-n} u(phi o M_{1/t}) on an
n-dimensional space.  A homogeneous distribution of degree k satisfies
M_t^* u = t^k u; delta has degree -n and Lebesgue measure degree 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Sequence

import numpy as np

from .cayley_geometry import PairRealization, lie_algebra_basis, quat_embed
from .kernel_functions import ExpPolyKernel, RationalPolynomial
from .pair_catalog import DualPair
from .symbol_assembly import O1_BASE, SymbolDensity, o1_pairing

RadialTest = Callable[[np.ndarray], np.ndarray]


# ---------------------------------------------------------------------------
# pullbacks
# ---------------------------------------------------------------------------

def pullback_scale(sym: SymbolDensity, t: float, phi: RadialTest) -> complex:
    """(M_t^* f)(phi) for the O_1 two-term symbol, by quadrature of phi o M_{1/t}.

    ``phi`` is radial, given as a function of |w|^2.
    """
    if sym.case != O1_BASE:
        raise ValueError("pullback_scale works on the structured O_1 symbol")
    n = sym.pair.dimW
    scaled = lambda r2: phi(r2 / t ** 2)
    return t ** (-n) * o1_pairing(sym, scaled, n, halfwidth=12.0 * max(t, 1.0))


def pullback_by_degrees(sym: SymbolDensity, t: float, phi: RadialTest) -> complex:
    """Same quantity assembled from the declared homogeneity degrees of each term."""
    n = sym.pair.dimW
    deg = sym.homogeneity()
    total = 0j
    if "delta" in deg:
        total += t ** deg["delta"] * complex(sym.delta_coeff) * complex(phi(np.zeros(1))[0])
    if "mu_W" in deg:
        only_mu = SymbolDensity(O1_BASE, sym.pair, (), sym.domain, delta_coeff=0.0, mu_coeff=sym.mu_coeff)
        total += t ** deg["mu_W"] * o1_pairing(only_mu, phi, n)
    return total


def pullback_sampled(points: np.ndarray, weights: np.ndarray, t: float, psi: Callable, dim: int) -> complex:
    """M_t^* of the measure sum_i weights_i delta_{points_i} on a dim-dimensional space."""
    return t ** (-dim) * complex(np.sum(weights * psi(points / t)))


def moment_flat(real: PairRealization, w: np.ndarray) -> np.ndarray:
    return real.moment_maps(w).tau_prime


def mtau_law_check(pair: DualPair, t: float, samples: int = 400, seed: int = 0) -> Dict[str, float]:
    """Both sides of t^{2 dim g'} M_{t^2}^* tau'_* u = t^{dim W} tau'_* M_t^* u on a Gaussian u.

    u is the standard Gaussian measure on W, represented by samples; psi is a
    Gaussian on g' in the Frobenius norm.  The left side pushes first and
    dilates on g', the right side dilates on W and then pushes.
    """
    rng = np.random.default_rng(seed)
    real = PairRealization(pair)
    ws = [real.random_w(rng) for _ in range(samples)]
    weights = np.full(samples, 1.0 / samples)
    dim_gp, dim_w = pair.dim_gprime, pair.dimW

    def psi(y):
        return np.exp(-np.sum(np.abs(y) ** 2, axis=(-2, -1)) / 4.0)

    pushed = np.array([moment_flat(real, w) for w in ws])
    lhs = t ** (2 * dim_gp) * pullback_sampled(pushed, weights, t ** 2, psi, dim_gp)

    def psi_after_tau(wpts):
        return psi(np.array([moment_flat(real, w) for w in wpts]))

    rhs = t ** dim_w * pullback_sampled(np.array(ws), weights, t, psi_after_tau, dim_w)
    return {"lhs": lhs.real, "rhs": rhs.real, "relative_error": abs(lhs - rhs) / abs(rhs)}


# ---------------------------------------------------------------------------
# scaling limits
# ---------------------------------------------------------------------------

@dataclass
class ScalingProbe:
    symbol: SymbolDensity
    phi: RadialTest
    ts: Sequence[float] = field(default_factory=lambda: [2.0 ** -k for k in range(1, 9)])
    degree: int = 0

    def __post_init__(self):
        ts = list(self.ts)
        if any(t <= 0 for t in ts) or any(b >= a for a, b in zip(ts, ts[1:])):
            raise ValueError("t-sequence must be positive and decreasing")


@dataclass
class ScalingResult:
    ts: List[float]
    values: List[complex]
    limit: complex
    errors: List[float]
    slope: float
    converged: bool


def _slope(ts: Sequence[float], errs: Sequence[float]) -> float:
    good = [(math.log(t), math.log(e)) for t, e in zip(ts, errs) if e > 0]
    if len(good) < 2:
        return float("inf")
    x, y = np.array(good).T
    return float(np.polyfit(x, y, 1)[0])


def scaling_limit(probe: ScalingProbe) -> ScalingResult:
    """t^deg (M_{1/t}^* f)(phi) along the t-sequence, compared with the mu_W term.

    The limit reported is the smooth mu_W part of the symbol paired with phi;
    the error slope on a log-log scale measures the decay of the remainder.
    """
    sym = probe.symbol
    vals = [t ** probe.degree * pullback_scale(sym, 1.0 / t, probe.phi) for t in probe.ts]
    only_mu = SymbolDensity(O1_BASE, sym.pair, (), sym.domain, delta_coeff=0.0, mu_coeff=sym.mu_coeff)
    limit = o1_pairing(only_mu, probe.phi, sym.pair.dimW)
    errs = [abs(v - limit) for v in vals]
    slope = _slope(probe.ts, errs)
    converged = errs[-1] < errs[0] or errs[-1] == 0
    return ScalingResult(list(probe.ts), vals, limit, errs, slope, converged)


def slice_zoom_limit(kernel: ExpPolyKernel, phi: Callable[[float], float], ts: Sequence[float],
                     side: int = 1) -> ScalingResult:
    """int_{side half-line} p(t y) phi(y) dy as t -> 0, against p(0 side) int phi.

    For p(y) = C e^{-beta y} on y > 0 the limit is C times the half-line measure.
    """
    from scipy import integrate

    poly = kernel.plus_poly if side > 0 else kernel.minus_poly
    p0 = kernel.prefactor * float(poly(0.0)) if not poly.is_zero() else 0.0
    lo, hi = (0.0, np.inf) if side > 0 else (-np.inf, 0.0)
    mass = integrate.quad(phi, lo, hi)[0]
    limit = p0 * mass
    vals = []
    for t in ts:
        vals.append(integrate.quad(lambda y: float(kernel(t * y)) * phi(y), lo, hi, limit=200)[0])
    errs = [abs(v - limit) for v in vals]
    return ScalingResult(list(ts), vals, limit, errs, _slope(ts, errs), errs[-1] < errs[0])


def degree_ordering(sym: SymbolDensity) -> bool:
    """The jet-type term must be more singular (lower degree) than the smooth term."""
    deg = sym.homogeneity()
    if "delta" in deg and "mu_W" in deg:
        return deg["delta"] < deg["mu_W"]
    return True


# ---------------------------------------------------------------------------
# the null fibre of the moment map
# ---------------------------------------------------------------------------

@dataclass
class OrbitDescriptor:
    pair: str
    equations: List[str]
    samples: int
    rank_histogram: Dict[int, int]
    max_rank: int
    rank_bound: int
    orbit_dimension: int
    dim_W: int
    degree: int
    square_zero_defect: float
    tau_defect: float
    forced_zero: bool

    def as_dict(self) -> dict:
        return {
            "pair": self.pair,
            "equations": self.equations,
            "samples": self.samples,
            "rank_histogram": {str(k): v for k, v in sorted(self.rank_histogram.items())},
            "max_rank": self.max_rank,
            "rank_bound": self.rank_bound,
            "orbit_dimension": self.orbit_dimension,
            "dim_W": self.dim_W,
            "degree": self.degree,
            "square_zero_defect": round(self.square_zero_defect, 12),
            "tau_defect": round(self.tau_defect, 12),
            "forced_zero": self.forced_zero,
        }


def _form_on_rows(real: PairRealization) -> np.ndarray:
    """M with tau(w) = Z M Z^*."""
    return real._adj


def isotropic_rows(real: PairRealization) -> np.ndarray:
    """Rows spanning a maximal isotropic subspace for the form defining tau."""
    pair = real.pair
    if pair.family == "O-Sp":
        rows = [np.eye(real.n1)[2 * j] for j in range(pair.dprime // 2)]
        return np.array(rows).reshape(len(rows), real.n1)
    if pair.family == "U-U":
        p, q = pair.signature
        rows = []
        for a in range(min(p, q)):
            v = np.zeros(real.n1, dtype=complex)
            v[a], v[p + a] = 1, 1
            rows.append(v)
        return np.array(rows, dtype=complex).reshape(len(rows), real.n1)
    # quaternionic: the form i*I on H^{d'} has isotropic quaternion lines e_a + j e_b
    dp = pair.dprime
    rows = []
    for a in range(dp // 2):
        z1 = np.zeros((1, dp), dtype=complex)
        z2 = np.zeros((1, dp), dtype=complex)
        z1[0, 2 * a] = 1
        z2[0, 2 * a + 1] = 1
        blk = quat_embed(z1, z2)
        rows.extend(blk)
    return np.array(rows, dtype=complex).reshape(len(rows), real.n1)


def _division_matrix_basis(real: PairRealization, n: int) -> List[np.ndarray]:
    alg = real.algebra
    out = []
    for a in range(n):
        for b in range(n):
            if alg == "R":
                e = np.zeros((n, n))
                e[a, b] = 1
                out.append(e)
            elif alg == "C":
                for u in (1, 1j):
                    e = np.zeros((n, n), dtype=complex)
                    e[a, b] = u
                    out.append(e)
            else:
                for u1, u2 in ((1, 0), (1j, 0), (0, 1), (0, 1j)):
                    z1 = np.zeros((n, n), dtype=complex)
                    z2 = np.zeros((n, n), dtype=complex)
                    z1[a, b], z2[a, b] = u1, u2
                    out.append(quat_embed(z1, z2))
    return out


def partner_algebra_basis(real: PairRealization) -> List[np.ndarray]:
    """X with X M + M X^* = 0 acting on rows, from X = -A M^{-1}, A Hermitian."""
    m = _form_on_rows(real)
    minv = np.linalg.inv(m)
    seen = []
    for e in _division_matrix_basis(real, real.pair.dprime):
        a = e + e.conj().T
        if np.allclose(a, 0):
            continue
        seen.append(-a @ minv)
    return seen


def _real_vec(z: np.ndarray) -> np.ndarray:
    return np.concatenate([np.real(z).ravel(), np.imag(z).ravel()])


def orbit_dimension(real: PairRealization, Z: np.ndarray, tol: float = 1e-8) -> int:
    """Real dimension of the G G' orbit through Z: rank of {x Z} + {Z X'}."""
    vecs = [_real_vec(x @ Z) for x in lie_algebra_basis(real.pair.compact_group, real.pair.d)]
    vecs += [_real_vec(Z @ x) for x in partner_algebra_basis(real)]
    if not vecs:
        return 0
    sv = np.linalg.svd(np.array(vecs), compute_uv=False)
    return int(np.sum(sv > tol * max(1.0, sv[0])))


def _random_partner_element(real: PairRealization, rng: np.random.Generator) -> np.ndarray:
    from scipy.linalg import expm

    basis = partner_algebra_basis(real)
    x = sum(rng.normal(scale=0.5) * b for b in basis)
    return expm(x)


def _matrix_rank(m: np.ndarray, algebra: str, tol: float = 1e-9) -> int:
    sv = np.linalg.svd(m, compute_uv=False)
    r = int(np.sum(sv > tol * max(1.0, sv[0] if sv.size else 1.0)))
    return r // 2 if algebra == "H" else r


def orbit_fiber_classify(pair: DualPair, samples: int = 200, seed: int = 0) -> OrbitDescriptor:
    """Monte-Carlo description of tau'(tau^{-1}(0)).

    Points of tau^{-1}(0) have rows in an isotropic subspace of the partner
    form: Z = C L g with L a maximal isotropic frame, C random and g a random
    element of G'.  Records the rank of tau'(w) over the division algebra.
    """
    if pair.d > 4 or pair.dprime > 4:
        raise ValueError("sampling is limited to d, d' <= 4")
    rng = np.random.default_rng(seed)
    real = PairRealization(pair)
    L = isotropic_rows(real)
    hist: Dict[int, int] = {}
    sq_defect = tau_defect = 0.0
    best_dim = 0
    forced = L.shape[0] == 0
    for _ in range(samples):
        if forced:
            Z = np.zeros((real.n0, real.n1), dtype=complex if real.algebra != "R" else float)
        else:
            k = L.shape[0]
            if real.algebra == "H":
                c1 = rng.normal(size=(pair.d, k // 2)) + 1j * rng.normal(size=(pair.d, k // 2))
                c2 = rng.normal(size=(pair.d, k // 2)) + 1j * rng.normal(size=(pair.d, k // 2))
                C = quat_embed(c1, c2)
            elif real.algebra == "C":
                C = rng.normal(size=(pair.d, k)) + 1j * rng.normal(size=(pair.d, k))
            else:
                C = rng.normal(size=(pair.d, k))
            Z = C @ L @ _random_partner_element(real, rng)
            if real.algebra == "R":
                Z = np.real(Z)
        w = real.odd(Z)
        mm = real.moment_maps(w)
        scale = max(1.0, float(np.max(np.abs(w))) ** 2)
        tau_defect = max(tau_defect, float(np.max(np.abs(mm.tau))) / scale)
        sq_defect = max(sq_defect, float(np.max(np.abs(mm.tau_prime @ mm.tau_prime))) / scale ** 2)
        r = _matrix_rank(mm.tau_prime, real.algebra)
        hist[r] = hist.get(r, 0) + 1
        best_dim = max(best_dim, orbit_dimension(real, Z))
    max_rank = max(hist)
    eqs = ["w^2 restricted to V0 = 0", f"rank tau'(w) <= {min(pair.d, pair.lprime)}", "tau'(w)^2 = 0"]
    return OrbitDescriptor(pair.label, eqs, samples, hist, max_rank, min(pair.d, pair.dprime),
                           best_dim, pair.dimW, best_dim - pair.dimW, sq_defect, tau_defect, forced)


# ---------------------------------------------------------------------------
# Fourier decay of piecewise kernels
# ---------------------------------------------------------------------------

def _piece_derivative(poly: RationalPolynomial, side: int) -> RationalPolynomial:
    """d/dxi of poly(xi) e^{-side*xi} is (poly' - side*poly) e^{-side*xi}."""
    return poly.derivative() - poly * side


@dataclass
class DecayReport:
    c: int
    ys: List[float]
    values: List[float]
    bounds: List[float]
    slope: float
    bound_ok: bool


def fourier_lemma_bound_check(kernel: ExpPolyKernel, ys: Sequence[float] = (10.0, 100.0)) -> DecayReport:
    """Transform of psi = plus(xi)e^{-xi} 1_{xi>0} + minus(xi)e^{xi} 1_{xi<0} against the bound.

    c is the number of leading derivatives of psi whose jumps at 0 vanish; the
    bound is min(1,|y|^{-c-1}) (|jump of psi^(c)| + ||psi^(c+1)||_1 + ||psi||_1).
    Transforms use oscillatory quadrature on each half-line.
    """
    from scipy import integrate

    if kernel.scale != 1.0:
        raise ValueError("use an unscaled kernel")
    plus, minus = kernel.plus_poly, kernel.minus_poly
    derivs = [(plus, minus)]
    for _ in range(12):
        p, m = derivs[-1]
        derivs.append((_piece_derivative(p, 1), _piece_derivative(m, -1)))

    def jump(k):
        p, m = derivs[k]
        return kernel.prefactor * (float(p(0.0)) - float(m(0.0)))

    c = 0
    while c < 10 and abs(jump(c)) < 1e-14:
        c += 1

    def l1(k):
        p, m = derivs[k]
        a = integrate.quad(lambda x: abs(float(p(x))) * math.exp(-x), 0, np.inf)[0]
        b = integrate.quad(lambda x: abs(float(m(-x))) * math.exp(-x), 0, np.inf)[0]
        return kernel.prefactor * (a + b)

    const = abs(jump(c)) + l1(c + 1) + l1(0)

    def transform(y):
        fp = lambda x: kernel.prefactor * float(plus(x)) * math.exp(-x)
        fm = lambda x: kernel.prefactor * float(minus(-x)) * math.exp(-x)
        # int_0^inf fp e^{-iyx} + int_0^inf fm e^{+iyx}
        cp = integrate.quad(fp, 0, np.inf, weight="cos", wvar=y)[0] if not plus.is_zero() else 0.0
        sp = integrate.quad(fp, 0, np.inf, weight="sin", wvar=y)[0] if not plus.is_zero() else 0.0
        cm = integrate.quad(fm, 0, np.inf, weight="cos", wvar=y)[0] if not minus.is_zero() else 0.0
        sm = integrate.quad(fm, 0, np.inf, weight="sin", wvar=y)[0] if not minus.is_zero() else 0.0
        return complex(cp + cm, -sp + sm)

    vals = [abs(transform(y)) for y in ys]
    bounds = [min(1.0, abs(y) ** (-c - 1)) * const for y in ys]
    slope = _slope(ys, vals)
    ok = all(v <= b * (1 + 1e-9) for v, b in zip(vals, bounds))
    return DecayReport(c, list(ys), vals, bounds, slope, ok)
