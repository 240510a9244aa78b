"""Assembly of intertwining-distribution symbols on the Cartan slice.

A :class:`SymbolDensity` is a structured object: per-coordinate kernels and
delta jets (rank of the compact member at most that of its partner), an
exact quotient polynomial times an exponential (larger rank), a reduction
record (disconnected orthogonal groups), or the two-term O_1 distribution.
Each case fixes the density only up to a nonzero constant, so the
global constant is left symbolic and set to 1 here.
"""
from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .kernel_functions import (
    DeltaJet,
    ExpPolyKernel,
    MultiPolynomial,
    P_ab,
    P_ab2,
    Q_poly,
    R_ab,
    RationalPolynomial,
    frac_str,
)
from .pair_catalog import (
    DualPair,
    HCParameter,
    IntegralityError,
    PairError,
    as_fraction,
    kernel_exponents,
    make_pair,
    rho_vector,
)
from .root_weyl import pi_gh_linear_factors, pi_gh_real_part, weyl_elements

L_LE_LP = "L_LE_LP"
L_GT_LP = "L_GT_LP"
O2L_SPECIAL = "O2L_SPECIAL"
O2LP1_SMALL = "O2LP1_SMALL"
O2LP1_LARGE = "O2LP1_LARGE"
O1_BASE = "O1_BASE"
CASES = (L_LE_LP, L_GT_LP, O2L_SPECIAL, O2LP1_SMALL, O2LP1_LARGE, O1_BASE)


class GridError(ValueError):
    """The sampling grid cannot resolve the requested derivative order."""


# ---------------------------------------------------------------------------
# domain and data records
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Domain:
    """Integration domain in the Cartan coordinates y_1..y_n.

    ``full`` is all of R^n.  ``orthants`` keeps the sign vectors whose count of
    positive coordinates lies in [min_positive, max_positive].  ``orthant``
    is the single orthant with the given signs.
    """

    kind: str
    nvars: int
    min_positive: int = 0
    max_positive: int = 0
    signs: Tuple[int, ...] = ()

    def allows(self, pattern: Sequence[int]) -> bool:
        """Sign pattern entries are +1, -1, or 0 (a coordinate pinned at the origin)."""
        if self.kind == "full":
            return True
        if self.kind == "orthant":
            return all(p == 0 or p == s for p, s in zip(pattern, self.signs))
        pos = sum(1 for p in pattern if p > 0)
        free = sum(1 for p in pattern if p == 0)
        return pos <= self.max_positive and pos + free >= self.min_positive

    def contains(self, y: Sequence[float]) -> bool:
        return self.allows([int(np.sign(v)) for v in y])

    def describe(self) -> dict:
        out = {"kind": self.kind, "nvars": self.nvars}
        if self.kind == "orthants":
            out["positive_count"] = [self.min_positive, self.max_positive]
        if self.kind == "orthant":
            out["signs"] = list(self.signs)
        return out


def slice_domain(pair: DualPair, nvars: int) -> Domain:
    if pair.family != "U-U":
        return Domain("full", nvars)
    p, q = pair.signature
    return Domain("orthants", nvars, max(nvars - q, 0), min(p, nvars))


@dataclass(frozen=True)
class Factor:
    """One coordinate of a product density: smooth kernel plus delta jet."""

    a: int
    b: int
    kernel: ExpPolyKernel
    jet: DeltaJet


@dataclass
class QuotientData:
    """Exact skew-sum quotient on the orthant selected by ``signs``."""

    exponents: List[Tuple[Tuple[int, int], ...]]
    weyl_signs: List[int]
    numerator: MultiPolynomial
    quotient: MultiPolynomial
    remainder: MultiPolynomial
    signs: Tuple[int, ...]
    scale: float
    mu_prime: Tuple[Fraction, ...]
    denominator: MultiPolynomial
    partial: MultiPolynomial
    leftover: List[Tuple[int, int, int]]

    @property
    def divisible(self) -> bool:
        return self.remainder.is_zero()


@dataclass
class SymbolDensity:
    case: str
    pair: DualPair
    mu: Tuple[Fraction, ...]
    domain: Domain
    factors: List[Factor] = field(default_factory=list)
    phase: complex = 1.0
    prefactor: complex = 1.0
    quotient: Optional[QuotientData] = None
    inner: Optional["SymbolDensity"] = None
    extra_derivatives: bool = False
    delta_coeff: complex = 0.0
    mu_coeff: complex = 0.0
    gaussian: bool = False
    zero: bool = False
    notes: str = ""

    @property
    def nvars(self) -> int:
        return self.domain.nvars

    def is_zero(self) -> bool:
        if self.zero:
            return True
        if self.case == O1_BASE:
            return self.delta_coeff == 0 and self.mu_coeff == 0
        if self.inner is not None:
            return self.inner.is_zero() or self.prefactor == 0
        if self.case == L_GT_LP:
            return self.quotient is None or self.quotient.numerator.is_zero()
        return any(f.kernel.is_zero() and f.jet.is_zero() for f in self.factors)

    def jet_degrees(self) -> List[int]:
        """Degree of each delta-jet polynomial, -1 where the jet vanishes."""
        return [f.jet.order if not f.jet.is_zero() else -1 for f in self.factors]

    def has_delta_jets(self) -> bool:
        return any(not f.jet.is_zero() for f in self.factors)

    def total_factor(self) -> complex:
        return complex(self.phase) * complex(self.prefactor)

    def smooth_value(self, y: Sequence[float]) -> complex:
        """Value of the locally integrable part at a point of the slice."""
        if self.zero:
            return 0j
        if self.case == O1_BASE:
            return complex(self.mu_coeff)
        if self.inner is not None:
            return complex(self.prefactor) * self.inner.smooth_value(y)
        if self.case == L_GT_LP:
            return self.total_factor() * quotient_value(self.quotient, y)
        if not self.domain.contains(y):
            return 0j
        val = self.total_factor()
        for f, v in zip(self.factors, y):
            val *= complex(f.kernel(v))
        return val

    def homogeneity(self) -> Dict[str, int]:
        """Declared degree of each structured term under w -> t w on W."""
        if self.case != O1_BASE:
            return {}
        n = self.pair.dimW
        out = {}
        if self.delta_coeff:
            out["delta"] = -n
        if self.mu_coeff:
            out["mu_W"] = 0
        return out

    def summary(self) -> dict:
        out = {"case": self.case, "pair": self.pair.label, "mu": [frac_str(m) for m in self.mu],
               "domain": self.domain.describe()}
        if self.factors:
            out["exponents"] = [[f.a, f.b] for f in self.factors]
            out["kernels"] = [{
                "plus": f.kernel.plus_poly.as_strings(),
                "minus": f.kernel.minus_poly.as_strings(),
                "jet": f.jet.q.as_strings(),
                "scale": f.kernel.scale,
            } for f in self.factors]
        if self.quotient is not None:
            out["skew_exponents"] = [[list(p) for p in e] for e in self.quotient.exponents]
            out["divisible"] = self.quotient.divisible
            out["orthant"] = list(self.quotient.signs)
            out["non_dividing_factors"] = [list(f) for f in self.quotient.leftover]
            out["quotient_terms"] = {",".join(map(str, k)): frac_str(v)
                                     for k, v in sorted(self.quotient.quotient.terms.items())}
        if self.case == O1_BASE:
            out["delta_coeff"] = _cplx(self.delta_coeff)
            out["mu_coeff"] = _cplx(self.mu_coeff)
        if self.inner is not None:
            out["prefactor"] = _cplx(self.prefactor)
            out["inner"] = self.inner.summary()
        out["extra_derivatives"] = self.extra_derivatives
        out["zero"] = self.is_zero()
        return out


def _cplx(z) -> list:
    z = complex(z)
    return [round(z.real, 15), round(z.imag, 15)]


# ---------------------------------------------------------------------------
# the rank-at-most-partner case
# ---------------------------------------------------------------------------

def _factor(a: int, b: int, beta: float) -> Factor:
    kern = P_ab(a, b).with_scale(beta)
    jet = DeltaJet(Q_poly(a, b), prefactor=2 * math.pi / beta, argument_scale=1 / beta)
    return Factor(a, b, kern, jet)


def central_phase(mu: Sequence[Fraction]) -> complex:
    return cmath.exp(-1j * math.pi * float(sum(mu)))


def assemble_l_le_lp(pair: DualPair, mu: HCParameter | Sequence | None = None, parity: int = 1) -> SymbolDensity:
    if pair.l > pair.lprime:
        raise PairError(f"rank order: l={pair.l} > l'={pair.lprime}")
    if pair.l == 0:
        return o1_base(pair, parity)
    mu = _as_param(mu).validate(pair)
    beta = pair.beta_form
    factors = [_factor(a, b, beta) for a, b in kernel_exponents(pair, mu)]
    sym = SymbolDensity(L_LE_LP, pair, mu.mu, slice_domain(pair, pair.l), factors,
                        phase=central_phase(mu.mu))
    if pair.is_O2_Sp2 and mu.mu == (Fraction(0),):
        sym.prefactor = 2
        sym.notes = "trivial representation: both components folded into the identity component"
    return sym


def _as_param(mu) -> HCParameter:
    if isinstance(mu, HCParameter):
        return mu
    return HCParameter.from_values(mu or ())


# ---------------------------------------------------------------------------
# the rank-larger-than-partner case
# ---------------------------------------------------------------------------

def complement_rho(pair: DualPair) -> Tuple[Fraction, ...]:
    """rho of the isometry group of the part of the compact space not seen by the partner."""
    group = pair.compact_group
    per = 2 if pair.family == "O-Sp" else 1
    return rho_vector(group, pair.d - per * pair.lprime)


def split_parameter(pair: DualPair, mu: Sequence[Fraction]) -> Optional[Tuple[Fraction, ...]]:
    """Entries left after matching rho'' inside mu up to the Weyl group, or None."""
    rho2 = complement_rho(pair)
    signed = pair.compact_group != "U"
    remaining = list(mu)
    for target in rho2:
        hit = None
        for idx, m in enumerate(remaining):
            if m == target or (signed and -m == target):
                hit = idx
                break
        if hit is None:
            return None
        remaining.pop(hit)
    return tuple(remaining)


def _partner_weyl(pair: DualPair):
    rtype = pair.gprime_root_type
    for s in weyl_elements(rtype, pair.lprime):
        if rtype == "D" and int(np.prod(s.signs)) != 1:
            continue
        yield s


def skew_numerator(pair: DualPair, mu_prime: Sequence[Fraction], signs: Sequence[int] | None = None):
    """Exact sum_s sgn(s) prod_j P_{a_sj, b_sj}(xi_j) in the variables xi = beta*y.

    On coordinates with sign -1 the negative half-line piece is used.
    """
    lp = pair.lprime
    signs = tuple(signs) if signs is not None else (1,) * lp
    num = MultiPolynomial(lp)
    exps, sgns = [], []
    for s in _partner_weyl(pair):
        smu = s.act(mu_prime)
        pairs = []
        for j, m in enumerate(smu, start=1):
            a = m - pair.delta + 1
            b = -m - pair.delta + 1
            if a.denominator != 1 or b.denominator != 1:
                raise IntegralityError(j, m + pair.delta)
            pairs.append((int(a), int(b)))
        term = MultiPolynomial.const(lp, s.sgn)
        for j, (a, b) in enumerate(pairs):
            poly = P_ab2(a, b) if signs[j] > 0 else P_ab2(b, a).reflect()
            term = term * MultiPolynomial.from_univariate(lp, j, poly)
        num = num + term
        exps.append(tuple(pairs))
        sgns.append(s.sgn)
    return num, exps, sgns


def divide_by_pi(pair: DualPair, num: MultiPolynomial) -> Tuple[MultiPolynomial, MultiPolynomial]:
    """Exact division by the rational part of pi_{g'/h'}; returns (quotient, total remainder).

    The remainder is accumulated over the successive linear divisions, so it is
    zero exactly when the full product divides the numerator.
    """
    quot = num
    total_rem = MultiPolynomial(num.nvars)
    for j, k, sign in pi_gh_linear_factors(pair.gprime_root_type, pair.lprime):
        quot, rem = quot.divide_linear(j, k, sign)
        total_rem = total_rem + rem
    return quot, total_rem


def default_orthant(pair: DualPair) -> Tuple[int, ...]:
    """Orthant of the partner slice carrying the larger-rank density.

    The exponents there use +(s mu)_j where the smaller-rank case uses -mu_j,
    i.e. the mirror image y -> -y; for U_{p,q} the p positive coordinates of
    the smaller-rank slice therefore become negative here.
    """
    if pair.family == "U-U":
        p, q = pair.signature
        return (-1,) * p + (1,) * q
    return (1,) * pair.lprime


def assemble_l_gt_lp(pair: DualPair, mu: HCParameter | Sequence, signs: Sequence[int] | None = None) -> SymbolDensity:
    if pair.l <= pair.lprime:
        raise PairError(f"rank order: l={pair.l} <= l'={pair.lprime}")
    mu = _as_param(mu)
    mu.validate(pair)
    lp = pair.lprime
    signs = tuple(signs) if signs is not None else default_orthant(pair)
    domain = Domain("orthant", lp, signs=signs)
    mu_prime = split_parameter(pair, mu.mu)
    if mu_prime is None:
        return SymbolDensity(L_GT_LP, pair, mu.mu, domain, zero=True,
                             notes="parameter does not restrict to rho'' on the complement")
    num, exps, sgns = skew_numerator(pair, mu_prime, signs)
    quot, rem = divide_by_pi(pair, num)
    _, den = pi_gh_real_part(pair.gprime_root_type, lp)
    partial, leftover = partial_division(pair, num)
    qd = QuotientData(exps, sgns, num, quot, rem, signs, pair.beta_form, mu_prime, den, partial, leftover)
    return SymbolDensity(L_GT_LP, pair, mu.mu, domain, quotient=qd, gaussian=pair.gprime_compact)


def _linear_value(factor, xi):
    j, k, sign = factor
    return xi[j] if k < 0 else xi[j] - sign * xi[k]


def partial_division(pair: DualPair, num: MultiPolynomial):
    """Divide out every linear factor of pi_{g'/h'} that divides exactly; return (quotient, leftover factors)."""
    quot, leftover = num, []
    for fac in pi_gh_linear_factors(pair.gprime_root_type, pair.lprime):
        q, rem = quot.divide_linear(*fac)
        if rem.is_zero():
            quot = q
        else:
            leftover.append(fac)
    return quot, leftover


def _rational_quotient(qd: QuotientData, xi):
    """Exact quotient, with any non-dividing linear factors kept as a pointwise denominator."""
    if qd.divisible:
        return qd.quotient(xi)
    val = qd.partial(xi)
    for fac in qd.leftover:
        val = val / _linear_value(fac, xi)
    return val


def quotient_value(qd: QuotientData, y: Sequence[float]) -> complex:
    """quotient(beta*y) * exp(-beta * sum |y_j|) on the orthant, 0 off it."""
    if any(v * s <= 0 for v, s in zip(y, qd.signs)):
        return 0j
    xi = [qd.scale * float(v) for v in y]
    return complex(_rational_quotient(qd, xi)) * math.exp(-qd.scale * sum(abs(float(v)) for v in y))


def skew_value(qd: QuotientData, y: Sequence[float]) -> complex:
    """Numerator over the rational part of pi_{g'/h'}, evaluated pointwise (no division)."""
    xi = [qd.scale * float(v) for v in y]
    return complex(qd.numerator(xi)) / complex(qd.denominator(xi)) * math.exp(
        -qd.scale * sum(abs(float(v)) for v in y))


# ---------------------------------------------------------------------------
# disconnected orthogonal groups
# ---------------------------------------------------------------------------

def assemble_special_O2l(pair: DualPair, lam: Sequence, sign: int = 1) -> SymbolDensity:
    """Contribution of the non-identity component of O_{2l}; ``sign`` is the +-1 constant C(Pi)."""
    if pair.family != "O-Sp" or pair.d % 2:
        raise PairError("needs an even orthogonal group")
    l, lp = pair.l, pair.lprime
    if l > lp:
        raise PairError("the non-identity component contributes only when l <= l'")
    if (l, lp) == (1, 1):
        raise PairError("(O_2, Sp_2) is excluded; use the trivial-representation route")
    if sign not in (1, -1):
        raise PairError("C(Pi) must be +1 or -1")
    lam = tuple(as_fraction(v) for v in lam)
    if len(lam) != l or lam[-1] != 0:
        raise PairError("highest weight must have l entries with last entry 0")
    inner_pair = make_pair("O-Sp", pair.d - 1, pair.dprime)
    if l == 1:
        inner = o1_base(inner_pair, 1, component="identity")
    else:
        inner_mu = HCParameter.from_highest_weight(inner_pair, lam[:-1])
        inner = assemble_special_O2lp1(inner_pair, inner_mu)
    pref = sign * (0.5j) ** lp
    return SymbolDensity(O2L_SPECIAL, pair, tuple(lam), inner.domain, prefactor=pref, inner=inner)


def assemble_special_O2lp1(pair: DualPair, mu: HCParameter | Sequence) -> SymbolDensity:
    """Identity-component contribution for O_{2l+1}."""
    if pair.family != "O-Sp" or pair.d % 2 == 0:
        raise PairError("needs an odd orthogonal group")
    if pair.l < 1:
        raise PairError("needs l >= 1")
    mu = _as_param(mu).validate(pair)
    beta = pair.beta_form
    exps = kernel_exponents(pair, mu)
    if pair.l <= pair.lprime:
        factors = [_factor(a, b, beta) for a, b in exps]
        return SymbolDensity(O2LP1_SMALL, pair, mu.mu, Domain("full", pair.l), factors,
                             phase=central_phase(mu.mu), extra_derivatives=True)
    factors = []
    for a, b in exps[:pair.lprime]:
        factors.append(Factor(a, b, R_ab(a, b).with_scale(beta), DeltaJet(RationalPolynomial())))
    return SymbolDensity(O2LP1_LARGE, pair, mu.mu, Domain("full", pair.lprime), factors,
                         phase=central_phase(mu.mu))


# ---------------------------------------------------------------------------
# O_1
# ---------------------------------------------------------------------------

def o1_base(pair: DualPair, parity: int = 1, component: str = "full") -> SymbolDensity:
    """delta_W + parity * 2^{-dim W/2} mu_W; the identity component alone gives delta_W."""
    if pair.family != "O-Sp" or pair.d != 1:
        raise PairError("O_1 base case needs the pair (O_1, Sp)")
    if parity not in (1, -1):
        raise PairError("parity must be +1 or -1")
    mu_c = parity * 2.0 ** (-pair.dimW / 2) if component == "full" else 0.0
    return SymbolDensity(O1_BASE, pair, (), Domain("full", 0), delta_coeff=1.0, mu_coeff=mu_c,
                         notes=f"component={component}, parity={parity:+d}")


def o1_gaussian_pairing(sym: SymbolDensity) -> complex:
    """f(phi) for phi(w) = exp(-pi |w|^2): phi(0) = 1 and int phi = 1."""
    return complex(sym.delta_coeff) + complex(sym.mu_coeff)


# ---------------------------------------------------------------------------
# dispatcher
# ---------------------------------------------------------------------------

def assemble(pair: DualPair, mu: Sequence | HCParameter | None = None, parity: int = 1) -> SymbolDensity:
    """Identity-side (-G^0) symbol for any pair, choosing the case from the ranks."""
    if pair.l == 0:
        return o1_base(pair, parity)
    if pair.l <= pair.lprime:
        return assemble_l_le_lp(pair, mu)
    return assemble_l_gt_lp(pair, mu)


# ---------------------------------------------------------------------------
# pairing with orbital samples
# ---------------------------------------------------------------------------

@dataclass
class OrbitalSample:
    """Values of a function F on the tensor grid y_i = i*h, |i| <= n, in every coordinate."""

    values: np.ndarray
    h: float
    n: int

    @classmethod
    def tabulate(cls, func: Callable[..., np.ndarray], nvars: int, halfwidth: float = 6.0, n: int = 800):
        n += (-n) % 4
        h = halfwidth / n
        axis = np.arange(-n, n + 1) * h
        grids = np.meshgrid(*([axis] * nvars), indexing="ij") if nvars else []
        vals = np.asarray(func(*grids), dtype=complex) if nvars else np.asarray(func(), dtype=complex)
        return cls(vals, h, n)

    @property
    def axis(self) -> np.ndarray:
        return np.arange(-self.n, self.n + 1) * self.h

    @property
    def nvars(self) -> int:
        return self.values.ndim


def fd_stencil(order: int, halfwidth: int) -> List[Fraction]:
    """Exact central weights w_k, |k| <= halfwidth, with sum w_k f(kh) ~ h^order f^(order)(0)."""
    pts = list(range(-halfwidth, halfwidth + 1))
    size = len(pts)
    mat = [[Fraction(p) ** i for p in pts] for i in range(size)]
    rhs = [Fraction(math.factorial(order)) if i == order else Fraction(0) for i in range(size)]
    # Gaussian elimination over the rationals
    aug = [row + [r] for row, r in zip(mat, rhs)]
    for c in range(size):
        piv = next(r for r in range(c, size) if aug[r][c] != 0)
        aug[c], aug[piv] = aug[piv], aug[c]
        inv = 1 / aug[c][c]
        aug[c] = [v * inv for v in aug[c]]
        for r in range(size):
            if r != c and aug[r][c] != 0:
                fac = aug[r][c]
                aug[r] = [vr - fac * vc for vr, vc in zip(aug[r], aug[c])]
    return [aug[i][size] for i in range(size)]


def derivative_weights(order: int, sample: OrbitalSample, extra: int = 3) -> np.ndarray:
    """Weight vector on the axis that returns the order-th derivative at 0."""
    half = (order + 1) // 2 + extra
    if half > sample.n:
        raise GridError(f"grid of {2 * sample.n + 1} points cannot carry a derivative of order {order}")
    w = np.zeros(2 * sample.n + 1)
    for k, c in zip(range(-half, half + 1), fd_stencil(order, half)):
        w[sample.n + k] = float(c) / sample.h ** order
    return w


def _simpson_half(n: int, h: float) -> np.ndarray:
    """Composite Boole weights on n+1 nodes (Simpson with one Richardson step)."""
    if n % 4:
        raise GridError("half-line node count must be a multiple of 4")
    w = np.zeros(n + 1)
    for start in range(0, n, 4):
        w[start:start + 5] += (7.0, 32.0, 12.0, 32.0, 7.0)
    return w * 2 * h / 45


def derivative_matrix(sample: OrbitalSample, halfwidth: int = 3) -> np.ndarray:
    """Dense first-derivative operator on the axis: central inside, one-sided at the edges."""
    size = 2 * sample.n + 1
    mat = np.zeros((size, size))
    central = [float(c) for c in fd_stencil(1, halfwidth)]
    width = 2 * halfwidth + 1
    for i in range(size):
        lo = min(max(i - halfwidth, 0), size - width)
        offs = [Fraction(p - i) for p in range(lo, lo + width)]
        if lo == i - halfwidth:
            wts = central
        else:
            wts = [float(c) for c in _stencil_at(offs, 1)]
        mat[i, lo:lo + width] = np.asarray(wts) / sample.h
    return mat


def _stencil_at(offs: Sequence[Fraction], order: int) -> List[Fraction]:
    size = len(offs)
    aug = [[o ** i for o in offs] + [Fraction(math.factorial(order)) if i == order else Fraction(0)]
           for i in range(size)]
    for c in range(size):
        piv = next(r for r in range(c, size) if aug[r][c] != 0)
        aug[c], aug[piv] = aug[piv], aug[c]
        inv = 1 / aug[c][c]
        aug[c] = [v * inv for v in aug[c]]
        for r in range(size):
            if r != c and aug[r][c] != 0:
                fac = aug[r][c]
                aug[r] = [vr - fac * vc for vr, vc in zip(aug[r], aug[c])]
    return [aug[i][size] for i in range(size)]


def axis_weights(factor: Factor, sample: OrbitalSample, derivative: bool = False) -> Dict[int, np.ndarray]:
    """Per-sign linear functionals {+1: plus side, -1: minus side, 0: jet at the origin}.

    With ``derivative`` the functionals act on dF/dy instead of F.
    """
    n, h = sample.n, sample.h
    axis = sample.axis
    simpson = _simpson_half(n, h)
    kern = factor.kernel
    s = kern.scale * axis
    out = {}
    plus = np.zeros(2 * n + 1)
    minus = np.zeros(2 * n + 1)
    if not kern.plus_poly.is_zero():
        vals = kern.prefactor * kern.plus_poly(s[n:]) * np.exp(-s[n:])
        plus[n:] = vals * simpson
    if not kern.minus_poly.is_zero():
        vals = kern.prefactor * kern.minus_poly(s[:n + 1]) * np.exp(s[:n + 1])
        minus[:n + 1] = vals * simpson[::-1]
    jet = np.zeros(2 * n + 1)
    shift = 1 if derivative else 0
    if not factor.jet.is_zero():
        for k, c in enumerate(factor.jet.q.coeffs):
            if c:
                jet += float(c) * factor.jet.argument_scale ** k * derivative_weights(k + shift, sample)
        jet *= factor.jet.prefactor
    if derivative:
        dmat = derivative_matrix(sample)
        plus, minus = dmat.T @ plus, dmat.T @ minus
    out[1], out[-1], out[0] = plus, minus, jet
    return out


def _contract(values: np.ndarray, vectors: Sequence[np.ndarray]) -> complex:
    acc = values
    for v in vectors:
        acc = np.tensordot(acc, v, axes=([0], [0]))
    return complex(acc)


def pair_with_orbital(sym: SymbolDensity, F: OrbitalSample | Callable) -> complex:
    """Pair the symbol with a sampled function on the slice.

    Product densities expand into sign patterns; each coordinate is either on
    a half-line (Simpson weights) or pinned at 0 (finite-difference jet).
    """
    if sym.is_zero():
        return 0j
    if sym.case == O1_BASE:
        raise PairError("the O_1 symbol lives on W; use o1_pairing")
    if sym.inner is not None:
        return complex(sym.prefactor) * pair_with_orbital(sym.inner, F)
    if not isinstance(F, OrbitalSample):
        F = OrbitalSample.tabulate(F, sym.nvars)
    if F.nvars != sym.nvars:
        raise PairError(f"sample has {F.nvars} variables, symbol needs {sym.nvars}")
    if sym.case == L_GT_LP:
        return sym.total_factor() * _pair_quotient(sym.quotient, F)
    weights = [axis_weights(f, F, sym.extra_derivatives) for f in sym.factors]
    total = 0j
    for pattern in itertools.product((1, -1, 0), repeat=sym.nvars):
        if not sym.domain.allows(pattern):
            continue
        vecs = [w[p] for w, p in zip(weights, pattern)]
        if any(not v.any() for v in vecs):
            continue
        total += _contract(F.values, vecs)
    return sym.total_factor() * total


def _pair_quotient(qd: QuotientData, F: OrbitalSample) -> complex:
    n, h = F.n, F.h
    simpson = _simpson_half(n, h)
    axis = F.axis
    lp = F.nvars
    sl = []
    for s in qd.signs:
        sl.append(slice(n, None) if s > 0 else slice(None, n + 1))
    sub = F.values[tuple(sl)]
    half = [axis[n:] if s > 0 else axis[:n + 1] for s in qd.signs]
    wts = [simpson if s > 0 else simpson[::-1] for s in qd.signs]
    grids = np.meshgrid(*half, indexing="ij")
    xi = [qd.scale * g for g in grids]
    qv = np.asarray(_rational_quotient(qd, xi), dtype=complex) * np.exp(-qd.scale * sum(np.abs(g) for g in grids))
    if np.ndim(qv) == 0:
        qv = np.full(grids[0].shape, complex(qv))
    vals = sub * qv
    return _contract(vals, wts) if lp else complex(vals)


def o1_pairing(sym: SymbolDensity, phi: Callable[[np.ndarray], np.ndarray], dimW: int,
               halfwidth: float = 8.0, n: int = 64) -> complex:
    """delta_coeff * phi(0) + mu_coeff * int_W phi for a radial phi(|w|^2)."""
    from scipy import integrate, special

    val0 = complex(phi(np.zeros(1))[0])
    radial = integrate.quad(lambda r: float(np.real(phi(np.array([r * r]))[0])) * r ** (dimW - 1), 0, halfwidth,
                            limit=200)[0]
    sphere = 2 * math.pi ** (dimW / 2) / special.gamma(dimW / 2)
    return complex(sym.delta_coeff) * val0 + complex(sym.mu_coeff) * sphere * radial


# ---------------------------------------------------------------------------
# support
# ---------------------------------------------------------------------------

def support_witness(sym: SymbolDensity, rng: np.random.Generator | None = None, tries: int = 200):
    """A regular point y != 0 of the domain where the smooth part is nonzero, or None."""
    if sym.case == O1_BASE:
        if sym.mu_coeff:
            w = np.zeros(sym.pair.dimW)
            w[0] = 1.0
            return tuple(w)
        return None
    rng = rng or np.random.default_rng(0)
    inner = sym
    while inner.inner is not None:
        inner = inner.inner
    if inner.case == O1_BASE:
        return support_witness(inner, rng, tries)
    n = inner.nvars
    for t in range(tries):
        if inner.domain.kind == "orthant":
            y = np.abs(rng.uniform(0.2, 2.0, n)) * np.asarray(inner.domain.signs)
        else:
            y = rng.uniform(-2.0, 2.0, n)
        if t == 0:
            y = np.linspace(1.0, 0.5, n) * (np.asarray(inner.domain.signs) if inner.domain.signs else 1)
        if not inner.domain.contains(y):
            continue
        if abs(sym.smooth_value(y)) > 1e-300:
            return tuple(float(v) for v in y)
    return None
