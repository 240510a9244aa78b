"""Exact kernels P_{a,b,+-2}, P_{a,b}, Q_{a,b}, R_{a,b,2} and their transform identities.

Coefficients are ``Fraction``; floats appear only when a kernel is evaluated.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Sequence, Tuple

import numpy as np
from scipy import integrate

TWO_PI = 2 * math.pi


def rising(a: int, k: int) -> Fraction:
    """a(a+1)...(a+k-1), equal to 1 when k = 0."""
    out = Fraction(1)
    for i in range(k):
        out *= a + i
    return out


def frac_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


class RationalPolynomial:
    """Univariate polynomial with exact rational coefficients (ascending order)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        c = [Fraction(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs: Tuple[Fraction, ...] = tuple(c)

    @classmethod
    def x(cls) -> "RationalPolynomial":
        return cls((0, 1))

    @classmethod
    def const(cls, c) -> "RationalPolynomial":
        return cls((c,))

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def _coerce(self, other) -> "RationalPolynomial":
        if isinstance(other, RationalPolynomial):
            return other
        return RationalPolynomial((other,))

    def __add__(self, other):
        other = self._coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return RationalPolynomial(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self):
        return RationalPolynomial(-c for c in self.coeffs)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        if self.is_zero() or other.is_zero():
            return RationalPolynomial()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            if x:
                for j, y in enumerate(other.coeffs):
                    out[i + j] += x * y
        return RationalPolynomial(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        out = RationalPolynomial((1,))
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = RationalPolynomial((other,))
        if not isinstance(other, RationalPolynomial):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"RationalPolynomial({[frac_str(c) for c in self.coeffs]})"

    def __call__(self, x):
        """Horner evaluation; works for Fractions, floats, complex and numpy arrays."""
        if not self.coeffs:
            return 0 * x
        exact = isinstance(x, (int, Fraction))
        acc = 0 * x
        for c in reversed(self.coeffs):
            acc = acc * x + (c if exact else float(c))
        return acc

    def derivative(self) -> "RationalPolynomial":
        return RationalPolynomial(i * c for i, c in enumerate(self.coeffs) if i)

    def compose_linear(self, scale, shift=0) -> "RationalPolynomial":
        """p(scale * x + shift)."""
        lin = RationalPolynomial((shift, scale))
        out = RationalPolynomial()
        for c in reversed(self.coeffs):
            out = out * lin + c
        return out

    def reflect(self) -> "RationalPolynomial":
        return self.compose_linear(-1)

    def divmod(self, other: "RationalPolynomial"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        lead = other.coeffs[-1]
        quot = [Fraction(0)] * max(len(rem) - dq, 0)
        for i in range(len(rem) - dq - 1, -1, -1):
            c = rem[i + dq] / lead
            quot[i] = c
            if c:
                for j, oc in enumerate(other.coeffs):
                    rem[i + j] -= c * oc
        return RationalPolynomial(quot), RationalPolynomial(rem[:dq] if dq > 0 else [])

    def as_strings(self) -> list:
        return [frac_str(c) for c in self.coeffs]


class MultiPolynomial:
    """Sparse multivariate polynomial with Fraction coefficients.

    Terms map exponent tuples to coefficients.  Only what exact division by
    products of linear forms needs is provided.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Dict[Tuple[int, ...], Fraction] | None = None):
        self.nvars = nvars
        self.terms = {k: Fraction(v) for k, v in (terms or {}).items() if v != 0}

    @classmethod
    def variable(cls, nvars: int, j: int) -> "MultiPolynomial":
        e = [0] * nvars
        e[j] = 1
        return cls(nvars, {tuple(e): 1})

    @classmethod
    def const(cls, nvars: int, c) -> "MultiPolynomial":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def from_univariate(cls, nvars: int, j: int, p: RationalPolynomial) -> "MultiPolynomial":
        terms = {}
        for k, c in enumerate(p.coeffs):
            e = [0] * nvars
            e[j] = k
            terms[tuple(e)] = c
        return cls(nvars, terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other):
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return MultiPolynomial(self.nvars, out)

    def __neg__(self):
        return MultiPolynomial(self.nvars, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, MultiPolynomial):
            return MultiPolynomial(self.nvars, {k: v * other for k, v in self.terms.items()})
        out: Dict[Tuple[int, ...], Fraction] = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                out[k] = out.get(k, 0) + v1 * v2
        return MultiPolynomial(self.nvars, out)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, MultiPolynomial) and self.terms == other.terms

    def __call__(self, point: Sequence):
        total = 0
        for k, v in self.terms.items():
            term = float(v) if not all(isinstance(p, (int, Fraction)) for p in point) else v
            for p, e in zip(point, k):
                term = term * p ** e
            total = total + term
        return total

    def degree_in(self, j: int) -> int:
        return max((k[j] for k in self.terms), default=-1)

    def divide_linear(self, j: int, k: int = -1, sign: int = 1):
        """Divide by (y_j - sign*y_k), or by y_j when k < 0.

        Synthetic division in the variable y_j; returns (quotient, remainder)
        where the remainder does not involve y_j.
        """
        by_power: Dict[int, MultiPolynomial] = {}
        for e, v in self.terms.items():
            rest = list(e)
            p = rest[j]
            rest[j] = 0
            by_power.setdefault(p, MultiPolynomial(self.nvars))
            by_power[p] = by_power[p] + MultiPolynomial(self.nvars, {tuple(rest): v})
        zero = MultiPolynomial(self.nvars)
        top = max(by_power, default=-1)
        if top <= 0:
            return zero, by_power.get(0, zero)
        root = zero if k < 0 else MultiPolynomial.variable(self.nvars, k) * sign
        yj = MultiPolynomial.variable(self.nvars, j)
        b = by_power[top]
        quot = b * _monomial_power(yj, top - 1)
        for p in range(top - 1, 0, -1):
            b = by_power.get(p, zero) + root * b
            quot = quot + b * _monomial_power(yj, p - 1)
        rem = by_power.get(0, zero) + root * b
        return quot, rem


def _monomial_power(m: MultiPolynomial, p: int) -> MultiPolynomial:
    out = MultiPolynomial.const(m.nvars, 1)
    for _ in range(p):
        out = out * m
    return out


# ---------------------------------------------------------------------------
# The kernels
# ---------------------------------------------------------------------------

def P_ab2(a: int, b: int) -> RationalPolynomial:
    if b <= 0:
        return RationalPolynomial()
    coeffs = [Fraction(0)] * b
    for k in range(b):
        c = rising(a, k) / (math.factorial(k) * math.factorial(b - 1 - k))
        coeffs[b - 1 - k] = c * Fraction(2) ** (-a - k)
    return RationalPolynomial(coeffs)


def P_abminus2(a: int, b: int) -> RationalPolynomial:
    """Negative half-line piece, written out term by term (no reflection used)."""
    if a <= 0:
        return RationalPolynomial()
    coeffs = [Fraction(0)] * a
    sign = -1 if (a + b - 1) % 2 else 1
    for k in range(a):
        c = rising(b, k) / (math.factorial(k) * math.factorial(a - 1 - k))
        coeffs[a - 1 - k] = sign * c * Fraction(-2) ** (-b - k)
    return RationalPolynomial(coeffs)


def R_ab2(a: int, b: int) -> RationalPolynomial:
    return P_ab2(a, b) - P_ab2(a, b - 1)


def R_abminus2(a: int, b: int) -> RationalPolynomial:
    return P_ab2(b, a).reflect() - P_ab2(b - 1, a).reflect()


@dataclass(frozen=True)
class ExpPolyKernel:
    """prefactor * poly(scale*y) * exp(-scale*|y|), piecewise on the two half-lines."""

    plus_poly: RationalPolynomial
    minus_poly: RationalPolynomial
    scale: float = 1.0
    prefactor: float = TWO_PI

    def is_zero(self) -> bool:
        return self.plus_poly.is_zero() and self.minus_poly.is_zero()

    def with_scale(self, scale: float) -> "ExpPolyKernel":
        return ExpPolyKernel(self.plus_poly, self.minus_poly, scale, self.prefactor)

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        s = self.scale * y
        plus = self.plus_poly(s) if not self.plus_poly.is_zero() else np.zeros_like(s)
        minus = self.minus_poly(s) if not self.minus_poly.is_zero() else np.zeros_like(s)
        val = np.where(s > 0, plus, np.where(s < 0, minus, 0.5 * (plus + minus)))
        return self.prefactor * val * np.exp(-np.abs(s))

    def polynomial_degree(self) -> int:
        return max(self.plus_poly.degree, self.minus_poly.degree)


def P_ab(a: int, b: int) -> ExpPolyKernel:
    return ExpPolyKernel(P_ab2(a, b), P_ab2(b, a).reflect())


def R_ab(a: int, b: int) -> ExpPolyKernel:
    return ExpPolyKernel(R_ab2(a, b), R_abminus2(a, b))


@dataclass(frozen=True)
class DeltaJet:
    """The distribution prefactor * sum_n c_n s^n (-d/dy)^n delta_0 from Q(z) = sum c_n z^n.

    ``argument_scale`` s rescales the jet: s = 1/beta gives q(y) = beta^-1 Q(beta^-1 y)
    when ``prefactor`` carries the leading beta^-1.
    """

    q: RationalPolynomial
    prefactor: float = TWO_PI
    argument_scale: float = 1.0

    @property
    def order(self) -> int:
        return self.q.degree

    def is_zero(self) -> bool:
        return self.q.is_zero()

    def pair(self, derivatives: Sequence[float]) -> float:
        """Pairing with psi given psi^(n)(0) for n = 0..order: Q(d)psi(0)."""
        total = 0.0
        for n, c in enumerate(self.q.coeffs):
            if c:
                total += float(c) * self.argument_scale ** n * derivatives[n]
        return self.prefactor * total


def Q_poly(a: int, b: int) -> RationalPolynomial:
    """Q_{a,b}(z)/(2 pi) as an exact polynomial in z (z stands for iy)."""
    z = RationalPolynomial.x()
    one_minus = RationalPolynomial((1, -1))
    one_plus = RationalPolynomial((1, 1))
    if a + b >= 1:
        return RationalPolynomial()
    if a <= 0 and b <= 0:
        return one_plus ** (-a) * one_minus ** (-b)
    out = RationalPolynomial()
    if b >= 1:  # -a > b-1 >= 0
        for k in range(b, -a + 1):
            c = rising(a, k) / math.factorial(k) * Fraction(2) ** (-a - k)
            out = out + one_minus ** (k - b) * c
        return out
    for k in range(a, -b + 1):  # -b > a-1 >= 0
        c = rising(b, k) / math.factorial(k) * Fraction(2) ** (-b - k)
        out = out + one_plus ** (k - a) * c
    del z
    return out


def Q_ab(a: int, b: int) -> DeltaJet:
    return DeltaJet(Q_poly(a, b))


# ---------------------------------------------------------------------------
# Identities
# ---------------------------------------------------------------------------

def _fourier_quadrature(a: int, b: int, xi: float) -> complex:
    """int_R (1+iy)^-a (1-iy)^-b e^{-i y xi} dy by QAWF on the half line."""

    def f(y):
        return (1 + 1j * y) ** (-a) * (1 - 1j * y) ** (-b)

    even = lambda y: (f(y) + f(-y)).real  # noqa: E731
    odd = lambda y: (f(y) - f(-y)).imag  # noqa: E731
    # f(y)+f(-y) is real and f(y)-f(-y) is imaginary for real a, b
    w = abs(xi)
    c, _ = integrate.quad(even, 0, np.inf, weight="cos", wvar=w, limlst=200, epsabs=1e-12)
    s, _ = integrate.quad(odd, 0, np.inf, weight="sin", wvar=w, limlst=200, epsabs=1e-12)
    # -i sin(y xi) * (i * odd) = sin(y xi) * odd
    return c + np.sign(xi) * s + 0j


def fourier_transform_quadrature(a: int, b: int, xi: float) -> complex:
    if a + b < 2:
        raise ValueError("absolute convergence needs a + b >= 2")
    return _fourier_quadrature(a, b, xi)


def fourier_identity_check(a: int, b: int, grid: Sequence[float]) -> float:
    """Max |quadrature - P_{a,b}(xi) e^{-|xi|}| over a grid avoiding 0."""
    kern = P_ab(a, b)
    err = 0.0
    for xi in grid:
        if xi == 0:
            raise ValueError("grid must avoid xi = 0")
        lhs = fourier_transform_quadrature(a, b, float(xi))
        err = max(err, abs(lhs - float(kern(xi))))
    return err


def half_line_transform_check(a: int, b: int, psi, side: int = 1, with_iy: bool = False) -> Tuple[complex, complex]:
    """Two routes for the half-line transform identities.

    Left: int_R (1+iy)^-a (1-iy)^-b [iy] hat_psi(y) dy with hat_psi(y) =
    int_{side half-line} e^{-iy xi} psi(xi) d xi computed by quadrature.
    Right: 2 pi int P_{a,b,+-2} e^{-|xi|} psi (or R when ``with_iy``).
    """
    lo, hi = (0.0, np.inf) if side > 0 else (-np.inf, 0.0)

    def hat(y):
        re, _ = integrate.quad(lambda t: psi(t) * math.cos(y * t), lo, hi, epsabs=1e-13, limit=200)
        im, _ = integrate.quad(lambda t: -psi(t) * math.sin(y * t), lo, hi, epsabs=1e-13, limit=200)
        return re + 1j * im

    def integrand(y, part):
        v = (1 + 1j * y) ** (-a) * (1 - 1j * y) ** (-b) * hat(y)
        if with_iy:
            v *= 1j * y
        return v.real if part == 0 else v.imag

    lhs = 0j
    for part, unit in ((0, 1), (1, 1j)):
        v, _ = integrate.quad(integrand, -np.inf, np.inf, args=(part,), epsabs=1e-10, limit=400)
        lhs += unit * v
    if with_iy:
        poly = R_ab2(a, b) if side > 0 else R_abminus2(a, b)
    else:
        poly = P_ab2(a, b) if side > 0 else P_ab2(b, a).reflect()
    rhs, _ = integrate.quad(lambda t: float(poly(t)) * math.exp(-abs(t)) * psi(t), lo, hi, epsabs=1e-13, limit=200)
    return lhs, TWO_PI * rhs


def laplace_pieces(a: int, b: int):
    """Partial fractions sum c_m m! (1-z)^{-m-1} and sum c'_m m! (1+z)^{-m-1}.

    Returned as lists of (power, coefficient) for the (1-z) and (1+z) poles.
    """
    plus = [(m + 1, c * math.factorial(m)) for m, c in enumerate(P_ab2(a, b).coeffs) if c]
    minus = [(m + 1, c * math.factorial(m)) for m, c in enumerate(P_ab2(b, a).coeffs) if c]
    return plus, minus


def decomposition_identity_residual(a: int, b: int) -> RationalPolynomial:
    """Exact residual of the partial-fraction decomposition of (1+z)^-a (1-z)^-b.

    Everything is multiplied by (1+z)^A (1-z)^B with A, B large enough to
    clear all denominators; the returned polynomial is zero iff the identity holds.
    """
    one_minus = RationalPolynomial((1, -1))
    one_plus = RationalPolynomial((1, 1))
    plus, minus = laplace_pieces(a, b)
    A = max([0, a] + [p for p, _ in minus])
    B = max([0, b] + [p for p, _ in plus])
    lhs = one_plus ** (A - a) * one_minus ** (B - b)
    rhs = Q_poly(a, b) * one_plus ** A * one_minus ** B
    for p, c in plus:
        rhs = rhs + one_plus ** A * one_minus ** (B - p) * c
    for p, c in minus:
        rhs = rhs + one_plus ** (A - p) * one_minus ** B * c
    return lhs - rhs


def decomposition_identity_holds(a: int, b: int) -> bool:
    return decomposition_identity_residual(a, b).is_zero()
