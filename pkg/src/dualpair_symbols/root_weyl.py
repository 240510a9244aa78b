"""Root data, Weyl groups, Weyl denominators and characters for O_d, U_d, Sp_d.

Roots are integer vectors in the basis e_j dual to the Cartan generators J_j.
Group labels: ``"O"``, ``"U"``, ``"Sp"`` (compact) together with ``d``.
Root types: ``A`` (U), ``B`` (O odd), ``C`` (Sp and the split symplectic side),
``D`` (O even and the O* side).
"""
from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence, Tuple

import numpy as np

from .pair_catalog import compact_rank, rho_vector

MAX_ENUM_RANK = 8


def root_type(group: str, d: int) -> str:
    if group == "U":
        return "A"
    if group == "Sp":
        return "C"
    if group == "O":
        return "D" if d % 2 == 0 else "B"
    raise ValueError(f"unknown group {group!r}")


def positive_roots(rtype: str, l: int) -> list:
    roots = []
    for j in range(l):
        for k in range(j + 1, l):
            v = [0] * l
            v[j], v[k] = 1, -1
            roots.append(tuple(v))
            if rtype != "A":
                w = [0] * l
                w[j], w[k] = 1, 1
                roots.append(tuple(w))
    for j in range(l):
        v = [0] * l
        if rtype == "B":
            v[j] = 1
            roots.append(tuple(v))
        elif rtype == "C":
            v[j] = 2
            roots.append(tuple(v))
    return roots


@dataclass(frozen=True)
class RootSystem:
    group: str
    d: int

    @property
    def l(self) -> int:
        return compact_rank(self.group, self.d)

    @property
    def rtype(self) -> str:
        return root_type(self.group, self.d)

    @property
    def positive(self) -> list:
        return positive_roots(self.rtype, self.l)

    @property
    def rho(self) -> Tuple[Fraction, ...]:
        return rho_vector(self.group, self.d)

    @property
    def m(self) -> int:
        return len(self.positive)


# ---------------------------------------------------------------------------
# pi_{g/h}
# ---------------------------------------------------------------------------

def pi_gh(y: Sequence, rtype: str):
    """Product formula for the positive roots evaluated on sum y_j J_j.

    A : prod_{j<k} i(-y_j + y_k)
    C : prod_{j<k} (-y_j^2 + y_k^2) prod_j 2i y_j
    D : prod_{j<k} (-y_j^2 + y_k^2)
    B : prod_{j<k} (-y_j^2 + y_k^2) prod_j i y_j
    Exact when the entries of ``y`` are Fractions (returns a complex-like pair).
    """
    l = len(y)
    out = complex(1)
    for j in range(l):
        for k in range(j + 1, l):
            if rtype == "A":
                out *= 1j * (-y[j] + y[k])
            else:
                out *= (-y[j] ** 2 + y[k] ** 2)
    if rtype == "C":
        for v in y:
            out *= 2j * v
    elif rtype == "B":
        for v in y:
            out *= 1j * v
    return out


def pi_gh_real_part(rtype: str, l: int):
    """(constant, MultiPolynomial) with pi_gh = constant * polynomial, polynomial rational."""
    from .kernel_functions import MultiPolynomial

    poly = MultiPolynomial.const(l, 1)
    const = complex(1)
    ys = [MultiPolynomial.variable(l, j) for j in range(l)]
    for j in range(l):
        for k in range(j + 1, l):
            if rtype == "A":
                const *= 1j
                poly = poly * (ys[k] - ys[j])
            else:
                poly = poly * (ys[k] * ys[k] - ys[j] * ys[j])
    if rtype in ("B", "C"):
        for j in range(l):
            const *= 2j if rtype == "C" else 1j
            poly = poly * ys[j]
    return const, poly


def pi_gh_linear_factors(rtype: str, l: int) -> list:
    """Linear factors of the rational part: (j, k, sign) means y_j - sign*y_k, k<0 means y_j."""
    out = []
    for j in range(l):
        for k in range(j + 1, l):
            out.append((k, j, 1))
            if rtype != "A":
                out.append((k, j, -1))
    if rtype in ("B", "C"):
        out.extend((j, -1, 1) for j in range(l))
    return out


# ---------------------------------------------------------------------------
# Weyl group
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WeylElement:
    """t = (sigma, eps) acting by (t.v)_j = eps_j v_{sigma^-1(j)}.

    ``perm[j] = sigma(j)`` (0-based).  The same formula is used for y in h and
    for parameters mu, so that sum_j (t mu)_j (t y)_j = sum_j mu_j y_j.
    """

    perm: Tuple[int, ...]
    signs: Tuple[int, ...]
    rtype: str

    @property
    def sgn(self) -> int:
        s = permutation_sign(self.perm)
        if self.rtype in ("B", "C"):
            s *= int(np.prod(self.signs)) if self.signs else 1
        return s

    def inverse_perm(self) -> Tuple[int, ...]:
        inv = [0] * len(self.perm)
        for j, p in enumerate(self.perm):
            inv[p] = j
        return tuple(inv)

    def act(self, v: Sequence):
        inv = self.inverse_perm()
        return tuple(self.signs[j] * v[inv[j]] for j in range(len(v)))

    def act_torus(self, u: Sequence[complex]) -> Tuple[complex, ...]:
        inv = self.inverse_perm()
        return tuple(u[inv[j]] if self.signs[j] > 0 else 1 / u[inv[j]] for j in range(len(u)))

    def compose(self, other: "WeylElement") -> "WeylElement":
        """self * other (apply other first)."""
        l = len(self.perm)
        perm = tuple(self.perm[other.perm[j]] for j in range(l))
        inv_self = self.inverse_perm()
        signs = tuple(self.signs[j] * other.signs[inv_self[j]] for j in range(l))
        return WeylElement(perm, signs, self.rtype)

    def inverse(self) -> "WeylElement":
        inv = self.inverse_perm()
        signs = tuple(self.signs[self.perm[j]] for j in range(len(self.perm)))
        return WeylElement(inv, signs, self.rtype)


def permutation_sign(perm: Sequence[int]) -> int:
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def weyl_elements(rtype: str, l: int) -> Iterator[WeylElement]:
    """All elements; for type D every sign change is included (full O_{2l} group)."""
    if l > MAX_ENUM_RANK:
        raise ValueError(f"rank {l} too large for enumeration (max {MAX_ENUM_RANK})")
    sign_sets = [(1,) * l] if rtype == "A" else list(itertools.product((1, -1), repeat=l))
    for perm in itertools.permutations(range(l)):
        for signs in sign_sets:
            yield WeylElement(tuple(perm), tuple(signs), rtype)


def weyl_order(rtype: str, l: int) -> int:
    return math.factorial(l) * (1 if rtype == "A" else 2 ** l)


# ---------------------------------------------------------------------------
# Torus, denominators, characters
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TorusPoint:
    u: Tuple[complex, ...]
    y: Tuple[float, ...] | None = None

    @classmethod
    def from_cayley(cls, y: Sequence[float]) -> "TorusPoint":
        u = tuple((1 + 1j * v) / (1 - 1j * v) for v in y)
        return cls(u, tuple(float(v) for v in y))

    @classmethod
    def from_angles(cls, theta: Sequence[float]) -> "TorusPoint":
        return cls(tuple(cmath.exp(1j * t) for t in theta))


def half_power(u: complex, nu: Fraction) -> complex:
    """u^nu for half-integral nu through the principal square root of u."""
    two_nu = 2 * nu
    if two_nu.denominator != 1:
        raise ValueError("only half-integral exponents are supported")
    return cmath.sqrt(u) ** int(two_nu)


def xi_weight(nu: Sequence[Fraction], u: Sequence[complex]) -> complex:
    out = complex(1)
    for n, x in zip(nu, u):
        out *= half_power(x, Fraction(n))
    return out


def weyl_denominator(rs: RootSystem, u: Sequence[complex]) -> complex:
    out = xi_weight(rs.rho, u)
    for alpha in rs.positive:
        out *= 1 - xi_weight(tuple(-a for a in alpha), u)
    return out


def skew_sum(rs: RootSystem, mu: Sequence[Fraction], u: Sequence[complex]) -> complex:
    total = complex(0)
    for s in weyl_elements(rs.rtype, rs.l):
        total += s.sgn * xi_weight(s.act(mu), u)
    return total


def stabilizer_size(rs: RootSystem, mu: Sequence[Fraction]) -> int:
    mu = tuple(mu)
    return sum(1 for s in weyl_elements(rs.rtype, rs.l) if s.act(mu) == mu)


def weyl_character(rs: RootSystem, mu: Sequence[Fraction], h: TorusPoint, tol: float = 1e-300) -> complex:
    """Skew sum over Delta.

    For type D the full sign-change group is summed and the result divided by
    the stabilizer of mu, giving the O_{2l} character restricted to the torus.
    """
    den = weyl_denominator(rs, h.u)
    if abs(den) <= tol:
        raise ZeroDivisionError("singular torus point")
    return skew_sum(rs, mu, h.u) / den / stabilizer_size(rs, mu)


def weyl_dimension(rs: RootSystem, mu: Sequence[Fraction]) -> int:
    mu = tuple(Fraction(m) for m in mu)
    for j in range(len(mu) - 1):
        if not mu[j] > mu[j + 1]:
            raise ValueError("parameter is not dominant")
    num = Fraction(1)
    for alpha in rs.positive:
        num *= sum(a * m for a, m in zip(alpha, mu)) / sum(a * r for a, r in zip(alpha, rs.rho))
    if rs.rtype == "D" and mu and mu[-1] != 0:
        num *= 2
    if num.denominator != 1 or num <= 0:
        raise ValueError("parameter is not dominant")
    return int(num)
