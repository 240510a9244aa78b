"""Cayley transforms, ch, Jacobians, the trace form, and an explicit
super-space realization of each dual pair (moment maps, symplectic form).

Quaternionic matrices are stored through the complex embedding
Z1 + Z2 j  ->  [[Z1, -conj(Z2)], [Z2, conj(Z1)]].
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Tuple

import numpy as np

from .pair_catalog import DualPair, HCParameter, IntegralityError, lie_algebra_dim, r_number
from .root_weyl import RootSystem, TorusPoint, pi_gh, weyl_denominator, xi_weight

ALGEBRA_OF = {"O": "R", "U": "C", "Sp": "H"}
IOTA_OF = {"R": Fraction(1), "C": Fraction(1), "H": Fraction(1, 2)}


# ---------------------------------------------------------------------------
# quaternionic embedding and real traces / determinants
# ---------------------------------------------------------------------------

def quat_embed(z1: np.ndarray, z2: np.ndarray) -> np.ndarray:
    z1 = np.atleast_2d(np.asarray(z1, dtype=complex))
    z2 = np.atleast_2d(np.asarray(z2, dtype=complex))
    return np.block([[z1, -z2.conj()], [z2, z1.conj()]])


def quat_parts(m: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    r, c = m.shape[0] // 2, m.shape[1] // 2
    return m[:r, :c], m[r:, :c]


def real_trace(x: np.ndarray, algebra: str) -> float:
    """tr_{D/R}: trace of x as a real-linear endomorphism."""
    if algebra == "R":
        return float(np.trace(x).real)
    return float(2 * np.trace(x).real)


def real_det(x: np.ndarray, algebra: str) -> float:
    if algebra == "R":
        return float(np.linalg.det(x).real)
    return float(abs(np.linalg.det(x)) ** 2)


def matrix_size(group: str, d: int) -> int:
    return 2 * d if group == "Sp" else d


# ---------------------------------------------------------------------------
# Lie algebra bases and Cartan generators
# ---------------------------------------------------------------------------

def lie_algebra_basis(group: str, d: int) -> List[np.ndarray]:
    """Basis of g orthonormal for Re tr(a^* b)/k with k = 2 (O, U) or 4 (Sp)."""
    out = []
    if group == "O":
        for j in range(d):
            for k in range(j + 1, d):
                e = np.zeros((d, d))
                e[j, k], e[k, j] = 1, -1
                out.append(e)
        return out
    if group == "U":
        for j in range(d):
            e = np.zeros((d, d), dtype=complex)
            e[j, j] = 1j * math.sqrt(2)
            out.append(e)
        for j in range(d):
            for k in range(j + 1, d):
                e = np.zeros((d, d), dtype=complex)
                e[j, k], e[k, j] = 1, -1
                out.append(e)
                f = np.zeros((d, d), dtype=complex)
                f[j, k], f[k, j] = 1j, 1j
                out.append(f)
        return out
    if group == "Sp":
        z = np.zeros((d, d), dtype=complex)
        units = [(1j, 0), (0, 1), (0, 1j)]  # i, j, k as (z1, z2)
        for j in range(d):
            for a, b in units:
                z1, z2 = z.copy(), z.copy()
                z1[j, j], z2[j, j] = a * math.sqrt(2), b * math.sqrt(2)
                out.append(quat_embed(z1, z2))
        for j in range(d):
            for k in range(j + 1, d):
                z1 = z.copy()
                z1[j, k], z1[k, j] = 1, -1
                out.append(quat_embed(z1, z))
                for a, b in units:
                    z1, z2 = z.copy(), z.copy()
                    z1[j, k], z1[k, j] = a, a
                    z2[j, k], z2[k, j] = b, b
                    out.append(quat_embed(z1, z2))
        return out
    raise ValueError(f"unknown group {group!r}")


def cartan_generators(group: str, d: int) -> List[np.ndarray]:
    """J_j with J_j^2 = -1 on the j-th block: v0 -> -v0', v0' -> v0 for O; -i for U, Sp."""
    out = []
    if group == "O":
        for j in range(d // 2):
            e = np.zeros((d, d))
            e[2 * j, 2 * j + 1], e[2 * j + 1, 2 * j] = 1, -1
            out.append(e)
        return out
    for j in range(d):
        z = np.zeros((d, d), dtype=complex)
        z[j, j] = -1j
        out.append(z if group == "U" else quat_embed(z, np.zeros_like(z)))
    return out


def cartan_element(group: str, d: int, y: Sequence[float]) -> np.ndarray:
    gens = cartan_generators(group, d)
    x = np.zeros_like(gens[0], dtype=complex if group != "O" else float)
    for v, j in zip(y, gens):
        x = x + v * j
    return x


def random_lie_element(group: str, d: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    basis = lie_algebra_basis(group, d)
    c = rng.normal(scale=scale, size=len(basis))
    return sum(ci * b for ci, b in zip(c, basis))


# ---------------------------------------------------------------------------
# Cayley transform, ch, Jacobian
# ---------------------------------------------------------------------------

def cayley(x: np.ndarray) -> np.ndarray:
    one = np.eye(x.shape[0])
    return (x + one) @ np.linalg.inv(x - one)


def cayley_minus(x: np.ndarray) -> np.ndarray:
    return -cayley(x)


def ch(x: np.ndarray, algebra: str) -> float:
    """det(1 - x)^{1/2} of x as a real-linear map of V."""
    return math.sqrt(real_det(np.eye(x.shape[0]) - x, algebra))


def ch_cartan(y: Sequence[float], iota: Fraction) -> float:
    return float(np.prod([(1 + v * v) ** (1 / (2 * float(iota))) for v in y]))


def jacobian_cminus(x: np.ndarray, group: str, d: int) -> float:
    """Closed form 2^{dim g} ch(x)^{-2r}."""
    return 2.0 ** lie_algebra_dim(group, d) * ch(x, ALGEBRA_OF[group]) ** (-2 * float(r_number(group, d)))


def jacobian_cminus_matrix(x: np.ndarray, group: str, d: int) -> float:
    """|det| of y -> c_-(x)^{-1} 2(1-x)^{-1} y (1-x)^{-1} on g, in an orthonormal basis.

    Left translation by c_-(x)^{-1} is an isometry for the invariant metric, so
    this is the Jacobian of c_- with respect to Haar measure.
    """
    basis = lie_algebra_basis(group, d)
    one = np.eye(x.shape[0])
    inv_minus = np.linalg.inv(one - x)
    back = np.linalg.inv(cayley_minus(x))
    norm = np.real(np.trace(basis[0].conj().T @ basis[0]))
    mat = np.empty((len(basis), len(basis)))
    for k, b in enumerate(basis):
        img = back @ (2 * inv_minus @ b @ inv_minus)
        for j, e in enumerate(basis):
            mat[j, k] = np.real(np.trace(e.conj().T @ img)) / norm
    return abs(float(np.linalg.det(mat)))


# ---------------------------------------------------------------------------
# Cartan-coordinate formulas
# ---------------------------------------------------------------------------

def rational_symbol_factor(pair: DualPair, mu: HCParameter, y: Sequence[float]) -> complex:
    """prod_j (1+iy_j)^{-mu_j+delta-1} (1-iy_j)^{mu_j+delta-1}."""
    out = complex(1)
    for j, (m, v) in enumerate(zip(mu.mu, y), start=1):
        e1 = -m + pair.delta - 1
        e2 = m + pair.delta - 1
        if e1.denominator != 1 or e2.denominator != 1:
            raise IntegralityError(j, m + pair.delta)
        out *= (1 + 1j * v) ** int(e1) * (1 - 1j * v) ** int(e2)
    return out


def torus_character_factor(pair: DualPair, mu_values: Sequence[Fraction], y: Sequence[float]) -> complex:
    """xi_{-mu}(c_-(y)) ch^{d'-r-iota}(y) through the torus coordinates."""
    h = TorusPoint.from_cayley(y)
    power = float((pair.dprime - pair.r - pair.iota))
    return xi_weight(tuple(-m for m in mu_values), h.u) * ch_cartan(y, pair.iota) ** power


def delta_pi_ratios(group: str, d: int, samples: Sequence[Sequence[float]]) -> np.ndarray:
    """pi_{g/h}(x) / (Delta(c_-(x)) ch^{r-iota}(x)) at each sample."""
    rs = RootSystem(group, d)
    iota = IOTA_OF[ALGEBRA_OF[group]]
    exponent = float(r_number(group, d) - iota)
    out = []
    for y in samples:
        h = TorusPoint.from_cayley(y)
        out.append(pi_gh(y, rs.rtype) / (weyl_denominator(rs, h.u) * ch_cartan(y, iota) ** exponent))
    return np.array(out)


def relative_spread(values: np.ndarray) -> float:
    ref = values[0]
    return float(np.max(np.abs(values - ref)) / abs(ref))


def delta_pi_relation_check(group: str, d: int, samples) -> Tuple[complex, float]:
    r = delta_pi_ratios(group, d, samples)
    return complex(np.mean(r)), relative_spread(r)


def B_form(x: np.ndarray, y: np.ndarray, algebra: str) -> float:
    return math.pi * real_trace(x @ y, algebra)


def B_form_cartan(x: Sequence[float], y: Sequence[float], iota: Fraction) -> float:
    return -(2 * math.pi / float(iota)) * float(np.dot(x, y))


# ---------------------------------------------------------------------------
# explicit realization of W = Hom(V1, V0) inside End(V0 + V1)
# ---------------------------------------------------------------------------

@dataclass
class MomentImage:
    tau: np.ndarray
    tau_prime: np.ndarray


class PairRealization:
    """V0 carries the positive form of G, V1 the (skew) form of G'.

    Forms are (a, b) = b^* H a.  An odd element w = [[0, Z], [Z', 0]] is in W
    when Z' = -H1^{-*} Z^* H0^*, the condition (w a, b) = (a, S w b).
    """

    def __init__(self, pair: DualPair):
        self.pair = pair
        self.algebra = pair.algebra.tag
        d, dp = pair.d, pair.dprime
        if pair.family == "O-Sp":
            self.n0, self.n1 = d, dp
            self.H0 = np.eye(d)
            self.H1 = np.zeros((dp, dp))
            for j in range(dp // 2):
                self.H1[2 * j, 2 * j + 1], self.H1[2 * j + 1, 2 * j] = -1, 1
            self.signs = [1] * (dp // 2)
        elif pair.family == "U-U":
            p, q = pair.signature
            self.n0, self.n1 = d, dp
            self.H0 = np.eye(d, dtype=complex)
            self.signs = [1] * p + [-1] * q
            self.H1 = 1j * np.diag(self.signs).astype(complex)
        else:
            self.n0, self.n1 = 2 * d, 2 * dp
            self.H0 = np.eye(2 * d, dtype=complex)
            self.H1 = quat_embed(1j * np.eye(dp), np.zeros((dp, dp)))
            self.signs = [1] * dp
        self._adj = -np.linalg.inv(self.H1).conj().T

    # -- construction --------------------------------------------------------
    def partner(self, Z: np.ndarray) -> np.ndarray:
        return self._adj @ Z.conj().T @ self.H0.conj().T

    def odd(self, Z: np.ndarray) -> np.ndarray:
        dtype = complex if self.algebra != "R" else float
        w = np.zeros((self.n0 + self.n1,) * 2, dtype=dtype)
        w[: self.n0, self.n0:] = Z
        w[self.n0:, : self.n0] = self.partner(Z)
        return w

    def real_basis_Z(self) -> List[np.ndarray]:
        d, dp = self.pair.d, self.pair.dprime
        out = []
        if self.algebra == "R":
            for a in range(d):
                for b in range(dp):
                    e = np.zeros((d, dp))
                    e[a, b] = 1
                    out.append(e)
        elif self.algebra == "C":
            for a in range(d):
                for b in range(dp):
                    for u in (1, 1j):
                        e = np.zeros((d, dp), dtype=complex)
                        e[a, b] = u
                        out.append(e)
        else:
            for a in range(d):
                for b in range(dp):
                    for u1, u2 in ((1, 0), (1j, 0), (0, 1), (0, 1j)):
                        z1 = np.zeros((d, dp), dtype=complex)
                        z2 = np.zeros((d, dp), dtype=complex)
                        z1[a, b], z2[a, b] = u1, u2
                        out.append(quat_embed(z1, z2))
        return out

    def random_Z(self, rng: np.random.Generator) -> np.ndarray:
        basis = self.real_basis_Z()
        c = rng.normal(size=len(basis))
        return sum(ci * b for ci, b in zip(c, basis))

    def random_w(self, rng: np.random.Generator) -> np.ndarray:
        return self.odd(self.random_Z(rng))

    def embed_g(self, x: np.ndarray) -> np.ndarray:
        dtype = np.result_type(x, complex) if self.algebra != "R" else x.dtype
        X = np.zeros((self.n0 + self.n1,) * 2, dtype=dtype)
        X[: self.n0, : self.n0] = x
        return X

    def super_sign(self) -> np.ndarray:
        return np.diag([1.0] * self.n0 + [-1.0] * self.n1)

    # -- invariants ------------------------------------------------------------
    def is_in_W(self, w: np.ndarray, tol: float = 1e-10) -> bool:
        Z = w[: self.n0, self.n0:]
        return np.allclose(w[self.n0:, : self.n0], self.partner(Z), atol=tol)

    def moment_maps(self, w: np.ndarray) -> MomentImage:
        w2 = w @ w
        return MomentImage(w2[: self.n0, : self.n0], w2[self.n0:, self.n0:])

    def symplectic_form(self, w1: np.ndarray, w2: np.ndarray) -> float:
        return real_trace(self.super_sign() @ w1 @ w2, self.algebra)

    def act(self, x: np.ndarray, w: np.ndarray) -> np.ndarray:
        X = self.embed_g(x)
        return X @ w - w @ X

    def chi_direct(self, x: np.ndarray, w: np.ndarray) -> complex:
        """chi(1/4 <x(w), w>) with chi(r) = exp(2 pi i r)."""
        return cmath.exp(2j * math.pi * 0.25 * self.symplectic_form(self.act(x, w), w))

    def chi_via_B(self, x: np.ndarray, w: np.ndarray) -> complex:
        return cmath.exp(1j * B_form(x, self.moment_maps(w).tau, self.algebra))

    def cartan_element(self, coeffs: Sequence[float]) -> np.ndarray:
        """sum_j w_j u_j with tau(u_j) = delta_j J_j (delta_j from the G' form)."""
        d, dp = self.pair.d, self.pair.dprime
        if self.algebra == "R":
            Z = np.zeros((d, dp))
            blk = np.array([[1.0, 1.0], [-1.0, 1.0]]) / math.sqrt(2)
            for j, c in enumerate(coeffs):
                Z[2 * j: 2 * j + 2, 2 * j: 2 * j + 2] = c * blk
        elif self.algebra == "C":
            Z = np.zeros((d, dp), dtype=complex)
            for j, c in enumerate(coeffs):
                Z[j, j] = c * cmath.exp(-1j * self.signs[j] * math.pi / 4)
        else:
            z1 = np.zeros((d, dp), dtype=complex)
            for j, c in enumerate(coeffs):
                z1[j, j] = c * cmath.exp(-1j * math.pi / 4)
            Z = quat_embed(z1, np.zeros_like(z1))
        return self.odd(Z)

    def det_one_minus_on_W(self, x: np.ndarray) -> float:
        """det of Z -> Z - x Z as a real-linear map of W."""
        basis = self.real_basis_Z()
        gram = np.array([[np.real(np.vdot(a, b)) for b in basis] for a in basis])
        img = [b - x @ b for b in basis]
        mat = np.array([[np.real(np.vdot(a, v)) for v in img] for a in basis])
        return float(np.linalg.det(np.linalg.solve(gram, mat)))

    def theta_cayley(self, x: np.ndarray) -> complex:
        """(i/2)^{dim W/2} det(1 - x)_W^{1/2}."""
        return (0.5j) ** (self.pair.dimW // 2) * math.sqrt(self.det_one_minus_on_W(x))

    def theta_cayley_squared_reference(self, x: np.ndarray) -> complex:
        """i^{dim W} det(1/2 (x - 1))_W from the explicit W action."""
        basis = self.real_basis_Z()
        gram = np.array([[np.real(np.vdot(a, b)) for b in basis] for a in basis])
        img = [0.5 * (x @ b - b) for b in basis]
        mat = np.array([[np.real(np.vdot(a, v)) for v in img] for a in basis])
        return (1j) ** self.pair.dimW * float(np.linalg.det(np.linalg.solve(gram, mat)))


def kappa(pair: DualPair, y: Sequence[float], realization: PairRealization | None = None) -> complex:
    """i^{-m} pi_{g/h}(x)/Delta(c_-(x)) Theta(c~(x)) j_g(x) for x = sum y_j J_j.

    Theta and j are taken from explicit matrix computations.
    """
    group, d = pair.compact_group, pair.d
    rs = RootSystem(group, d)
    real = realization or PairRealization(pair)
    x = cartan_element(group, d, y)
    h = TorusPoint.from_cayley(y)
    return (1j) ** (-rs.m) * pi_gh(y, rs.rtype) / weyl_denominator(rs, h.u) \
        * real.theta_cayley(x) * jacobian_cminus_matrix(x, group, d)
