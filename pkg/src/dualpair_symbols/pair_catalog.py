"""Irreducible dual pairs with a compact member and their scalar invariants.

Three families are supported:

* ``O-Sp``     : (O_d, Sp_{2m}(R)), dprime = 2m
* ``U-U``      : (U_d, U_{p,q}),    dprime = p + q
* ``Sp-Ostar`` : (Sp_d, O*_{2m}),   dprime = m

All invariants that feed exact polynomial constructions are kept as
``fractions.Fraction``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Tuple

FAMILIES = ("O-Sp", "U-U", "Sp-Ostar")

_ALIASES = {
    "o-sp": "O-Sp", "o–sp": "O-Sp", "osp": "O-Sp", "o_sp": "O-Sp",
    "u-u": "U-U", "u–u": "U-U", "uu": "U-U", "u_u": "U-U",
    "sp-ostar": "Sp-Ostar", "sp–ostar": "Sp-Ostar", "sp-o*": "Sp-Ostar",
    "sp–o*": "Sp-Ostar", "spostar": "Sp-Ostar", "sp_ostar": "Sp-Ostar",
}


class PairError(ValueError):
    """Raised for inconsistent pair data (usage error)."""


class IntegralityError(ValueError):
    """Raised when a parameter violates +-mu_j + delta in Z.

    ``index`` is the 1-based coordinate and ``value`` the offending mu_j + delta.
    """

    def __init__(self, index: int, value: Fraction, message: str = ""):
        self.index = index
        self.value = value
        super().__init__(message or f"mu_{index} + delta = {value} is not an integer")


@dataclass(frozen=True)
class DivisionAlgebra:
    tag: str

    @property
    def iota(self) -> Fraction:
        return Fraction(1, 2) if self.tag == "H" else Fraction(1)

    @property
    def real_dim(self) -> int:
        return {"R": 1, "C": 2, "H": 4}[self.tag]


def normalize_family(family: str) -> str:
    if family in FAMILIES:
        return family
    key = family.strip().lower().replace(" ", "")
    if key in _ALIASES:
        return _ALIASES[key]
    raise PairError(f"unknown family {family!r}; expected one of {FAMILIES}")


def as_fraction(x) -> Fraction:
    """Parse ints, Fractions, or strings such as '3/2' / '-0.5' exactly."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x).limit_denominator(10**6)
    return Fraction(str(x).strip())


def compact_rank(group: str, d: int) -> int:
    return d // 2 if group == "O" else d


def rho_vector(group: str, d: int) -> Tuple[Fraction, ...]:
    """Half sum of positive roots for O_d, U_d, Sp_d in the e_j basis."""
    l = compact_rank(group, d)
    if group == "O":
        return tuple(Fraction(d, 2) - j for j in range(1, l + 1))
    if group == "U":
        return tuple(Fraction(d + 1, 2) - j for j in range(1, l + 1))
    if group == "Sp":
        return tuple(Fraction(d + 1 - j) for j in range(1, l + 1))
    raise PairError(f"unknown compact group {group!r}")


def r_number(group: str, d: int) -> Fraction:
    """The constant r from the case table: 2l-1, 2l, l, l+1/2."""
    if group == "O":
        l = d // 2
        return Fraction(2 * l - 1) if d % 2 == 0 else Fraction(2 * l)
    if group == "U":
        return Fraction(d)
    if group == "Sp":
        return Fraction(d) + Fraction(1, 2)
    raise PairError(f"unknown compact group {group!r}")


def lie_algebra_dim(group: str, d: int) -> int:
    return {"O": d * (d - 1) // 2, "U": d * d, "Sp": d * (2 * d + 1)}[group]


@dataclass(frozen=True)
class DualPair:
    family: str
    d: int
    dprime: int
    signature: Optional[Tuple[int, int]] = None

    # --- classification data -------------------------------------------------
    @property
    def algebra(self) -> DivisionAlgebra:
        return DivisionAlgebra({"O-Sp": "R", "U-U": "C", "Sp-Ostar": "H"}[self.family])

    @property
    def compact_group(self) -> str:
        return {"O-Sp": "O", "U-U": "U", "Sp-Ostar": "Sp"}[self.family]

    @property
    def iota(self) -> Fraction:
        return self.algebra.iota

    @property
    def l(self) -> int:
        return compact_rank(self.compact_group, self.d)

    @property
    def lprime(self) -> int:
        if self.family == "O-Sp":
            return self.dprime // 2
        return self.dprime

    @property
    def ldoubleprime(self) -> int:
        return min(self.l, self.lprime)

    @property
    def r(self) -> Fraction:
        return r_number(self.compact_group, self.d)

    @property
    def delta(self) -> Fraction:
        return (self.dprime - self.r + self.iota) / (2 * self.iota)

    @property
    def beta_kernel(self) -> float:
        """pi / iota: the scale attached to delta in the kernel statement."""
        return math.pi / float(self.iota)

    @property
    def beta_form(self) -> float:
        """2 pi / iota: the constant of the trace form on Cartan coordinates."""
        return 2 * math.pi / float(self.iota)

    @property
    def dimW(self) -> int:
        return self.algebra.real_dim * self.d * self.dprime

    @property
    def dim_g(self) -> int:
        return lie_algebra_dim(self.compact_group, self.d)

    @property
    def dim_gprime(self) -> int:
        if self.family == "O-Sp":
            m = self.dprime // 2
            return m * (2 * m + 1)
        if self.family == "U-U":
            return self.dprime ** 2
        m = self.dprime
        return m * (2 * m - 1)

    @property
    def rho(self) -> Tuple[Fraction, ...]:
        return rho_vector(self.compact_group, self.d)

    @property
    def gprime_root_type(self) -> str:
        """Root type of the complexified Lie algebra of G' (A, C or D)."""
        return {"O-Sp": "C", "U-U": "A", "Sp-Ostar": "D"}[self.family]

    @property
    def gprime_compact(self) -> bool:
        if self.family == "U-U":
            return 0 in self.signature
        return False

    @property
    def is_O2_Sp2(self) -> bool:
        return self.family == "O-Sp" and self.d == 2 and self.dprime == 2

    @property
    def label(self) -> str:
        g = f"{self.compact_group}_{self.d}"
        if self.family == "O-Sp":
            return f"({g},Sp_{self.dprime}(R))"
        if self.family == "U-U":
            p, q = self.signature
            return f"({g},U_{p},{q})"
        return f"({g},O*_{2 * self.dprime})"

    def info(self) -> dict:
        return {
            "family": self.family,
            "d": self.d,
            "dprime": self.dprime,
            "l": self.l,
            "lprime": self.lprime,
            "iota": self.iota,
            "r": self.r,
            "delta": self.delta,
            "dimW": self.dimW,
            "covering_splits": covering_splits(self)[0],
        }


def make_pair(family: str, d: int, dprime: int, signature: Optional[Sequence[int]] = None) -> DualPair:
    family = normalize_family(family)
    if d < 1 or dprime < 1:
        raise PairError("d and dprime must be positive")
    if family == "U-U":
        if signature is None:
            raise PairError("U-U pairs need a signature (p,q)")
        p, q = (int(s) for s in signature)
        if p < 0 or q < 0 or p + q != dprime:
            raise PairError(f"signature {(p, q)} inconsistent with dprime={dprime}")
        return DualPair(family, d, dprime, (p, q))
    if signature is not None:
        raise PairError("a signature is only meaningful for U-U pairs")
    if family == "O-Sp" and dprime % 2:
        raise PairError("O-Sp needs an even dprime = 2m")
    return DualPair(family, d, dprime, None)


def parse_pair(spec: str) -> DualPair:
    """Parse 'O-Sp:3,2', 'U-U:1,1,1,0' (d, dprime, p, q) or 'Sp-Ostar:1,1'."""
    try:
        fam, rest = spec.split(":", 1)
        nums = [int(t) for t in rest.replace(";", ",").split(",") if t.strip()]
    except ValueError as exc:
        raise PairError(f"cannot parse pair spec {spec!r}") from exc
    fam = normalize_family(fam)
    if fam == "U-U":
        if len(nums) != 4:
            raise PairError("U-U pair spec is 'U-U:d,dprime,p,q'")
        return make_pair(fam, nums[0], nums[1], (nums[2], nums[3]))
    if len(nums) != 2:
        raise PairError(f"{fam} pair spec is '{fam}:d,dprime'")
    return make_pair(fam, nums[0], nums[1])


@dataclass(frozen=True)
class HCParameter:
    mu: Tuple[Fraction, ...]
    origin: str = "direct"

    @classmethod
    def from_values(cls, values: Iterable) -> "HCParameter":
        return cls(tuple(as_fraction(v) for v in values), "direct")

    @classmethod
    def from_highest_weight(cls, pair: DualPair, lam: Iterable) -> "HCParameter":
        lam = tuple(as_fraction(v) for v in lam)
        if len(lam) != pair.l:
            raise PairError(f"highest weight needs {pair.l} entries")
        return cls(tuple(a + b for a, b in zip(lam, pair.rho)), "highest_weight")

    def validate(self, pair: DualPair) -> "HCParameter":
        if len(self.mu) != pair.l:
            raise PairError(f"parameter needs {pair.l} entries, got {len(self.mu)}")
        for j in range(len(self.mu) - 1):
            if not self.mu[j] > self.mu[j + 1]:
                raise PairError("parameter is not strictly decreasing")
        for j, m in enumerate(self.mu, start=1):
            v = m + pair.delta
            if v.denominator != 1 or (-m + pair.delta).denominator != 1:
                raise IntegralityError(j, v)
        return self


def kernel_exponents(pair: DualPair, mu: HCParameter) -> list:
    """Integer pairs (a_j, b_j) = (-mu_j - delta + 1, mu_j - delta + 1)."""
    out = []
    for j, m in enumerate(mu.mu, start=1):
        a = -m - pair.delta + 1
        b = m - pair.delta + 1
        if a.denominator != 1 or b.denominator != 1:
            raise IntegralityError(j, m + pair.delta)
        out.append((int(a), int(b)))
    return out


def derivative_free(pair: DualPair) -> bool:
    """True when the delta-derivative parts are at most of order zero (2 delta - 2 <= 0)."""
    if pair.l > pair.lprime:
        raise PairError("derivative_free is defined for l <= l' only")
    return 2 * pair.delta - 2 <= 0


def delta_jets_vanish(pair: DualPair) -> bool:
    """True when every Q_{a_j,b_j} is identically zero (a_j + b_j >= 1)."""
    return 2 - 2 * pair.delta >= 1


def covering_splits(pair: DualPair) -> Tuple[bool, int]:
    """Whether the metaplectic cover splits over the compact member.

    Returns (splits, e) where the cover restricted to G is the square-root
    cover of det^e; it splits exactly when e is even.
    """
    if pair.family == "O-Sp":
        e = pair.dprime // 2
    elif pair.family == "U-U":
        p, q = pair.signature
        e = p - q
    else:
        e = 0
    return (e % 2 == 0, e)


def covering_splits_by_search(pair: DualPair) -> bool:
    """Brute-force route: look for a character zeta of G with zeta^2 = det^e.

    Candidates are tested on explicit group elements: a reflection for O_d
    (characters 1 and det), a generic diagonal unitary for U_d (characters
    det^k), and nothing for Sp_d where det is trivial.
    """
    import cmath

    _, e = covering_splits(pair)
    if pair.family == "O-Sp":
        refl_det = -1
        candidates = (lambda dt: 1, lambda dt: dt)
        return any(z(refl_det) ** 2 == refl_det ** e for z in candidates)
    if pair.family == "U-U":
        theta = math.sqrt(2) - 1
        det_val = cmath.exp(1j * theta * pair.d)
        bound = abs(e) + 2
        return any(abs(det_val ** (2 * k) - det_val ** e) < 1e-12 for k in range(-bound, bound + 1))
    return True
