"""Schroedinger-model ground truth for one degree of freedom.

Conventions (n = 1):
    W = R^2 with points w = (x, eta); X is the x-axis, Y the eta-axis.
    <(x1, eta1), (x2, eta2)> = eta1 x2 - x1 eta2,  chi(r) = exp(2 pi i r).
    K(f)(x, x') = int f(x - x', eta) exp(pi i eta (x + x')) d eta.
    Op(K) v(x) = int K(x, x') v(x') dx'.
    T(g~) = xi chi_{c(g)} mu_{(g-1)W},  omega = Op o K o T.
Hermite functions h_k are orthonormal for dx, with h_0 = 2^{1/4} exp(-pi x^2).
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np

OMEGA = np.array([[0.0, -1.0], [1.0, 0.0]])
J0 = np.array([[0.0, -1.0], [1.0, 0.0]])


def symplectic_pairing(w1: np.ndarray, w2: np.ndarray) -> float:
    return float(w1 @ OMEGA @ w2)


def rotation(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def hermite_functions(x: np.ndarray, count: int) -> np.ndarray:
    """Columns h_0 .. h_{count-1} evaluated at x (three-term recurrence)."""
    x = np.asarray(x, dtype=float)
    out = np.zeros((x.size, count))
    out[:, 0] = 2 ** 0.25 * np.exp(-math.pi * x * x)
    if count > 1:
        out[:, 1] = 2 * math.sqrt(math.pi) * x * out[:, 0]
    for k in range(1, count - 1):
        out[:, k + 1] = (2 * math.sqrt(math.pi) * x * out[:, k] - math.sqrt(k) * out[:, k - 1]) / math.sqrt(k + 1)
    return out


@dataclass
class HermiteModel:
    cutoff: int = 32
    npts: int = 256
    extent: float = 6.0
    x: np.ndarray = field(init=False, repr=False)
    dx: float = field(init=False)
    basis: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.npts % 2:
            raise ValueError("npts must be even")
        self.dx = 2 * self.extent / (self.npts - 1)
        self.x = (np.arange(self.npts) - (self.npts - 1) / 2) * self.dx
        self.basis = hermite_functions(self.x, self.cutoff)

    @property
    def deta(self) -> float:
        return 2.0 / (self.npts * self.dx)

    @property
    def eta(self) -> np.ndarray:
        m = np.arange(-self.npts // 2, self.npts // 2)
        return m * self.deta

    @property
    def lags(self) -> np.ndarray:
        return np.arange(-(self.npts - 1), self.npts) * self.dx

    def gram_error(self) -> float:
        g = self.basis.T @ self.basis * self.dx
        return float(np.max(np.abs(g - np.eye(self.cutoff))))

    def to_hermite(self, op_grid: np.ndarray) -> np.ndarray:
        """<h_j, A h_k> for an operator given as a grid matrix acting on samples."""
        return self.basis.T @ op_grid @ self.basis * self.dx

    def kernel_from_hermite(self, a: np.ndarray) -> np.ndarray:
        return self.basis @ a @ self.basis.T

    def parity(self) -> np.ndarray:
        return np.fliplr(np.eye(self.npts))


# ---------------------------------------------------------------------------
# structured grid symbols and the discrete Weyl transform
# ---------------------------------------------------------------------------

@dataclass
class GridSymbol:
    """delta_coeff * delta_W + mu_coeff * mu_W + smooth(u, eta)."""

    smooth: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None
    delta_coeff: complex = 0.0
    mu_coeff: complex = 0.0


def weyl_transform_K(symbol: GridSymbol, model: HermiteModel) -> np.ndarray:
    """Kernel matrix K(f)(x_i, x_j) on the position grid.

    The eta integral is a DFT on the grid eta_m = m * deta, so that
    eta_m (x_i + x_j) pi = 2 pi m (i + j - N + 1) / N exactly.
    """
    n, dx = model.npts, model.dx
    kern = np.zeros((n, n), dtype=complex)
    if symbol.delta_coeff:
        kern += symbol.delta_coeff * np.eye(n) / dx
    if symbol.mu_coeff:
        kern += symbol.mu_coeff * (2.0 / dx) * model.parity()
    if symbol.smooth is not None:
        m = np.arange(-n // 2, n // 2)
        eta = m * model.deta
        lags = np.arange(-(n - 1), n)
        u = lags * dx
        vals = symbol.smooth(u[:, None], eta[None, :])  # (2n-1, n)
        wrapped = np.zeros((lags.size, n), dtype=complex)
        wrapped[:, m % n] = vals
        # F[d, s] = sum_m f(u_d, eta_m) exp(2 pi i m s / N)
        F = np.fft.ifft(wrapped, axis=1) * n * model.deta
        i, j = np.indices((n, n))
        d = i - j + (n - 1)
        s = (i + j - n + 1) % n
        kern += F[d, s]
    return kern


def op_matrix(kernel: np.ndarray, model: HermiteModel) -> np.ndarray:
    return kernel * model.dx


def wigner_symbol_grid(kernel: np.ndarray, model: HermiteModel) -> np.ndarray:
    """Inverse Weyl transform f(u_d, eta_m) on the (lag, eta) grid.

    f(u, eta) = 1/2 int K(u, s) exp(-pi i eta s) ds with s = x + x'; on the
    grid s advances by 2 dx along each lag diagonal.
    """
    n, dx = model.npts, model.dx
    lags = np.arange(-(n - 1), n)
    m = np.arange(-n // 2, n // 2)
    out = np.zeros((lags.size, n), dtype=complex)
    for r, d in enumerate(lags):
        diag = np.diagonal(kernel, offset=-d)  # entries with i - j = d
        j0 = max(0, -d)
        jj = j0 + np.arange(diag.size)
        s_idx = 2 * jj + d - n + 1
        phase = np.exp(-2j * math.pi * np.outer(m, s_idx) / n)
        out[r] = phase @ diag * dx
    return out


def wigner_symbol_on_axis(kernel: np.ndarray, model: HermiteModel) -> Tuple[np.ndarray, np.ndarray]:
    """f(u_d, 0) = sum_{i-j=d} K(x_i, x_j) dx, returned with the lags u_d."""
    n = model.npts
    lags = np.arange(-(n - 1), n)
    vals = np.array([np.sum(np.diagonal(kernel, offset=-d)) for d in lags]) * model.dx
    return lags * model.dx, vals


def wigner_symbol(a_hermite: np.ndarray, model: HermiteModel) -> np.ndarray:
    """Grid symbol of an operator given by its truncated Hermite matrix."""
    return wigner_symbol_grid(model.kernel_from_hermite(a_hermite), model)


# ---------------------------------------------------------------------------
# metaplectic lifts
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LiftedElement:
    g: np.ndarray
    xi: complex

    def is_identity(self, tol: float = 1e-12) -> bool:
        return np.allclose(self.g, np.eye(2), atol=tol)

    def is_minus_identity(self, tol: float = 1e-12) -> bool:
        return np.allclose(self.g, -np.eye(2), atol=tol)


def xi_squared(g: np.ndarray, tol: float = 1e-12) -> complex:
    """i^{dim (g-1)W} det(J^{-1}(g-1))^{-1} on (g-1)W (full rank or zero only)."""
    gm1 = g - np.eye(2)
    rank = np.linalg.matrix_rank(gm1, tol=tol)
    if rank == 0:
        return 1.0 + 0j
    if rank != 2:
        raise NotImplementedError("g - 1 of rank one is not supported")
    return (1j) ** 2 / np.linalg.det(np.linalg.inv(J0) @ gm1)


def lift(g: np.ndarray) -> Tuple[LiftedElement, LiftedElement]:
    xi = cmath.sqrt(xi_squared(g))
    return LiftedElement(np.array(g, dtype=float), xi), LiftedElement(np.array(g, dtype=float), -xi)


def lift_rotation(theta: float) -> LiftedElement:
    """Continuous lift of theta -> R_theta; theta is read modulo 4 pi."""
    t = math.fmod(theta, 4 * math.pi)
    if t < 0:
        t += 4 * math.pi
    g = rotation(t)
    if abs(t) < 1e-14 or abs(t - 4 * math.pi) < 1e-14:
        return LiftedElement(np.eye(2), 1.0 + 0j)
    if abs(t - 2 * math.pi) < 1e-14:
        return LiftedElement(np.eye(2), -1.0 + 0j)
    return LiftedElement(g, 1j / (2 * math.sin(t / 2)))


def center_lifts(dimW: int = 2) -> list:
    zeta = (0.5j) ** (dimW // 2)
    one, minus = np.eye(2), -np.eye(2)
    return [LiftedElement(one, 1.0 + 0j), LiftedElement(one, -1.0 + 0j),
            LiftedElement(minus, zeta), LiftedElement(minus, -zeta)]


def cayley_sp(g: np.ndarray) -> np.ndarray:
    return (g + np.eye(2)) @ np.linalg.inv(g - np.eye(2))


def chi_quadratic_form(g: np.ndarray) -> np.ndarray:
    """Symmetric S with chi_{c(g)}(w) = exp(i w^T S w), i.e. chi(1/4 <c(g) w, w>)."""
    m = cayley_sp(g).T @ OMEGA
    return 0.5 * math.pi * 0.5 * (m + m.T)


def _coeff_even(p: complex, m: int) -> complex:
    if m < 0 or m % 2:
        return 0.0
    return p ** (m // 2) / math.factorial(m // 2)


def omega_hermite(gt: LiftedElement, cutoff: int) -> np.ndarray:
    """Matrix <h_j, omega(g~) h_k> for j, k < cutoff.

    Central elements use T = xi delta or xi mu_W.  Otherwise T is the Gaussian
    xi exp(i w^T S w); its Weyl kernel is a complex Gaussian in (x, x') and
    the Hermite matrix follows from the generating function
    sum_k h_k(x) s^k / sqrt(k!) = 2^{1/4} exp(-pi x^2 + 2 sqrt(pi) s x - s^2/2).
    """
    k = np.arange(cutoff)
    if gt.is_identity():
        return gt.xi * np.eye(cutoff, dtype=complex)
    if gt.is_minus_identity():
        return 2 * gt.xi * np.diag((-1.0) ** k).astype(complex)
    S = chi_quadratic_form(gt.g)
    s11, s12, s22 = S[0, 0], S[0, 1], S[1, 1]
    if abs(s22) < 1e-14:
        raise NotImplementedError("degenerate eta-quadratic part")
    a = -1j * s22
    pref = gt.xi * cmath.sqrt(math.pi / a)
    c1, c2 = 2 * s12 + math.pi, -2 * s12 + math.pi
    A1 = s11 - c1 * c1 / (4 * s22)
    A2 = s11 - c2 * c2 / (4 * s22)
    B = -2 * s11 - 2 * c1 * c2 / (4 * s22)
    Q = np.array([[2 * math.pi - 2j * A1, -1j * B], [-1j * B, 2 * math.pi - 2j * A2]])
    lam = np.linalg.eigvals(Q)
    sqrt_det = cmath.sqrt(lam[0]) * cmath.sqrt(lam[1])
    Qi = np.linalg.inv(Q)
    p1 = 2 * math.pi * Qi[0, 0] - 0.5
    p2 = 2 * math.pi * Qi[1, 1] - 0.5
    q = 4 * math.pi * Qi[0, 1]
    c0 = pref * math.sqrt(2) * 2 * math.pi / sqrt_det
    out = np.zeros((cutoff, cutoff), dtype=complex)
    fact = [math.factorial(i) for i in range(cutoff)]
    for j in range(cutoff):
        for kk in range(cutoff):
            acc = 0j
            for n in range(min(j, kk) + 1):
                e1 = _coeff_even(p1, j - n)
                e2 = _coeff_even(p2, kk - n)
                if e1 and e2:
                    acc += q ** n / fact[n] * e1 * e2
            out[j, kk] = math.sqrt(fact[j] * fact[kk]) * c0 * acc
    return out


def omega_grid(gt: LiftedElement, model: HermiteModel) -> np.ndarray:
    """Same operator through the discrete Weyl transform of T(g~) (Hermite matrix)."""
    if gt.is_identity():
        sym = GridSymbol(delta_coeff=gt.xi)
    elif gt.is_minus_identity():
        sym = GridSymbol(mu_coeff=gt.xi)
    else:
        S = chi_quadratic_form(gt.g)
        sym = GridSymbol(smooth=lambda u, e: gt.xi * np.exp(1j * (S[0, 0] * u * u + 2 * S[0, 1] * u * e + S[1, 1] * e * e)))
    return model.to_hermite(op_matrix(weyl_transform_K(sym, model), model))


def multiply_lifts_projectively(g1: LiftedElement, g2: LiftedElement, cutoff: int) -> float:
    """min over the two lifts of g1 g2 of ||omega(g1)omega(g2) - omega(lift)||."""
    lhs = omega_hermite(g1, cutoff) @ omega_hermite(g2, cutoff)
    errs = [np.linalg.norm(lhs - omega_hermite(h, cutoff), 2) for h in lift(g1.g @ g2.g)]
    return float(min(errs))


def central_character(parity: int, z: LiftedElement) -> complex:
    """chi_+ (parity=+1) or chi_- (parity=-1): Theta/|Theta| times epsilon(z)."""
    val = z.xi / abs(z.xi)
    if parity < 0 and z.is_minus_identity():
        val = -val
    return val


def central_character_check(cutoff: int = 32) -> float:
    """max deviation of omega(z~) restricted to even/odd Hermite functions from chi_+-."""
    worst = 0.0
    k = np.arange(cutoff)
    for z in center_lifts(2):
        diag = np.diag(omega_hermite(z, cutoff))
        even, odd = diag[k % 2 == 0], diag[k % 2 == 1]
        worst = max(worst, float(np.max(np.abs(even - central_character(1, z)))))
        worst = max(worst, float(np.max(np.abs(odd - central_character(-1, z)))))
    return worst


def center_section_exists(dimW: int) -> bool:
    """Search for a multiplicative section z -> z~ of the cover over {+-1}.

    (-1; +-zeta)^2 = (1; zeta^2 C(-1,-1)) with C(-1,-1) = 2^{dim W}.
    """
    zeta = (0.5j) ** (dimW // 2)
    for xi in (zeta, -zeta):
        square = xi * xi * 2 ** dimW
        if abs(square - 1) < 1e-12:
            return True
    return False


# ---------------------------------------------------------------------------
# isotypic projectors
# ---------------------------------------------------------------------------

def projector_O1(parity: int, cutoff: int) -> np.ndarray:
    """(d/2) omega(check chi) as 1/4 sum over the centre."""
    out = np.zeros((cutoff, cutoff), dtype=complex)
    for z in center_lifts(2):
        out += np.conj(central_character(parity, z)) * omega_hermite(z, cutoff)
    return out / 4


def u1_lift(phi: float, orientation: int) -> LiftedElement:
    """Lift of e^{i phi} in U_1 acting on W; ``orientation`` = +-1 is the rotation sense."""
    return lift_rotation(orientation * phi)


def projector_U1(mu: float, cutoff: int, orientation: int, nodes: int = 512) -> np.ndarray:
    """(d/2) int_{G~} omega(g~) check Theta(g~) dg~ with mass(G~) = 2 (phi in (0, 4 pi)).

    Midpoint nodes avoid phi = 0 and phi = 2 pi.
    """
    acc = np.zeros((cutoff, cutoff), dtype=complex)
    for n in range(nodes):
        phi = (n + 0.5) * 4 * math.pi / nodes
        acc += omega_hermite(u1_lift(phi, orientation), cutoff) * cmath.exp(-1j * mu * phi)
    return 0.5 * acc / nodes * 2  # (1/2) * mean * mass 2


# ---------------------------------------------------------------------------
# symbol validation
# ---------------------------------------------------------------------------

@dataclass
class FitReport:
    constant: complex
    scale: float
    residuals: dict
    per_k_scale: dict
    shared_ok: bool


def u1u1_realization_data():
    """Darboux basis of W for (U_1, U_1^{(1,0)}) and the rotation sense of U_1.

    Returns (orientation, y_of_radius2) with y = coefficient of J in tau(w)
    as a multiple of x^2 + eta^2.
    """
    from .cayley_geometry import PairRealization
    from .pair_catalog import make_pair

    real = PairRealization(make_pair("U-U", 1, 1, (1, 0)))
    b1 = real.odd(np.array([[1.0 + 0j]]))
    b2 = real.odd(np.array([[1j]]))
    form = real.symplectic_form(b2, b1)  # <b2, b1>
    t = 1 / math.sqrt(abs(form))
    e, f = t * b1, math.copysign(t, form) * b2  # <f, e> = 1, U_1 acts by rotations
    phi = 0.3
    ge = real.odd(cmath.exp(1j * phi) * e[:1, 1:])
    # g e = x e + eta f  with  x = <f, g e>,  eta = <g e, e>
    x_c = real.symplectic_form(f, ge)
    eta_c = real.symplectic_form(ge, e)
    orientation = 1 if math.atan2(eta_c, x_c) > 0 else -1
    tau = real.moment_maps(e + f).tau[0, 0]
    y = (tau / (-1j)).real / 2.0  # |w|^2 = 2 at x = eta = 1
    return orientation, y


def closed_form_u1(k: int, y: np.ndarray, scale: float) -> np.ndarray:
    """e^{-i pi mu} P_{-k,k+1}(scale*y) e^{-scale|y|} for mu = k + 1/2."""
    from .kernel_functions import P_ab

    kern = P_ab(-k, k + 1).with_scale(scale)
    return cmath.exp(-1j * math.pi * (k + 0.5)) * kern(y)


def u1u1_oracle_profiles(kmax: int = 5, cutoff: int = 32, npts: int = 256, extent: float = 6.0,
                         nodes: int = 512, umax: float = 5.0):
    """Grid symbols of (2/d) x projector on the Cartan slice for k = 0..kmax."""
    orientation, ycoef = u1u1_realization_data()
    model = HermiteModel(cutoff, npts, extent)
    profiles = {}
    y_vals = None
    for k in range(kmax + 1):
        proj = projector_U1(k + 0.5, cutoff, orientation, nodes)
        kern = model.kernel_from_hermite(2 * proj)
        u, vals = wigner_symbol_on_axis(kern, model)
        sel = (u > 0) & (u <= umax)
        y_vals = ycoef * u[sel] ** 2
        profiles[k] = vals[sel]
    return y_vals, profiles, orientation


def fit_u1u1(y: np.ndarray, profiles: dict, smin: float = 1.0, smax: float = 10.0) -> FitReport:
    from scipy.optimize import minimize_scalar

    ks = sorted(profiles)

    def solve(scale, subset):
        num, den = 0j, 0.0
        for k in subset:
            m = closed_form_u1(k, y, scale)
            num += np.vdot(m, profiles[k])
            den += float(np.vdot(m, m).real)
        c = num / den
        res = sum(float(np.linalg.norm(profiles[k] - c * closed_form_u1(k, y, scale)) ** 2) for k in subset)
        return c, res

    opt = minimize_scalar(lambda s: solve(s, ks)[1], bounds=(smin, smax), method="bounded",
                          options={"xatol": 1e-10})
    scale = float(opt.x)
    const, _ = solve(scale, ks)
    residuals = {}
    for k in ks:
        model = const * closed_form_u1(k, y, scale)
        residuals[k] = float(np.linalg.norm(profiles[k] - model) / np.linalg.norm(profiles[k]))
    per_k = {}
    for k in ks:
        o = minimize_scalar(lambda s: solve(s, [k])[1], bounds=(smin, smax), method="bounded",
                            options={"xatol": 1e-10})
        per_k[k] = float(o.x)
    spread = max(per_k.values()) / min(per_k.values()) - 1
    return FitReport(complex(const), scale, residuals, per_k, spread <= 0.01)


def o1_operator_identity(parity: int = 1, model: HermiteModel | None = None) -> dict:
    """Compare Op(K(delta + parity/2 mu_W)) with twice the isotypic projector.

    The left side goes through the discrete Weyl transform on the grid, the
    right side through the central sum of metaplectic operators in the
    Hermite basis.  Also reports the grid symbol recovered from the kernel:
    the flat part sits on the odd lags (value 2 * parity/2) and the delta
    part in the lag-0, eta-0 cell.
    """
    model = model or HermiteModel()
    sym = GridSymbol(delta_coeff=1.0, mu_coeff=parity / 2)
    kern = weyl_transform_K(sym, model)
    lhs = model.to_hermite(op_matrix(kern, model))
    rhs = 2 * projector_O1(parity, model.cutoff)
    err = float(np.linalg.norm(lhs - rhs, 2))
    f = wigner_symbol_grid(kern, model)
    n = model.npts
    lags = np.arange(-(n - 1), n)
    odd = (lags % 2 == 1) & (np.abs(lags) < n // 2)
    even = (lags % 2 == 0) & (lags != 0) & (np.abs(lags) < n // 2)
    return {
        "operator_error": err,
        "odd_lag_value": complex(np.mean(f[odd])),
        "even_lag_value": complex(np.mean(f[even])),
        "mu_coeff_recovered": complex(np.mean(f[odd | even])) * (np.sum(odd | even) / np.sum(odd)) / 2,
        # lag 0, eta = 0 cell; eta = -1/(2dx) is its alias with opposite sign
        "delta_coeff_recovered": complex(f[n - 1, n // 2] * model.deta * model.dx) / 2,
    }
