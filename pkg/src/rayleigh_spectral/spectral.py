"""Weyl matrix and its spectral decomposition.

``M(xi) = F(0, xi) F_Theta(xi)^{-1}``. In ``zeta = xi^2`` the matrix is analytic off the cut
``(-inf, a^2]`` (``a = omega/sqrt(mu0)``) except for simple real poles ``zeta_j = xi_j^2 > a^2``, and

    M(zeta) = Y0 + int T(eta)/(eta - zeta) d eta + sum_j alpha_j/(zeta - zeta_j),

with ``T = (M(eta + i0) - M(eta - i0))/(2 pi i)``. Guided modes are the poles, the cut splits
into evanescent (``eta < 0``) and radiating (``0 < eta < a^2``) parts.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from scipy.special import roots_legendre

from .jost import (
    Medium,
    jost_asymptotic_coeffs,
    jost_function,
    jost_solution,
    adjoint_relation,
)
from .markushevich import boundary_matrices, inverse_transform, potential_Q, rayleigh_tractions
from .model import LameModel, boundary_theta, evaluate_profile
from .riemann import MINUS, PLUS, SheetPoint, as_point, k_to_xi, q_pair, sqrt_zeta

SINGULAR_COND = 1e13
CONTOUR_POINTS = 16


class SingularWeylError(ArithmeticError):
    """F_Theta is numerically singular (xi sits on a pole)."""


class AssumptionViolation(RuntimeError):
    pass


def _branch_speed(med: Medium):
    return med.omega / np.sqrt(med.mu0)


# ---------------------------------------------------------------------------
# Weyl matrix


def weyl_matrix(med: Medium, xi) -> np.ndarray:
    b = jost_solution(med, xi)
    F0, _ = b.at0()
    FT = jost_function(med, xi)
    cond = np.linalg.cond(FT)
    if not np.isfinite(cond) or cond > SINGULAR_COND:
        raise SingularWeylError(f"F_Theta singular at xi={as_point(xi).xi} (condition number {cond:.3e})")
    return np.linalg.solve(FT.T, F0.T).T


def weyl_matrix_adjoint(med: Medium, xi) -> np.ndarray:
    """Fa(0) Fa_Theta^{-1}; equals the transpose of M."""
    b = jost_solution(med, xi, adjoint=True)
    F0, _ = b.at0()
    FT = jost_function(med, xi, adjoint=True)
    return np.linalg.solve(FT.T, F0.T).T


def rayleigh_determinant(omega: float, xi, lambda0: float, mu0: float) -> complex:
    p = as_point(xi)
    qP, qS = q_pair(omega, lambda0, mu0, p)
    x2 = p.xi * p.xi
    return (omega**2 / mu0 - 2 * x2) ** 2 + 4 * x2 * qP * qS


def homogeneous_weyl(omega: float, lambda0: float, mu0: float, xi, printed: bool = False) -> np.ndarray:
    """Closed-form Weyl matrix of the homogeneous half-space.

    ``printed=True`` keeps an extra overall factor 1/i that appears in one published form; the
    default omits it, which is the form consistent with F(0) F_Theta^{-1}.
    """
    p = as_point(xi)
    x = p.xi
    qP, qS = q_pair(omega, lambda0, mu0, p)
    w2 = omega**2
    delta0 = -(mu0**2) / (2 * w2**2) * x * rayleigh_determinant(omega, p, lambda0, mu0)
    m = np.array(
        [
            [1j * qP, 0.5 - mu0 * x * x / w2 - mu0 * qP * qS / w2],
            [w2 / mu0 - 2 * x * x, 1j * qS],
        ],
        dtype=complex,
    )
    out = mu0 * x / (w2 * delta0) * m
    return out / 1j if printed else out


# ---------------------------------------------------------------------------
# poles and residues


def det_jost(med: Medium, xi) -> complex:
    return complex(np.linalg.det(jost_function(med, xi)))


def find_poles(med: Medium, xi_max: float | None = None, n_scan: int = 96, far: float = 50.0,
               rel_gap: float = 1e-8) -> list:
    """Real zeros of det F_Theta on (a, xi_max], largest first (xi_1 > xi_2 > ...).

    The scan is refined towards the branch point ``a`` (nodes ``a + (xi_max - a) s^2``). The
    interval is doubled while det F_Theta at ``xi_max`` still differs in sign from its value
    at ``far * a``, where no zeros remain.
    """
    a = _branch_speed(med)
    lo = a * (1 + 1e-6)
    hi = 3 * a if xi_max is None else float(xi_max)
    f = lambda x: det_jost(med, x).real
    s_far = np.sign(f(far * a))
    while np.sign(f(hi)) != s_far and hi < far * a:
        hi = min(2 * hi, far * a)
    s = np.linspace(0.0, 1.0, n_scan + 1)
    xs = lo + (hi - lo) * s**2
    vals = np.array([f(x) for x in xs])
    roots = []
    for x0, x1, v0, v1 in zip(xs[:-1], xs[1:], vals[:-1], vals[1:]):
        if v0 == 0.0:
            roots.append(x0)
        elif v0 * v1 < 0:
            roots.append(brentq(f, x0, x1, xtol=1e-13 * x1, rtol=4 * np.finfo(float).eps, maxiter=200))
    roots = sorted(roots, reverse=True)
    scale = np.max(np.abs(vals))
    for r in roots:
        h = 1e-6 * r
        slope = (f(r + h) - f(r - h)) / (2 * h)
        if abs(slope) * r < 1e-10 * scale:
            raise AssumptionViolation(f"pole at xi={r} is not simple (slope {slope:.3e})")
    for r0, r1 in zip(roots[:-1], roots[1:]):
        if r0 - r1 < rel_gap * r0:
            raise AssumptionViolation(f"poles {r1} and {r0} closer than {rel_gap:g}")
    return roots


def contour_residue(fun, center: complex, radius: float, n: int = CONTOUR_POINTS):
    """(1/2 pi i) closed integral of fun around ``center`` by the n-point trapezoid rule."""
    th = 2 * np.pi * np.arange(n) / n
    acc = 0
    for t in th:
        d = radius * np.exp(1j * t)
        acc = acc + fun(center + d) * d
    return acc / n


def contour_derivative(fun, center: complex, radius: float, n: int = CONTOUR_POINTS):
    """fun'(center) by the same circle rule."""
    th = 2 * np.pi * np.arange(n) / n
    acc = 0
    for t in th:
        d = radius * np.exp(1j * t)
        acc = acc + fun(center + d) / d
    return acc / n


@dataclass
class Residue:
    xi: float
    alpha: np.ndarray  # contour value, the reference
    alpha_adjugate: np.ndarray  # 2 xi F(0) adj F_Theta / (det F_Theta)'
    alpha_plain: np.ndarray  # F(0) (F_Theta')^{-1}
    alpha_half: np.ndarray  # (1/2 xi) F(0) (F_Theta')^{-1}
    singular_values: np.ndarray
    radius: float

    def mismatch(self) -> dict:
        n = np.max(np.abs(self.alpha))
        return {
            "adjugate": float(np.max(np.abs(self.alpha_adjugate - self.alpha)) / n),
            "plain": float(np.max(np.abs(self.alpha_plain - self.alpha)) / n),
            "half": float(np.max(np.abs(self.alpha_half - self.alpha)) / n),
        }


def _pole_radius(med: Medium, poles, j):
    a2 = _branch_speed(med) ** 2
    z = poles[j] ** 2
    gaps = [z - a2] + [abs(z - p * p) for i, p in enumerate(poles) if i != j]
    return min(gaps)


def residues(med: Medium, poles, radius: float | None = None) -> list:
    """Residues of M(zeta) at zeta_j = xi_j^2, with closed-form cross-checks."""
    out = []
    for j, xj in enumerate(poles):
        gap = _pole_radius(med, poles, j)
        r = 0.25 * gap if radius is None else float(radius)
        if r >= gap:
            raise ValueError(f"contour radius {r} reaches the cut or a neighbouring pole (gap {gap})")
        zj = xj * xj
        alpha = contour_residue(lambda z: weyl_matrix(med, np.sqrt(z)), zj, r)
        # in xi the circle must avoid the branch point and other poles as well
        rx = 0.25 * min(xj - _branch_speed(med), *[abs(xj - p) for i, p in enumerate(poles) if i != j] or [np.inf])
        dFT = contour_derivative(lambda x: jost_function(med, x), xj, rx)
        ddet = contour_derivative(lambda x: det_jost(med, x), xj, rx)
        F0 = jost_solution(med, xj).at0()[0]
        FT = jost_function(med, xj)
        adjFT = np.array([[FT[1, 1], -FT[0, 1]], [-FT[1, 0], FT[0, 0]]])
        a_adj = 2 * xj * F0 @ adjFT / ddet
        a_plain = F0 @ np.linalg.inv(dFT)
        out.append(
            Residue(
                float(xj),
                alpha,
                a_adj,
                a_plain,
                a_plain / (2 * xj),
                np.linalg.svd(alpha, compute_uv=False),
                r,
            )
        )
    return out


# ---------------------------------------------------------------------------
# branch cut


def _cut_point(med: Medium, eta: float, side: str) -> SheetPoint:
    a2 = _branch_speed(med) ** 2
    eta = float(eta)
    if eta > a2:
        raise ValueError(f"eta={eta} lies beyond the branch point {a2}")
    if abs(eta - a2) < 1e-8 * max(1.0, a2):
        raise ValueError("eta at the branch point omega^2/mu0")
    return sqrt_zeta(eta, a2, side)


def branch_density(med: Medium, eta: float, method: str = "jump") -> np.ndarray:
    """Cut density T(eta).

    ``jump``: (M(eta + i0) - M(eta - i0))/(2 pi i) with both limits computed directly.
    ``conjugate``: Im M(eta + i0)/pi, using M(conj xi) = conj M(xi).
    ``wronskian``: the Wronskian form -(xi mu0/(pi omega^2)) [Fa_Theta(-xi)^T]^{-1} diag(qP, -qS)
    F_Theta(xi)^{-1} at the upper limit. It agrees with the jump except on the band
    ``a_P^2 < eta < a^2``, where q_P does not jump.
    """
    p = _cut_point(med, eta, PLUS)
    if method == "jump":
        m = _cut_point(med, eta, MINUS)
        return (weyl_matrix(med, p) - weyl_matrix(med, m)) / (2j * np.pi)
    if method == "conjugate":
        return weyl_matrix(med, p).imag / np.pi + 0j
    if method == "wronskian":
        qP, qS = q_pair(med.omega, med.model.lambda0, med.mu0, p)
        FT = jost_function(med, p)
        FaT = jost_function(med, p.negated(), adjoint=True)
        mid = np.diag([qP, -qS])
        left = np.linalg.inv(FaT.T)
        return -(p.xi * med.mu0 / (np.pi * med.omega**2)) * left @ mid @ np.linalg.inv(FT)
    raise ValueError(f"unknown method {method!r}")


@dataclass(frozen=True)
class BranchRule:
    """Quadrature nodes on the cut with weights for d(eta)."""

    eta: np.ndarray
    weight: np.ndarray
    section: np.ndarray  # "evanescent" or "radiating"
    s0: float  # evanescent part truncated at eta = -s0^2


def _gl_panels(edges, order):
    x, w = roots_legendre(order)
    X, W = [], []
    for l, r in zip(edges[:-1], edges[1:]):
        X.append(0.5 * (r - l) * x + 0.5 * (r + l))
        W.append(0.5 * (r - l) * w)
    return np.concatenate(X), np.concatenate(W)


def branch_rule(omega: float, lambda0: float, mu0: float, depth: float = 50.0, order: int = 12,
                n_evanescent: int = 12, n_radiating: int = 4) -> BranchRule:
    """Gauss-Legendre rule on the cut.

    The evanescent part uses ``eta = -s^2`` on ``s in [0, s0]``, ``s0^2 = depth * a^2``, with
    geometrically graded panels. Each radiating piece ``[0, a_P]`` and ``[a_P, a]`` (in xi)
    uses a cosine map that clusters nodes at both branch points.
    """
    a = omega / np.sqrt(mu0)
    aP = omega / np.sqrt(lambda0 + 2 * mu0)
    s0 = np.sqrt(depth) * a
    # geometric grading towards s = 0 on both sides of s = a
    inner = a * np.geomspace(1e-3, 1.0, 7)
    edges = np.concatenate([[0.0], inner, np.geomspace(a, s0, n_evanescent + 1)[1:]])
    s, ws = _gl_panels(edges, order)
    etas = [-s * s]
    wts = [2 * s * ws]
    secs = [np.full(s.size, "evanescent")]
    th, wt = _gl_panels(np.linspace(0.0, np.pi, n_radiating + 1), order)
    for lo, hi in ((0.0, aP), (aP, a)):
        xi = lo + (hi - lo) * (1 - np.cos(th)) / 2
        dxi = (hi - lo) * np.sin(th) / 2
        etas.append(xi * xi)
        wts.append(2 * xi * dxi * wt)
        secs.append(np.full(xi.size, "radiating"))
    return BranchRule(np.concatenate(etas), np.concatenate(wts), np.concatenate(secs), float(s0))


# ---------------------------------------------------------------------------
# large-xi expansion


def _q_jet0(med: Medium):
    """Q(0), Q'(0), Q''(0) by one-sided differences inside the smooth top layer."""
    from .markushevich import breakpoints

    bps = breakpoints(med.model)
    top = bps[1] if len(bps) > 1 else 1.0
    h = min(top, 1.0) / 8
    xs = h * np.arange(5)
    Q = potential_Q(med.model, med.gmat, med.omega, xs)
    d1 = (-25 * Q[0] + 48 * Q[1] - 36 * Q[2] + 16 * Q[3] - 3 * Q[4]) / (12 * h)
    d2 = (35 * Q[0] - 104 * Q[1] + 114 * Q[2] - 56 * Q[3] + 11 * Q[4]) / (12 * h * h)
    return Q[0], d1, d2


def E_matrix(varpi: float, xi) -> np.ndarray:
    return np.array([[1.0, 0.0], [2 * varpi * xi, 1.0]], dtype=complex)


@dataclass
class WeylExpansion:
    """M(xi) = Y0 + Y1/xi + Y2/xi^2 + Y3/xi^3 + o(xi^-3) and the derived leading-order objects."""

    Y0: np.ndarray
    Y1: np.ndarray
    Y2: np.ndarray
    Y3: np.ndarray
    varpi: float
    coupling: float  # 1 - 2 varpi theta2
    b: float
    T0: np.ndarray
    T1: np.ndarray
    printed: dict = field(default_factory=dict)
    Q0: np.ndarray | None = None
    dQ0: np.ndarray | None = None
    d2Q0: np.ndarray | None = None

    def Ytilde(self, xi):
        return self.Y0 + self.Y1 / xi

    def Ytilde_inv(self, xi):
        c, w = self.coupling, self.varpi
        return xi * xi * c * np.array([[0, 0], [2 * w, 0]]) + xi * c * np.array([[-1, 0], [-2 * self.b, -1]])

    def E(self, xi):
        return E_matrix(self.varpi, xi)

    def predict(self, xi, order: int = 2):
        ys = (self.Y0, self.Y1, self.Y2, self.Y3)
        return sum(ys[k] / xi**k for k in range(order + 1))


def inverse_weyl_series(med: Medium):
    """Coefficients (A, B, C, D, E2, E3) of t^2 M^{-1} = sum t^k N_k, t = 1/xi."""
    th = boundary_theta(med.model, med.omega)
    Q, dQ, d2Q = _q_jet0(med)
    A = np.array([[0.0, 0.0], [2 * th.varpi, 0.0]])
    B = -np.eye(2)
    C = np.array([[-th.theta3, th.theta2], [-th.theta1, 0.0]])
    return [A, B, C, -Q / 2, -dQ / 4, (Q @ Q - d2Q) / 8], (Q, dQ, d2Q)


def weyl_asymptotics(med: Medium, radius: float = 0.05, n: int = 64) -> WeylExpansion:
    """Y0..Y3 by inverting the large-xi series of M^{-1} on a small circle in t = 1/xi."""
    th = boundary_theta(med.model, med.omega)
    N, (Q, dQ, d2Q) = inverse_weyl_series(med)
    t = radius * np.exp(2j * np.pi * np.arange(n) / n)
    Ms = np.array([tt * tt * np.linalg.inv(sum(Nk * tt**k for k, Nk in enumerate(N))) for tt in t])
    coef = np.fft.fft(Ms, axis=0) / n
    Y = [(coef[k] / radius**k).real for k in range(4)]
    c = th.coupling
    b = 0.5 * Y[1][1, 0] * c
    w = th.varpi
    P = c * np.array([[0.0, 0.0], [2 * w, 0.0]])
    R = c * np.array([[-1.0, 0.0], [-2 * b, -1.0]])
    T0 = np.eye(2) + Y[2] @ P
    T1 = -(Y[2] @ R + Y[3] @ P)
    exp = WeylExpansion(Y[0], Y[1], Y[2], Y[3], w, c, b, T0, T1, Q0=Q, dQ0=dQ, d2Q0=d2Q)
    exp.printed = printed_weyl_coefficients(th, Q, dQ)
    return exp


def printed_weyl_coefficients(th, Q, dQ) -> dict:
    """Y0, Y1, Y2 and T0 exactly as the entry formulas are commonly stated (for comparison)."""
    w, t1, t2, t3 = th.varpi, th.theta1, th.theta2, th.theta3
    c = 1 - 2 * w * t2
    y121 = (1 - w) * Q[0, 1] / (c * t2) + 2 * w * (t3 + w * Q[0, 1]) / c
    y211 = 0.5 * y121
    y212 = -t2
    y221 = (dQ[0, 1] - y121 * Q[0, 1] + Q[0, 0] + Q[1, 1] - y121 * t3 + t1) / (1 - 2 * t2)
    y222 = (w * Q[0, 1] + 2 * w * t2 * t3) / c
    b = 0.5 * y121
    return {
        "Y0": np.array([[0.0, 0.0], [-2 * w, 0.0]]) / c,
        "Y1": np.array([[-1.0, 0.0], [y121, -1.0]]) / c,
        "Y2": np.array([[y211, y212], [y221, y222]]) / c,
        "T0": np.array([[1 - 2 * w * t1, 0.0], [2 * w * (b - t3), 1.0]]),
    }


# ---------------------------------------------------------------------------
# Cauchy representation


@dataclass
class CauchyParts:
    constant: np.ndarray
    evanescent: np.ndarray
    evanescent_tail: np.ndarray
    radiating: np.ndarray
    guided: np.ndarray
    tail_bound: float

    @property
    def total(self):
        return self.constant + self.evanescent + self.evanescent_tail + self.radiating + self.guided


def _tail(Y1, Y3, s0, zeta, a2):
    """Evanescent cut beyond eta = -s0^2 from T(-s^2) ~ -Y1/(pi s) + Y3/(pi s^3).

    The bound scales the Y3 part by a^2/s0^2, the size of the first neglected correction.
    """
    sz = np.sqrt(complex(zeta))
    at = np.pi / 2 - np.arctan(s0 / sz)
    i1 = at / sz
    i3 = (1 / s0 - at / sz) / zeta
    lead = (2 * Y1 / np.pi) * i1
    nxt = -(2 * Y3 / np.pi) * i3
    return lead + nxt, float(np.max(np.abs(nxt))) * a2 / s0**2


def cauchy_reconstruct(data: "SpectralData", zeta: complex, tol: float = 1e-3) -> CauchyParts:
    zeta = complex(zeta)
    a2 = data.omega**2 / data.mu0
    if zeta.imag == 0 and zeta.real <= a2:
        raise ValueError("zeta lies on the cut")
    if any(abs(zeta - p * p) < 1e-12 * max(1.0, p * p) for p in data.poles):
        raise ValueError("zeta coincides with a pole")
    eta, wts, T = data.branch_eta, data.branch_weight, data.branch_T
    contrib = (wts / (eta - zeta))[:, None, None] * T
    ev = data.branch_section == "evanescent"
    tail, bound = _tail(data.Y[1], data.Y[3], data.s0, zeta, a2)
    guided = sum((al / (zeta - p * p) for p, al in zip(data.poles, data.residues)), np.zeros((2, 2), complex))
    return CauchyParts(
        data.Y[0].astype(complex),
        contrib[ev].sum(axis=0),
        tail,
        contrib[~ev].sum(axis=0),
        guided,
        bound,
    )


# ---------------------------------------------------------------------------
# Neumann-to-Dirichlet map and boundary matrix


def _mu_at0(model: LameModel):
    return float(evaluate_profile(model, "mu", 0.0)), float(evaluate_profile(model, "mu", 0.0, 1))


def nd_from_weyl(model: LameModel, M, xi) -> np.ndarray:
    xi = complex(xi)
    m, m1 = _mu_at0(model)
    mu0 = model.mu0
    left = np.array([[1j * mu0 / m, 0], [0, 0]]) + np.array([[0, 0.5j], [-mu0 / m * xi, 0]]) @ M
    right = np.array([[1 / (2 * mu0 * xi), 0], [m1 / m**2 / xi, 1j / m]])
    return left @ right


def nd_map(med: Medium, xi) -> np.ndarray:
    """Neumann-to-Dirichlet map of the Rayleigh problem from the Weyl matrix."""
    return nd_from_weyl(med.model, weyl_matrix(med, xi), as_point(xi).xi)


def boundary_displacement(med: Medium, xi):
    """Rayleigh displacements w(0) and the boundary matrix B(w) of the Jost solution."""
    p = as_point(xi)
    F0, Fp0 = jost_solution(med, p).at0()
    w, wp = inverse_transform(med.model, med.gmat, med.omega, F0, Fp0, p.xi, 0.0)
    b_, a_ = rayleigh_tractions(med.model, w, wp, p.xi, 0.0)
    return w, np.array([b_, a_])


def boundary_matrix(med: Medium, xi) -> np.ndarray:
    return boundary_displacement(med, xi)[1]


def nd_map_direct(med: Medium, xi) -> np.ndarray:
    """ND from displacement over traction of the Jost solution, in the Z-oriented variables."""
    w, B = boundary_displacement(med, xi)
    flip = np.array([[0, 1j], [-1, 0]])
    return np.diag([1j, 1.0]) @ w @ np.linalg.inv(B) @ flip


@dataclass
class BoundaryIdentities:
    jost_from_B: float  # |F_Theta - Da^{-1} B(w)|
    adjoint_from_B: float  # |Fa_Theta - D^{-1} B(w)|
    adjoint_relation: float  # |Fa_Theta - R F_Theta|
    nd: float  # |ND(M) - ND(direct)|


def boundary_identities(med: Medium, xi) -> BoundaryIdentities:
    p = as_point(xi)
    bm = boundary_matrices(med.model, med.omega, p.xi)
    B = boundary_matrix(med, p)
    FT = jost_function(med, p)
    FaT = jost_function(med, p, adjoint=True)
    rel = lambda u, v: float(np.max(np.abs(u - v)) / max(np.max(np.abs(v)), 1e-300))
    return BoundaryIdentities(
        rel(np.linalg.solve(bm.Da, B), FT),
        rel(np.linalg.solve(bm.D, B), FaT),
        rel(adjoint_relation(med, p) @ FT, FaT),
        rel(nd_map(med, p), nd_map_direct(med, p)),
    )


# ---------------------------------------------------------------------------
# spectral data


def _cm(m):
    return [[float(v.real), float(v.imag)] for v in np.asarray(m, dtype=complex).ravel()]


def _from_cm(rows):
    return np.array([complex(r, i) for r, i in rows]).reshape(2, 2)


def _rm(m):
    return [float(v) for v in np.asarray(m, dtype=float).ravel()]


def _from_rm(v):
    return np.asarray(v, dtype=float).reshape(2, 2)


@dataclass
class SpectralData:
    """Boundary spectral data at one frequency plus the model constants the inversion needs."""

    omega: float
    mu0: float
    lambda0: float
    H: float
    mu_at0: float
    dmu_at0: float
    theta: dict
    poles: list
    residues: list
    branch_eta: np.ndarray
    branch_weight: np.ndarray
    branch_section: np.ndarray
    branch_T: np.ndarray
    s0: float
    Y: list  # Y0..Y3
    T0: np.ndarray
    T1: np.ndarray
    b: float
    jost_boundary: dict  # measured lead and next; closed-form shift and correction for comparison
    k_grid: np.ndarray = field(default_factory=lambda: np.zeros(0))
    m_plus: np.ndarray = field(default_factory=lambda: np.zeros((0, 2, 2), complex))
    model_hash: str = ""

    @property
    def varpi(self):
        return self.theta["varpi"]

    def to_dict(self) -> dict:
        return {
            "omega": self.omega,
            "model": {
                "mu0": self.mu0,
                "lambda0": self.lambda0,
                "H": self.H,
                "mu_at0": self.mu_at0,
                "dmu_at0": self.dmu_at0,
                "hash": self.model_hash,
            },
            "theta": dict(self.theta),
            "poles": [float(p) for p in self.poles],
            "residues": [_cm(a) for a in self.residues],
            "branch": [
                {"eta": float(e), "weight": float(w), "section": str(s), "T": _cm(t)}
                for e, w, s, t in zip(self.branch_eta, self.branch_weight, self.branch_section, self.branch_T)
            ],
            "branch_s0": self.s0,
            "Y": {f"Y{k}": _rm(y) for k, y in enumerate(self.Y)} | {"T0": _rm(self.T0), "T1": _rm(self.T1), "b": self.b},
            "jost_boundary": {k: _rm(v) for k, v in self.jost_boundary.items()},
            "m_plus": [{"k": float(k), "M": _cm(m)} for k, m in zip(self.k_grid, self.m_plus)],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SpectralData":
        try:
            br = d["branch"]
            Yd = d["Y"]
            md = d["model"]
            return cls(
                omega=float(d["omega"]),
                mu0=float(md["mu0"]),
                lambda0=float(md["lambda0"]),
                H=float(md["H"]),
                mu_at0=float(md["mu_at0"]),
                dmu_at0=float(md["dmu_at0"]),
                theta={k: float(v) for k, v in d["theta"].items()},
                poles=[float(p) for p in d["poles"]],
                residues=[_from_cm(a) for a in d["residues"]],
                branch_eta=np.array([b["eta"] for b in br], dtype=float),
                branch_weight=np.array([b["weight"] for b in br], dtype=float),
                branch_section=np.array([b["section"] for b in br]),
                branch_T=np.array([_from_cm(b["T"]) for b in br]).reshape(-1, 2, 2),
                s0=float(d["branch_s0"]),
                Y=[_from_rm(Yd[f"Y{k}"]) for k in range(4)],
                T0=_from_rm(Yd["T0"]),
                T1=_from_rm(Yd["T1"]),
                b=float(Yd["b"]),
                jost_boundary={k: _from_rm(v) for k, v in d["jost_boundary"].items()},
                k_grid=np.array([m["k"] for m in d.get("m_plus", [])], dtype=float),
                m_plus=np.array([_from_cm(m["M"]) for m in d.get("m_plus", [])]).reshape(-1, 2, 2),
                model_hash=str(md.get("hash", "")),
            )
        except KeyError as exc:
            raise ValueError(f"spectral data is missing field {exc}") from None

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=1)

    @classmethod
    def from_json(cls, path) -> "SpectralData":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def fit_jost_boundary(med: Medium, lo: float = 30.0, hi: float = 300.0, n: int = 14, degree: int = 6) -> dict:
    """Measure the two leading coefficients of F(0, xi) = xi*lead + next + O(1/xi).

    Least squares in 1/xi over real xi in a*[lo, hi] (geometric). ``next`` is the full order-one
    term, i.e. the shift plus the potential correction.
    """
    a = _branch_speed(med)
    xs = a * np.geomspace(lo, hi, n)
    F = np.array([jost_solution(med, x).at0()[0].real / x for x in xs])
    A = np.vander(1 / xs, degree + 1, increasing=True)
    C = np.linalg.lstsq(A, F.reshape(n, 4), rcond=None)[0].reshape(degree + 1, 2, 2)
    return {"lead": C[0], "next": C[1]}


def model_hash(model: LameModel) -> str:
    import hashlib

    return hashlib.sha256(json.dumps(model.to_dict(), sort_keys=True).encode()).hexdigest()[:16]


def weyl_on_real_k(med: Medium, k) -> np.ndarray:
    """M_+(k) = M(xi(k)) for real k > 0; M_+(-k) is the complex conjugate."""
    return np.array([weyl_matrix(med, k_to_xi(med.omega, med.mu0, kk)) for kk in np.atleast_1d(k)])


def spectral_data(med: Medium, rule: BranchRule | None = None, k_grid=None, xi_max=None) -> SpectralData:
    """Full forward computation of the boundary spectral data at ``med.omega``."""
    model = med.model
    rule = rule or branch_rule(med.omega, model.lambda0, model.mu0)
    poles = find_poles(med, xi_max)
    res = residues(med, poles)
    T = np.array([branch_density(med, e, "conjugate") for e in rule.eta])
    wx = weyl_asymptotics(med)
    ja = jost_asymptotic_coeffs(med)
    fit = fit_jost_boundary(med)
    th = boundary_theta(model, med.omega)
    m, m1 = _mu_at0(model)
    kg = np.zeros(0) if k_grid is None else np.asarray(k_grid, dtype=float)
    mp = weyl_on_real_k(med, kg) if kg.size else np.zeros((0, 2, 2), complex)
    return SpectralData(
        omega=med.omega,
        mu0=model.mu0,
        lambda0=model.lambda0,
        H=model.H,
        mu_at0=m,
        dmu_at0=m1,
        theta={"theta1": th.theta1, "theta2": th.theta2, "theta3": th.theta3, "varpi": th.varpi},
        poles=list(poles),
        residues=[r.alpha for r in res],
        branch_eta=rule.eta,
        branch_weight=rule.weight,
        branch_section=rule.section,
        branch_T=T,
        s0=rule.s0,
        Y=[wx.Y0, wx.Y1, wx.Y2, wx.Y3],
        T0=wx.T0,
        T1=wx.T1,
        b=wx.b,
        jost_boundary={"lead": fit["lead"], "next": fit["next"], "shift": ja.shift, "correction": ja.correction},
        k_grid=kg,
        m_plus=mp,
        model_hash=model_hash(model),
    )
