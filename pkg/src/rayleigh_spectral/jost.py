"""Jost solutions, Jost functions, regular solutions and Wronskians of the transformed problem.

The transformed equation is ``F'' = (Q(x) + xi^2) F``. Below the slab Q equals the affine background
Q0, whose solutions are explicit. The Jost solution is the one matching the explicit background
solution below the slab; inside the slab it solves

    F(x) = F0(x) - int_x^H Gr(x, y) V(y) F(y) dy,

with ``Gr`` the Green's function of the background. The kernel is a sum of exponentials
``exp(+-i q (x - y))`` with affine matrix coefficients, so each column is scaled by its own
``exp(i q_c x)`` and every sweep of the successive substitution reduces to first-order linear
recurrences along the grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter

from .markushevich import (
    DEFAULT_STEPS,
    TransformG,
    boundary_matrices,
    potential_Q,
    potential_Q0,
    segments,
    solve_G,
)
from .model import LameModel, boundary_theta, evaluate_profile
from .riemann import SheetPoint, as_point, q_pair

VOLTERRA_TOL = 1e-12
VOLTERRA_MAXITER = 200
ROUNDOFF_FLOOR = 1e-9


@dataclass
class Medium:
    """Frequency-dependent data shared by every evaluation at one omega."""

    model: LameModel
    gmat: TransformG
    omega: float
    grid: np.ndarray
    Q: np.ndarray
    V: np.ndarray
    cache: dict = field(default_factory=dict, repr=False)

    @property
    def mu0(self):
        return self.model.mu0

    @property
    def H(self):
        return self.model.H

    @property
    def GH(self):
        return self.gmat.GH

    def theta(self):
        return boundary_theta(self.model, self.omega)

    def Theta(self, xi):
        return self.theta().matrix(xi)


def make_medium(model: LameModel, omega: float, gmat: TransformG | None = None, n: int = DEFAULT_STEPS) -> Medium:
    if gmat is None:
        gmat = solve_G(model, n)
    grid = gmat.grid
    Q = potential_Q(model, gmat, omega, grid)
    V = Q - potential_Q0(model, gmat, omega, grid)
    V[-1] = 0.0
    return Medium(model, gmat, float(omega), grid, Q, V)


# ---------------------------------------------------------------------------
# background solutions and Green's function


def greens_parts(med: Medium):
    """Affine coefficient data of the background Green's function.

    Returns ``(A0, A1, B0, B1, C)`` with ``A(x) = A0 + A1 x`` and ``B(y) = B0 + B1 y``.
    """
    G = med.GH
    H, c0, mu0 = med.H, med.model.c0, med.mu0
    g11, g12, g21, g22 = G[0, 0], G[0, 1], G[1, 0], G[1, 1]
    # A(x) evaluated at x = 0 and its slope
    A1 = 0.5 * c0 * np.array([[g12 * g11, -g11 * g11], [g12 * g12, -g11 * g12]])
    A0 = np.array(
        [
            [g12 * (-0.5 * c0 * g11 * H - g21), g11 * (0.5 * c0 * g11 * H + g21)],
            [g12 * (-0.5 * c0 * g12 * H - g22), g11 * (0.5 * c0 * g12 * H + g22)],
        ]
    )
    B0 = np.array(
        [
            [g11 * (0.5 * c0 * H * g12 + g22), -g11 * (0.5 * c0 * H * g11 + g21)],
            [g12 * (0.5 * c0 * H * g12 + g22), -g12 * (0.5 * c0 * H * g11 + g21)],
        ]
    )
    B1 = -0.5 * c0 * np.array([[g11 * g12, -g11 * g11], [g12 * g12, -g12 * g11]])
    C = mu0 * np.array([[g12 * g11, -g11 * g11], [g12 * g12, -g12 * g11]])
    return A0, A1, B0, B1, C


def _sinc_q(z, q):
    """sin(z q)/q, with a Taylor series when |z q| is small."""
    zq = z * q
    if abs(zq) < 1e-3:
        t = zq * zq
        return z * (1 - t / 6 + t * t / 120 - t**3 / 5040 + t**4 / 362880)
    return np.sin(zq) / q


def greens(med: Medium, xi, x: float, y: float, adjoint: bool = False):
    """Background Green's function (or its adjoint) at (x, y)."""
    p = as_point(xi)
    qP, qS = q_pair(med.omega, med.model.lambda0, med.mu0, p)
    A0, A1, B0, B1, C = greens_parts(med)
    z = x - y
    cosdiff = (np.cos(z * qS) - np.cos(z * qP)) / med.omega**2
    if adjoint:
        return (B0 + B1 * x).T * _sinc_q(z, qS) + (A0 + A1 * y).T * _sinc_q(z, qP) - C.T * cosdiff
    return (A0 + A1 * x) * _sinc_q(z, qP) + (B0 + B1 * y) * _sinc_q(z, qS) + C * cosdiff


def background(med: Medium, xi, x, adjoint: bool = False):
    """Scaled background solutions.

    Returns ``(f, fp, q)`` where the background column c is ``exp(i q[c] x) f[..., :, c]`` and
    its derivative is ``exp(i q[c] x) (i q[c] f + fp)``.
    """
    p = as_point(xi)
    om, mu0, c0, H = med.omega, med.mu0, med.model.c0, med.H
    qP, qS = q_pair(om, med.model.lambda0, mu0, p)
    x = np.asarray(x, dtype=float)
    G = med.GH
    g11, g12, g21, g22 = G[0, 0], G[0, 1], G[1, 0], G[1, 1]
    e21 = -0.5 * c0 * g11 * (x - H) + g21
    e22 = -0.5 * c0 * g12 * (x - H) + g22
    f = np.zeros(x.shape + (2, 2), dtype=complex)
    fp = np.zeros_like(f)
    k = mu0 / om**2
    xi_ = p.xi
    if not adjoint:
        f[..., 0, 0] = e21 + 1j * qP * k * g11
        f[..., 1, 0] = e22 + 1j * qP * k * g12
        fp[..., 0, 0] = -0.5 * c0 * g11
        fp[..., 1, 0] = -0.5 * c0 * g12
        f[..., 0, 1] = -k * xi_ * g11
        f[..., 1, 1] = -k * xi_ * g12
    else:
        f[..., 0, 0] = k * xi_ * g12
        f[..., 1, 0] = -k * xi_ * g11
        f[..., 0, 1] = e22 - 1j * qS * k * g12
        f[..., 1, 1] = -e21 + 1j * qS * k * g11
        fp[..., 0, 1] = -0.5 * c0 * g12
        fp[..., 1, 1] = 0.5 * c0 * g11
    return f, fp, np.array([qP, qS])


# ---------------------------------------------------------------------------
# Volterra iteration


def _moments(z, kmax=3):
    """m_k(z) = int_0^1 t^k exp(-z t) dt for k = 0..kmax."""
    z = complex(z)
    if abs(z) < 2.0:
        m = np.zeros(kmax + 1, dtype=complex)
        term = 1.0 + 0j
        for j in range(40):
            m += term / (np.arange(kmax + 1) + j + 1)
            term *= -z / (j + 1)
        return m
    e = np.exp(-z)
    m = [(1 - e) / z]
    for k in range(1, kmax + 1):
        m.append((k * m[-1] - e) / z)
    return np.array(m)


def _hermite_weights(z):
    """Weights of int_0^1 exp(-z t) u(t) dt for the cubic Hermite interpolant of u."""
    m0, m1, m2, m3 = _moments(z)
    return (m0 - 3 * m2 + 2 * m3, 3 * m2 - 2 * m3, m1 - 2 * m2 + m3, m3 - m2)


def _fd_derivative(u, h):
    """Fourth-order finite-difference derivative along axis 0 of a uniform segment (>= 5 nodes)."""
    d = np.empty_like(u)
    d[2:-2] = (u[:-4] - 8 * u[1:-3] + 8 * u[3:-1] - u[4:]) / (12 * h)
    d[0] = (-25 * u[0] + 48 * u[1] - 36 * u[2] + 16 * u[3] - 3 * u[4]) / (12 * h)
    d[1] = (-3 * u[0] - 10 * u[1] + 18 * u[2] - 6 * u[3] + u[4]) / (12 * h)
    d[-1] = (25 * u[-1] - 48 * u[-2] + 36 * u[-3] - 16 * u[-4] + 3 * u[-5]) / (12 * h)
    d[-2] = (3 * u[-1] + 10 * u[-2] - 18 * u[-3] + 6 * u[-4] - u[-5]) / (12 * h)
    return d


class _Sweep:
    """Backward cumulative integrals J(x_i) = int_{x_i}^H exp(beta (x_i - y)) u(y) dy.

    The grid is uniform on each segment. On every step u is replaced by its cubic Hermite
    interpolant, with derivatives from one-sided-at-the-ends stencils inside the segment, and the
    exponential is integrated exactly.
    """

    def __init__(self, beta: complex, grid, segs):
        self.segs = []
        for i0, i1 in segs:
            h = grid[i0 + 1] - grid[i0]
            w = _hermite_weights(beta * h)
            self.segs.append((i0, i1, h, np.exp(-beta * h), w))

    def __call__(self, u):
        J = np.zeros_like(u)
        carry = np.zeros(u.shape[1:], dtype=complex)
        for i0, i1, h, r, (w00, w01, w10, w11) in reversed(self.segs):
            us = u[i0 : i1 + 1]
            ds = _fd_derivative(us, h) * h
            c = h * (w00 * us[:-1] + w01 * us[1:] + w10 * ds[:-1] + w11 * ds[1:])
            # J_i = r J_{i+1} + c_i, run from the bottom of the segment upwards
            y, _ = lfilter([1.0], [1.0, -r], c[::-1], axis=0, zi=(r * carry)[None])
            J[i0:i1] = y[::-1]
            J[i1] = carry
            carry = J[i0]
        return J


@dataclass
class JostBundle:
    """Jost solution (direct or adjoint) on the slab grid for one sheet point."""

    point: SheetPoint
    grid: np.ndarray
    f: np.ndarray  # scaled, shape (N+1, 2, 2)
    fp: np.ndarray
    q: np.ndarray  # column wave numbers (q_P, q_S)
    iterations: int
    adjoint: bool = False

    @property
    def xi(self):
        return self.point.xi

    def scale(self, x):
        return np.exp(1j * np.multiply.outer(np.asarray(x, dtype=float), self.q))

    @property
    def F(self):
        return self.f * self.scale(self.grid)[:, None, :]

    @property
    def Fprime(self):
        s = self.scale(self.grid)[:, None, :]
        return (1j * self.q[None, None, :] * self.f + self.fp) * s

    def at0(self):
        """(F(0), F'(0))."""
        f0, fp0 = self.f[0], self.fp[0]
        return f0.copy(), 1j * self.q[None, :] * f0 + fp0


def jost_solution(med: Medium, xi, adjoint: bool = False, tol: float = VOLTERRA_TOL,
                  maxiter: int = VOLTERRA_MAXITER) -> JostBundle:
    """Solve the Volterra equation for the (adjoint) Jost solution by successive substitution."""
    p = as_point(xi)
    key = (p.xi, p.side, adjoint)
    if key in med.cache:
        return med.cache[key]
    grid = med.grid
    f0, fp0, q = background(med, p, grid, adjoint)
    if med.H == 0.0 or not np.any(med.V):
        out = JostBundle(p, grid, f0, fp0, q, 0, adjoint)
        med.cache[key] = out
        return out
    segs = segments(grid, med.model)
    om2 = med.omega**2
    A0, A1, B0, B1, C = greens_parts(med)
    Vk = np.swapaxes(med.V, 1, 2) if adjoint else med.V
    if adjoint:
        # Adjoint kernel: B(x)^T sin_S + A(y)^T sin_P - C^T (cos_S - cos_P)/omega^2
        Xc = {1: (B0.T, B1.T), 0: None}
        Yc = {0: (A0.T, A1.T), 1: None}
        Cm = -C.T
    else:
        Xc = {0: (A0, A1), 1: None}
        Yc = {1: (B0, B1), 0: None}
        Cm = C
    kappa = (-1.0, 1.0)  # sign of the cosine term attached to q_P and q_S
    xs = grid[:, None, None]
    cols = []
    iters = 0
    for c in range(2):
        qc = q[c]
        terms = []
        for j in range(2):
            qj = q[j]
            for sgn in (1, -1):
                beta = 1j * (sgn * qj - qc)
                sw = _Sweep(beta, grid, segs)
                coef = sgn / (2j * qj)
                if Xc[j] is not None:
                    X = Xc[j][0] + Xc[j][1] * xs
                    outer = X * coef + kappa[j] * Cm / (2 * om2)
                    outer_d = Xc[j][1] * coef + X / 2 + kappa[j] * 1j * sgn * qj * Cm / (2 * om2)
                    inner = inner_d = None
                else:
                    Y = Yc[j][0] + Yc[j][1] * xs
                    outer = kappa[j] * Cm / (2 * om2) * np.ones_like(xs)
                    outer_d = kappa[j] * 1j * sgn * qj * Cm / (2 * om2) * np.ones_like(xs)
                    inner = Y * coef
                    inner_d = Y / 2
                terms.append((sw, outer, outer_d, inner, inner_d))
        fc0 = f0[:, :, c]
        fc = fc0.copy()
        for it in range(1, maxiter + 1):
            hv = np.einsum("nij,nj->ni", Vk, fc)
            total = np.zeros_like(fc)
            for sw, outer, outer_d, inner, inner_d in terms:
                total += np.einsum("nij,nj->ni", outer, sw(hv))
                if inner is not None:
                    total += sw(np.einsum("nij,nj->ni", inner, hv))
            new = fc0 - total
            change = np.max(np.abs(new - fc)) / max(np.max(np.abs(new)), 1e-300)
            fc = new
            if change < tol:
                break
        else:
            # near a branch point 1/q amplifies rounding; accept a stalled iteration at that floor
            if change >= ROUNDOFF_FLOOR:
                raise RuntimeError(f"Volterra iteration did not converge for xi={p.xi} (change {change:.2e})")
        iters = max(iters, it)
        hv = np.einsum("nij,nj->ni", Vk, fc)
        dtot = np.zeros_like(fc)
        for sw, outer, outer_d, inner, inner_d in terms:
            dtot += np.einsum("nij,nj->ni", outer_d, sw(hv))
            if inner_d is not None:
                dtot += sw(np.einsum("nij,nj->ni", inner_d, hv))
        # F' = F0' - int d_x Gr V F dy; in scaled form subtract i q_c f below.
        Fp_scaled = (1j * qc * fc0 + fp0[:, :, c]) - dtot
        cols.append((fc, Fp_scaled - 1j * qc * fc))
    f = np.stack([cols[0][0], cols[1][0]], axis=-1)
    fp = np.stack([cols[0][1], cols[1][1]], axis=-1)
    out = JostBundle(p, grid, f, fp, q, iters, adjoint)
    med.cache[key] = out
    return out


def jost_function(med: Medium, xi, adjoint: bool = False):
    """F_Theta = F'(0) + Theta F(0), or the adjoint version with Theta^T."""
    b = jost_solution(med, xi, adjoint)
    F0, Fp0 = b.at0()
    Th = med.Theta(b.xi)
    return Fp0 + (Th.T if adjoint else Th) @ F0


def jost_functions(med: Medium, xi):
    """(F_Theta, Fa_Theta) at one sheet point."""
    return jost_function(med, xi, False), jost_function(med, xi, True)


def adjoint_relation(med: Medium, xi):
    """Matrix R(xi) with Fa_Theta = R F_Theta, from the boundary-matrix factorizations."""
    xi = as_point(xi).xi
    m = evaluate_profile(med.model, "mu", 0.0)
    m1 = evaluate_profile(med.model, "mu", 0.0, 1)
    varpi = med.mu0 / m
    return np.array([[-2 * varpi * xi, 0], [(m1 / m) / xi, -(m / (2 * med.mu0)) / xi]], dtype=complex)


def wronskian(Fa, Fap, F, Fp):
    """W(Fa, F) = (Fa')^T F - Fa^T F'."""
    return np.swapaxes(Fap, -1, -2) @ F - np.swapaxes(Fa, -1, -2) @ Fp


def wronskian_closed_form(med: Medium, xi):
    p = as_point(xi)
    qP, qS = q_pair(med.omega, med.model.lambda0, med.mu0, p)
    return -2j * med.mu0 * (p.xi / med.omega**2) * np.diag([qP, -qS])


# ---------------------------------------------------------------------------
# regular solutions


def regular_solutions(med: Medium, xi, stride: int = 2):
    """phi and S with derivatives on every ``stride``-th grid node.

    phi(0) = I, phi'(0) = -Theta(xi); S(0) = 0, S'(0) = I. Integrated with RK4 of step
    ``stride * h`` using Q sampled at grid nodes (the midpoint is a node). Returns
    ``(x, phi, phip, S, Sp, logscale)`` where values are divided by ``exp(logscale)``.
    """
    xi = complex(as_point(xi).xi)
    grid, Q = med.grid, med.Q
    Th = med.Theta(xi)
    Y = np.zeros((4, 4), dtype=complex)
    Y[:2, :2] = np.eye(2)
    Y[2:, :2] = -Th
    Y[2:, 2:] = np.eye(2)
    return _integrate_regular(grid, Q, xi * xi, Y, stride)


def _integrate_regular(grid, Q, xi2, Y0, stride):
    n = len(grid) - 1
    if n == 0:
        Y = Y0[None]
        return grid, Y[:, :2, :2], Y[:, 2:, :2], Y[:, :2, 2:], Y[:, 2:, 2:], np.zeros(1)
    if n % stride:
        raise ValueError("grid size must be a multiple of the stride")
    half = stride // 2
    idx = np.arange(0, n + 1, stride)
    A = np.zeros((n + 1, 4, 4), dtype=complex)
    A[:, :2, 2:] = np.eye(2)
    A[:, 2:, :2] = Q + xi2 * np.eye(2)
    out = np.empty((len(idx), 4, 4), dtype=complex)
    logs = np.zeros(len(idx))
    Y = Y0.astype(complex)
    out[0] = Y
    ls = 0.0
    for k in range(len(idx) - 1):
        i = idx[k]
        h = grid[i + stride] - grid[i]
        a0, am, a1 = A[i], A[i + half], A[i + stride]
        k1 = a0 @ Y
        k2 = am @ (Y + 0.5 * h * k1)
        k3 = am @ (Y + 0.5 * h * k2)
        k4 = a1 @ (Y + h * k3)
        Y = Y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        nrm = np.max(np.abs(Y))
        if nrm > 1e150:
            Y = Y / nrm
            ls += np.log(nrm)
        out[k + 1] = Y
        logs[k + 1] = ls
    return grid[idx], out[:, :2, :2], out[:, 2:, :2], out[:, :2, 2:], out[:, 2:, 2:], logs


# ---------------------------------------------------------------------------
# asymptotic coefficients


@dataclass(frozen=True)
class JostAsymptotics:
    """Large-xi expansion F(0, xi) = xi*lead + first_column_shift + correction + O(1/xi)."""

    lead: np.ndarray  # -(mu0/omega^2) [[G11, G11], [G12, G12]]
    shift: np.ndarray  # [[c0 H G11/2 + G21, 0], [c0 H G12/2 + G22, 0]]
    correction: np.ndarray  # G1(0)

    def predict(self, xi):
        return complex(xi) * self.lead + self.shift + self.correction


def jost_asymptotic_coeffs(med: Medium) -> JostAsymptotics:
    G = med.GH
    g11, g12, g21, g22 = G[0, 0], G[0, 1], G[1, 0], G[1, 1]
    c0, H, mu0, om2 = med.model.c0, med.H, med.mu0, med.omega**2
    cc = np.array([[g11, g11], [g12, g12]])
    lead = -(mu0 / om2) * cc
    shift = np.array([[0.5 * c0 * g11 * H + g21, 0.0], [0.5 * c0 * g12 * H + g22, 0.0]])
    intV = _trapz(med.V, med.grid)
    correction = -0.5 * (mu0 / om2) * intV @ cc
    return JostAsymptotics(lead, shift, correction)


def _trapz(f, x):
    if len(x) < 2:
        return np.zeros(f.shape[1:])
    h = np.diff(x)
    return np.tensordot(h, 0.5 * (f[1:] + f[:-1]), axes=(0, 0))


def boundary_forms(med: Medium, xi):
    """Da, Ca, D, C, Theta, ThetaA at xi."""
    return boundary_matrices(med.model, med.omega, as_point(xi).xi)
