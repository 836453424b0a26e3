"""Markushevich substitution: transform matrix G, matrix potentials Q, Q0, V and boundary matrices.

G solves ``G' = (1/2) L G`` with ``G(0) = I`` and ``L = [[0, -d], [-c, 0]]`` where
``c = mu (lambda + mu) / (mu0 (lambda + 2 mu))`` and ``d = -2 mu0 (1/mu)''``. Below the slab G is
affine in depth. The transformed displacement solves ``-F'' + Q F = -xi^2 F`` with
``Q = (G^{-1} B G)^T``, ``B = B1 + omega^2 B2``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import LameModel, boundary_theta, inverse_mu_jet, profile_jet

DEFAULT_STEPS = 4096


def adj(m):
    """Adjugate of (stacked) 2x2 matrices; equals the inverse when det = 1."""
    out = np.empty_like(m)
    out[..., 0, 0] = m[..., 1, 1]
    out[..., 0, 1] = -m[..., 0, 1]
    out[..., 1, 0] = -m[..., 1, 0]
    out[..., 1, 1] = m[..., 0, 0]
    return out


def det2(m):
    return m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]


def swapT(m):
    return np.swapaxes(m, -1, -2)


def _quotient_jet(u, v):
    """(u/v, (u/v)', (u/v)'') from jets of u and v (value, first, second derivative)."""
    q0 = u[0] / v[0]
    q1 = u[1] / v[0] - u[0] * v[1] / v[0] ** 2
    q2 = (
        u[2] / v[0]
        - 2.0 * u[1] * v[1] / v[0] ** 2
        - u[0] * v[2] / v[0] ** 2
        + 2.0 * u[0] * v[1] ** 2 / v[0] ** 3
    )
    return np.array([q0, q1, q2])


def coupling_jet(model: LameModel, x):
    """Jets of c and d (value, first and second derivative where available).

    Returns ``(c, c', d, d')``.
    """
    mu, lam = profile_jet(model, x)
    rmu = inverse_mu_jet(mu)
    u = np.array([
        mu[0] * (lam[0] + mu[0]),
        mu[1] * (lam[0] + mu[0]) + mu[0] * (lam[1] + mu[1]),
        mu[2] * (lam[0] + mu[0]) + 2.0 * mu[1] * (lam[1] + mu[1]) + mu[0] * (lam[2] + mu[2]),
    ]) / model.mu0
    v = lam[:3] + 2.0 * mu[:3]
    cj = _quotient_jet(u, v)
    d = -2.0 * model.mu0 * rmu[2]
    dp = -2.0 * model.mu0 * rmu[3]
    return cj[0], cj[1], d, dp


def _lmat(c, d):
    c = np.asarray(c, dtype=float)
    out = np.zeros(c.shape + (2, 2))
    out[..., 0, 1] = -d
    out[..., 1, 0] = -c
    return out


@dataclass(frozen=True)
class TransformG:
    """G on a piecewise-uniform depth grid over [0, H] plus its affine continuation below the slab."""

    model: LameModel
    grid: np.ndarray
    Gvals: np.ndarray
    richardson_error: float

    @property
    def GH(self) -> np.ndarray:
        return self.Gvals[-1]

    @property
    def H(self) -> float:
        return self.model.H

    def _derivs(self, x, G):
        c, _, d, _ = coupling_jet(self.model, x)
        return 0.5 * _lmat(c, d) @ G

    def __call__(self, x):
        """G at depth(s) ``x`` (cubic Hermite inside the slab, closed form below)."""
        x = np.asarray(x, dtype=float)
        flat = np.atleast_1d(x).ravel()
        out = np.empty(flat.shape + (2, 2))
        below = flat >= self.H
        if np.any(below):
            out[below] = halfspace_G(self.model, self.GH, flat[below])
        inside = ~below
        if np.any(inside):
            xi_ = flat[inside]
            n = len(self.grid) - 1
            i = np.clip(np.searchsorted(self.grid, xi_, side="right") - 1, 0, n - 1)
            h = (self.grid[i + 1] - self.grid[i])[:, None, None]
            t = (xi_[:, None, None] - self.grid[i][:, None, None]) / h
            g0, g1 = self.Gvals[i], self.Gvals[i + 1]
            d0 = self._derivs(self.grid[i], g0) * h
            d1 = self._derivs(self.grid[i + 1], g1) * h
            h00 = 2 * t**3 - 3 * t**2 + 1
            h10 = t**3 - 2 * t**2 + t
            h01 = -2 * t**3 + 3 * t**2
            h11 = t**3 - t**2
            out[inside] = h00 * g0 + h10 * d0 + h01 * g1 + h11 * d1
        return out.reshape(x.shape + (2, 2))

    def derivative(self, x, order=1):
        """First or second depth derivative of G, from the defining ODE."""
        x = np.asarray(x, dtype=float)
        G = self(x)
        c, cp, d, dp = coupling_jet(self.model, x)
        L = _lmat(c, d)
        G1 = 0.5 * L @ G
        if order == 1:
            return G1
        return 0.5 * _lmat(cp, dp) @ G + 0.5 * L @ G1


def halfspace_G(model: LameModel, GH, x):
    """Closed-form G(x) = affine continuation from G(H); valid for all x when read as an extension."""
    x = np.asarray(x, dtype=float)
    out = np.empty(x.shape + (2, 2))
    s = x - model.H
    out[..., 0, 0] = GH[0, 0]
    out[..., 0, 1] = GH[0, 1]
    out[..., 1, 0] = -0.5 * model.c0 * GH[0, 0] * s + GH[1, 0]
    out[..., 1, 1] = -0.5 * model.c0 * GH[0, 1] * s + GH[1, 1]
    return out


def breakpoints(model: LameModel):
    """0, H and every bump edge strictly inside (0, H); the profiles are only C^3 across edges."""
    pts = {0.0, model.H}
    for c, w, _ in model.mu_bumps + model.lambda_bumps:
        for e in (c - w, c + w):
            if 0.0 < e < model.H:
                pts.add(e)
    return np.array(sorted(pts))


def depth_grid(model: LameModel, n: int = DEFAULT_STEPS, min_steps: int = 8):
    """Piecewise-uniform grid with about ``n`` steps and a node at every breakpoint.

    Each segment gets an even number of steps (at least ``min_steps``) so that stride-2 schemes
    never straddle a breakpoint.
    """
    if model.H == 0.0:
        return np.zeros(1)
    bp = breakpoints(model)
    parts = []
    for a, b in zip(bp[:-1], bp[1:]):
        m = max(min_steps, 2 * int(np.ceil(0.5 * n * (b - a) / model.H)))
        parts.append(np.linspace(a, b, m + 1)[:-1])
    parts.append([model.H])
    return np.concatenate(parts)


def segments(grid, model: LameModel):
    """Index ranges (i0, i1) of the uniform pieces of a grid built by :func:`depth_grid`."""
    if len(grid) < 2:
        return []
    idx = [int(np.argmin(np.abs(grid - p))) for p in breakpoints(model)]
    return list(zip(idx[:-1], idx[1:]))


def _refine(grid):
    """Insert the midpoint of every step."""
    out = np.empty(2 * len(grid) - 1)
    out[::2] = grid
    out[1::2] = 0.5 * (grid[1:] + grid[:-1])
    return out


def _rk4(model: LameModel, grid):
    fine = _refine(grid)
    c, _, d, _ = coupling_jet(model, fine)
    c = c.tolist()
    d = d.tolist()
    hs = np.diff(grid).tolist()
    n = len(hs)
    g11, g12, g21, g22 = 1.0, 0.0, 0.0, 1.0
    out = np.empty((n + 1, 2, 2))
    out[0] = np.eye(2)

    def f(k, a11, a12, a21, a22):
        # (1/2) [[0, -d], [-c, 0]] @ G
        return (-0.5 * d[k] * a21, -0.5 * d[k] * a22, -0.5 * c[k] * a11, -0.5 * c[k] * a12)

    for i in range(n):
        h = hs[i]
        k0, km, k1 = 2 * i, 2 * i + 1, 2 * i + 2
        a = f(k0, g11, g12, g21, g22)
        b = f(km, g11 + 0.5 * h * a[0], g12 + 0.5 * h * a[1], g21 + 0.5 * h * a[2], g22 + 0.5 * h * a[3])
        cc = f(km, g11 + 0.5 * h * b[0], g12 + 0.5 * h * b[1], g21 + 0.5 * h * b[2], g22 + 0.5 * h * b[3])
        e = f(k1, g11 + h * cc[0], g12 + h * cc[1], g21 + h * cc[2], g22 + h * cc[3])
        g11 += h / 6.0 * (a[0] + 2 * b[0] + 2 * cc[0] + e[0])
        g12 += h / 6.0 * (a[1] + 2 * b[1] + 2 * cc[1] + e[1])
        g21 += h / 6.0 * (a[2] + 2 * b[2] + 2 * cc[2] + e[2])
        g22 += h / 6.0 * (a[3] + 2 * b[3] + 2 * cc[3] + e[3])
        out[i + 1] = ((g11, g12), (g21, g22))
    return out


def solve_G(model: LameModel, n: int = DEFAULT_STEPS, check: bool = True) -> TransformG:
    """Integrate the Cauchy problem for G with fixed-step RK4 on about ``n`` steps over [0, H].

    The grid is uniform between breakpoints (bump edges), where the coefficients lose smoothness.
    """
    if model.H == 0.0:
        return TransformG(model, np.zeros(1), np.eye(2)[None], 0.0)
    grid = depth_grid(model, n)
    G = _rk4(model, grid)
    err = 0.0
    if check:
        G2 = _rk4(model, _refine(grid))
        err = float(np.max(np.abs(G2[::2] - G))) / 15.0
        if err > 1e-9:
            raise RuntimeError(f"G integration error estimate {err:.2e} exceeds 1e-9; increase steps")
    drift = float(np.max(np.abs(det2(G) - 1.0)))
    if drift > 1e-8:
        raise RuntimeError(f"det G drifted by {drift:.2e}; integrator misconfigured")
    return TransformG(model, grid, G, err)


def b_matrices(model: LameModel, x):
    """B1 and B2 at depth(s) x (each shape x.shape + (2, 2))."""
    x = np.asarray(x, dtype=float)
    mu, lam = profile_jet(model, x)
    r = inverse_mu_jet(mu)
    m, m1, m2 = mu[0], mu[1], mu[2]
    l, l1 = lam[0], lam[1]
    s = l + 2.0 * m
    s1 = l1 + 2.0 * m1
    f = m * (l + m)
    f1 = m1 * (l + m) + m * (l1 + m1)
    ratio1 = (f1 * s - f * s1) / s**2
    mu0 = model.mu0
    B1 = np.zeros(x.shape + (2, 2))
    B1[..., 0, 0] = -0.5 * r[2] * f / s + m2 / m
    B1[..., 0, 1] = mu0 * (2.0 * (m1 / m) * r[2] + r[3])
    B1[..., 1, 0] = ((l1 * m**2 + m1 * l * (l + m)) / s**2 - 0.5 * ratio1) / mu0
    B1[..., 1, 1] = 0.5 * m * r[2] * (l - m) / s
    B2 = np.zeros(x.shape + (2, 2))
    B2[..., 0, 0] = -1.0 / m
    B2[..., 0, 1] = mu0 * (-2.0 * m1 / m**3)
    B2[..., 1, 1] = -1.0 / s
    return B1, B2


def potential_Q(model: LameModel, gmat: TransformG, omega: float, x):
    """Q(x) = (G^{-1} (B1 + omega^2 B2) G)^T."""
    x = np.asarray(x, dtype=float)
    G = gmat(x)
    B1, B2 = b_matrices(model, x)
    return swapT(adj(G) @ (B1 + omega**2 * B2) @ G)


def potential_Q0(model: LameModel, gmat: TransformG, omega: float, x):
    """Background potential, affine in x, equal to Q below the slab."""
    x = np.asarray(x, dtype=float)
    G = halfspace_G(model, gmat.GH, x)
    g11, g12, g21, g22 = G[..., 0, 0], G[..., 0, 1], G[..., 1, 0], G[..., 1, 1]
    k = omega**2 * model.c0 / model.mu0
    out = np.zeros(x.shape + (2, 2))
    out[..., 0, 0] = -omega**2 / model.mu0 - k * g12 * g21
    out[..., 0, 1] = k * g21 * g11
    out[..., 1, 0] = -k * g12 * g22
    out[..., 1, 1] = -omega**2 / model.sigma0 + k * g12 * g21
    return out


def potential_Q0_and_V(model: LameModel, gmat: TransformG, omega: float, x):
    Q0 = potential_Q0(model, gmat, omega, x)
    return Q0, potential_Q(model, gmat, omega, x) - Q0


@dataclass(frozen=True)
class BoundaryMatrices:
    Da: np.ndarray
    Ca: np.ndarray
    D: np.ndarray
    C: np.ndarray
    Theta: np.ndarray
    ThetaA: np.ndarray


def boundary_matrices(model: LameModel, omega: float, xi) -> BoundaryMatrices:
    xi = complex(xi)
    if xi == 0:
        raise ValueError("xi = 0 makes the boundary matrices singular")
    mu, lam = profile_jet(model, 0.0)
    m, m1, m2 = mu[0], mu[1], mu[2]
    s = lam[0] + 2.0 * m
    mu0 = model.mu0
    Da = np.array([[-2 * mu0 * m1 / m, m], [-2 * mu0 * xi, 0]], dtype=complex)
    Ca = np.array(
        [
            [mu0 * (2 * xi**2 - omega**2 / m + m2 / m), -m1 * m / s],
            [2 * mu0 * xi * m1 / m, -xi * m**2 / s],
        ],
        dtype=complex,
    )
    D = np.array([[0, -2 * xi * mu0], [m, 0]], dtype=complex)
    C = np.array(
        [
            [-xi * m**2 / s, 0],
            [-m1, (mu0 / m) * (2 * m * xi**2 - omega**2 - 2 * m1**2 / m + m2)],
        ],
        dtype=complex,
    )
    Theta = boundary_theta(model, omega).matrix(xi)
    return BoundaryMatrices(Da, Ca, D, C, Theta, Theta.T.copy())


def inverse_Da(model: LameModel, xi):
    """Closed-form inverse of Da."""
    xi = complex(xi)
    mu, _ = profile_jet(model, 0.0)
    m, m1 = mu[0], mu[1]
    mu0 = model.mu0
    return np.array([[0, -m], [2 * mu0 * xi, -2 * mu0 * m1 / m]], dtype=complex) / (2 * mu0 * m * xi)


def _diag_jets(model: LameModel, x):
    """Jets of the scalings mu0/mu and mu/(lambda+2mu) (value, first, second derivative)."""
    mu, lam = profile_jet(model, x)
    r = inverse_mu_jet(mu)
    a = model.mu0 * r[:3]
    b = _quotient_jet(mu[:3], lam[:3] + 2.0 * mu[:3])
    return a, b, r


def inverse_transform(model: LameModel, gmat: TransformG, omega, F, Fp, xi, x):
    """Rayleigh displacement w and w' from a transformed solution (F, F') at depth x.

    ``F`` may be a vector (2,) or a matrix (2, m) whose columns are independent solutions;
    ``omega`` enters through Q, which supplies F''.
    """
    xi = complex(xi)
    F = np.asarray(F, dtype=complex)
    Fp = np.asarray(Fp, dtype=complex)
    Q = potential_Q(model, gmat, omega, x)
    Fpp = (Q + xi**2 * np.eye(2)) @ F
    G = gmat(x)
    G1 = gmat.derivative(x, 1)
    G2 = gmat.derivative(x, 2)
    A, A1, A2 = swapT(adj(G)), swapT(adj(G1)), swapT(adj(G2))
    a, b, _ = _diag_jets(model, x)
    Dg = np.diag([a[0], b[0]])
    Dg1 = np.diag([a[1], b[1]])
    Dg2 = np.diag([a[2], b[2]])
    P = Dg @ A
    P1 = Dg1 @ A + Dg @ A1
    P2 = Dg2 @ A + 2 * Dg1 @ A1 + Dg @ A2
    v = P @ F
    v1 = P1 @ F + P @ Fp
    v2 = P2 @ F + 2 * P1 @ Fp + P @ Fpp
    w = np.array([v1[0] + v[1], -xi * v[0]])
    wp = np.array([v2[0] + v1[1], -xi * v1[0]])
    return w, wp


def adjoint_inverse_transform(model: LameModel, gmat: TransformG, omega, Fa, Fap, xi, x):
    """Rayleigh displacement w and w' from an adjoint transformed solution (Fa, Fa')."""
    xi = complex(xi)
    Fa = np.asarray(Fa, dtype=complex)
    Fap = np.asarray(Fap, dtype=complex)
    Q = potential_Q(model, gmat, omega, x)
    Fapp = (Q.T + xi**2 * np.eye(2)) @ Fa
    G = gmat(x)
    G1 = gmat.derivative(x, 1)
    G2 = gmat.derivative(x, 2)
    a, _, r = _diag_jets(model, x)
    mu0 = model.mu0
    N = np.array([[1.0, -2 * mu0 * r[1]], [0.0, a[0]]])
    N1 = np.array([[0.0, -2 * mu0 * r[2]], [0.0, a[1]]])
    N2 = np.array([[0.0, -2 * mu0 * r[3]], [0.0, a[2]]])
    P = N @ G
    P1 = N1 @ G + N @ G1
    P2 = N2 @ G + 2 * N1 @ G1 + N @ G2
    u = P @ Fa
    u1 = P1 @ Fa + P @ Fap
    u2 = P2 @ Fa + 2 * P1 @ Fap + P @ Fapp
    w = np.array([-xi * u[1], u[0] + u1[1]])
    wp = np.array([-xi * u1[1], u1[0] + u2[1]])
    return w, wp


def halfspace_transform(model: LameModel, gmat: TransformG, w, wp, xi, x):
    """Forward transform of a Rayleigh displacement below the slab (x >= H)."""
    xi = complex(xi)
    G = halfspace_G(model, gmat.GH, x)
    w = np.asarray(w, dtype=complex)
    wp = np.asarray(wp, dtype=complex)
    inner = np.array([-w[1] / xi, (w[0] + wp[1] / xi) * model.sigma0 / model.mu0])
    return G.T @ inner


def halfspace_adjoint_transform(model: LameModel, gmat: TransformG, w, wp, xi, x):
    """Adjoint forward transform below the slab (x >= H)."""
    xi = complex(xi)
    G = halfspace_G(model, gmat.GH, x)
    w = np.asarray(w, dtype=complex)
    wp = np.asarray(wp, dtype=complex)
    return adj(G) @ np.array([wp[0] / xi + w[1], -w[0] / xi])


def rayleigh_tractions(model: LameModel, w, wp, xi, x):
    """Boundary-type tractions (mu (w1' - xi w2), (lambda+2mu) w2' + xi lambda w1) at depth x."""
    mu, lam = profile_jet(model, x)
    m, l = mu[0], lam[0]
    return np.array([m * (wp[0] - xi * w[1]), (l + 2 * m) * wp[1] + xi * l * w[0]])
