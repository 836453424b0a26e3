"""Inverse pipeline: kernels from spectral data, the Gel'fand-Levitan type equation, recovery steps.

Real wavenumbers ``k = sqrt(omega^2/mu0 - xi^2)`` parametrize the cut: ``k > a`` is the evanescent
part (``xi = -i s``), ``0 < k < a`` the radiating part. For real k everything the kernels need is
carried by the symmetrised jump

    J(k) = (k / 2i) (j(k) - j(-k)) = I - k Im M_+(k) Y1^{-1} = I + pi k T(a^2 - k^2) Y1^{-1},

which is real, even in k and ``O(k^-2)``. Integrals over the real k-line fold onto ``k > 0`` through
this identity; beyond ``k_max`` the leading term ``J2/k^2`` is integrated in closed form.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import roots_legendre, sici

from .markushevich import potential_Q, potential_Q0, solve_G, TransformG
from .model import LameModel, boundary_theta
from .spectral import E_matrix, SpectralData

N_LOWER = np.array([[0.0, 0.0], [1.0, 0.0]])


class GLDivergence(ArithmeticError):
    """The fixed-point iteration for the GL equation does not contract."""


# ---------------------------------------------------------------------------
# reference solutions e, e~ and j


def e_matrix(x, k, varpi: float):
    """e(x, k) = [[cos kx, 0], [2 varpi k sin kx, cos kx]], broadcast over x and k."""
    x, k = np.broadcast_arrays(np.asarray(x), np.asarray(k))
    dt = np.result_type(x, k, float)
    out = np.zeros(x.shape + (2, 2), dtype=dt)
    c = np.cos(k * x)
    out[..., 0, 0] = c
    out[..., 1, 1] = c
    out[..., 1, 0] = 2 * varpi * k * np.sin(k * x)
    return out


def etilde_matrix(x, k, varpi: float):
    """e~(x, k) = (1/k) [[sin kx, 0], [-2 varpi k cos kx, sin kx]]; its x-derivative is e."""
    x, k = np.broadcast_arrays(np.asarray(x), np.asarray(k))
    dt = np.result_type(x, k, float)
    out = np.zeros(x.shape + (2, 2), dtype=dt)
    s = np.sin(k * x) / k
    out[..., 0, 0] = s
    out[..., 1, 1] = s
    out[..., 1, 0] = -2 * varpi * np.cos(k * x)
    return out


def j_from_weyl(M, k, Y1, varpi: float):
    """j(k) = -(1/ik) E(-ik) - M_+(k) Y1^{-1}."""
    k = complex(k)
    return -E_matrix(varpi, -1j * k) / (1j * k) - M @ np.linalg.inv(Y1)


def _sin_tail(c, K):
    """int_K^inf sin(c k)/k dk."""
    c = np.asarray(c, dtype=float)
    ac = np.abs(c)
    si = sici(ac * K)[0]
    return np.where(ac == 0, 0.0, np.sign(c) * (np.pi / 2 - si))


def _cos2_tail(c, K):
    """int_K^inf cos(c k)/k^2 dk."""
    c = np.asarray(c, dtype=float)
    ac = np.abs(c)
    si = sici(ac * K)[0]
    return np.cos(ac * K) / K - ac * (np.pi / 2 - si)


@dataclass
class GLData:
    omega: float
    mu0: float
    lambda0: float
    varpi: float
    theta2: float
    theta3: float
    T0: np.ndarray
    T1: np.ndarray
    Y: list
    k_poles: np.ndarray  # i kappa_j
    C: list  # alpha_j Y1^{-1}
    k_nodes: np.ndarray
    k_weights: np.ndarray
    J: np.ndarray  # real (n, 2, 2)
    k_max: float
    J2: np.ndarray
    source: np.ndarray  # "branch" or "asymptotic" per node
    k_samples: np.ndarray = field(default_factory=lambda: np.zeros(0))
    j_samples: np.ndarray = field(default_factory=lambda: np.zeros((0, 2, 2), complex))

    @property
    def a2(self):
        return self.omega**2 / self.mu0

    @property
    def Y1inv(self):
        return np.linalg.inv(self.Y[1])

    def tail_estimate(self) -> float:
        """Size of the neglected part of int J beyond k_max, from the J2/k^2 model."""
        return float(np.max(np.abs(self.J2)) / self.k_max)


def _tail_J(Y1, Y3, a2, k):
    s = np.sqrt(k * k - a2)
    Y3Y1 = Y3 @ np.linalg.inv(Y1)
    return np.eye(2) - (k / s)[:, None, None] * (np.eye(2) - Y3Y1 / (s * s)[:, None, None])


def build_j(spec: SpectralData, k_max: float | None = None, panel: float = 0.5, order: int = 8) -> GLData:
    """k-quadrature and J(k) from the spectral data.

    Branch nodes map to ``k = sqrt(a^2 - eta)`` with weight ``w_eta/(2k)``. Between the end of the
    sampled cut and ``k_max`` the large-k form of J built from Y1 and Y3 is used on Gauss panels.
    """
    if spec.Y is None or len(spec.Y) < 4:
        raise ValueError("spectral data lacks the Weyl coefficients Y0..Y3")
    if len(spec.residues) != len(spec.poles):
        raise ValueError("one residue per pole is required")
    Y1, Y3 = spec.Y[1], spec.Y[3]
    Y1i = np.linalg.inv(Y1)
    a2 = spec.omega**2 / spec.mu0
    a = np.sqrt(a2)
    kb = np.sqrt(a2 - spec.branch_eta)
    wb = spec.branch_weight / (2 * kb)
    Jb = (np.eye(2) + np.pi * kb[:, None, None] * spec.branch_T @ Y1i).real
    k0 = np.sqrt(a2 + spec.s0**2)
    k_max = 60.0 * a if k_max is None else float(k_max)
    if k_max <= k0:
        raise ValueError(f"k_max={k_max} must exceed the end of the sampled cut ({k0})")
    x, w = roots_legendre(order)
    edges = np.linspace(k0, k_max, int(np.ceil((k_max - k0) / panel)) + 1)
    kt = np.concatenate([0.5 * (r - l) * x + 0.5 * (r + l) for l, r in zip(edges[:-1], edges[1:])])
    wt = np.concatenate([0.5 * (r - l) * w for l, r in zip(edges[:-1], edges[1:])])
    Jt = _tail_J(Y1, Y3, a2, kt)
    J2 = Y3 @ Y1i - 0.5 * a2 * np.eye(2)
    k_poles = np.array([1j * np.sqrt(p * p - a2) for p in spec.poles])
    ks, js = np.zeros(0), np.zeros((0, 2, 2), complex)
    if spec.k_grid.size:
        ks = np.concatenate([-spec.k_grid[::-1], spec.k_grid])
        jp = np.array([j_from_weyl(M, k, Y1, spec.varpi) for k, M in zip(spec.k_grid, spec.m_plus)])
        jm = np.array([j_from_weyl(M.conj(), -k, Y1, spec.varpi) for k, M in zip(spec.k_grid, spec.m_plus)])
        js = np.concatenate([jm[::-1], jp])
    return GLData(
        omega=spec.omega,
        mu0=spec.mu0,
        lambda0=spec.lambda0,
        varpi=spec.varpi,
        theta2=spec.theta["theta2"],
        theta3=spec.theta["theta3"],
        T0=spec.T0,
        T1=spec.T1,
        Y=list(spec.Y),
        k_poles=k_poles,
        C=[al.real @ Y1i for al in spec.residues],
        k_nodes=np.concatenate([kb, kt]),
        k_weights=np.concatenate([wb, wt]),
        J=np.concatenate([Jb, Jt]),
        k_max=k_max,
        J2=J2,
        source=np.array(["branch"] * kb.size + ["asymptotic"] * kt.size),
        k_samples=ks,
        j_samples=js,
    )


# ---------------------------------------------------------------------------
# kernels


def _pole_e(x, kj, varpi):
    """e(x, i kappa) with kappa > 0, which is real."""
    kap = kj.imag
    out = np.zeros(np.shape(x) + (2, 2))
    ch = np.cosh(kap * x)
    out[..., 0, 0] = ch
    out[..., 1, 1] = ch
    out[..., 1, 0] = -2 * varpi * kap * np.sinh(kap * x)
    return out


def kernels_g(gl: GLData, x, y, enforce_support: bool = True):
    """g(x_i, y_l) and g^(x_i, y_l) on the tensor grid of ``x`` and ``y``.

    Uses the cos(kx) form of g. Returned arrays have shape (len(x), len(y), 2, 2).
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    k, w, J = gl.k_nodes, gl.k_weights, gl.J
    vp = gl.varpi
    N = N_LOWER
    K = gl.k_max
    cx, sx = np.cos(np.outer(x, k)), np.sin(np.outer(x, k))
    cy, sy = np.cos(np.outer(k, y)), np.sin(np.outer(k, y))
    wJ = w[:, None, None] * J
    wJN = wJ @ N
    # g: sum_k cos(k x) J (cos(k y) + 2 varpi k sin(k y) N)
    R = cy[:, :, None, None] * wJ[:, None] + (2 * vp * k[:, None] * sy)[:, :, None, None] * wJN[:, None]
    g = (2 / np.pi) * (cx @ R.reshape(k.size, -1)).reshape(x.size, y.size, 2, 2)
    # g^ adds 2 varpi k sin(k x) N J J e(y, k)
    NJJ = N @ J @ J
    wNJJ = w[:, None, None] * NJJ
    Rh = cy[:, :, None, None] * wNJJ[:, None] + (2 * vp * k[:, None] * sy)[:, :, None, None] * (wNJJ @ N)[:, None]
    extra = (2 / np.pi) * ((2 * vp * k * sx) @ Rh.reshape(k.size, -1)).reshape(x.size, y.size, 2, 2)
    # closed-form tails beyond k_max with J ~ J2/k^2
    X, Yg = np.meshgrid(x, y, indexing="ij")
    C2 = 0.5 * (_cos2_tail(X + Yg, K) + _cos2_tail(X - Yg, K))
    S1 = 0.5 * (_sin_tail(Yg + X, K) + _sin_tail(Yg - X, K))
    J2 = gl.J2
    tail = (2 / np.pi) * (C2[..., None, None] * J2 + 2 * vp * S1[..., None, None] * (J2 @ N))
    SS2 = 0.5 * (_cos2_tail(X - Yg, K) - _cos2_tail(X + Yg, K))
    tail_h = (2 / np.pi) * 4 * vp * vp * SS2[..., None, None] * (N @ J2 @ J2 @ N)
    g = g + tail
    ghat = g + extra + tail_h
    for kj, Cj in zip(gl.k_poles, gl.C):
        ey = _pole_e(y, kj, vp)
        ex = _pole_e(x, kj, vp)
        ch = np.cosh(kj.imag * x)
        g = g - ch[:, None, None, None] * np.einsum("ab,lbc->lac", Cj, ey)[None]
        ghat = ghat - np.einsum("iab,bc,lcd->ilad", ex, Cj, ey)
    if enforce_support:
        mask = np.abs(Yg) > np.abs(X) * (1 + 1e-12) + 1e-14
        g[mask] = 0.0
        ghat[mask] = 0.0
    return g, ghat


# ---------------------------------------------------------------------------
# GL equation


@dataclass
class GLKernel:
    x_grid: np.ndarray
    y_grids: list
    K: list  # per x: (n_y, 2, 2)
    K_diag: np.ndarray
    K_diag_deriv: np.ndarray
    iterations: list
    contraction: list  # spectral radius of the iteration map per x


def _trapezoid_weights(y):
    w = np.zeros_like(y)
    d = np.diff(y)
    w[:-1] += d / 2
    w[1:] += d / 2
    return w


def gl_operator(gl: GLData, x: float, n_y: int = 257, support: bool = True):
    """Discrete map K -> (1/4) int K(x,y') E(2 delta(x+y')) g(-y', y) dy' and the forcing -g^(x, .).

    Returns ``(y, W, ghat)`` with ``W`` of shape (n_y, 2, n_y, 2) so that the integral term for row
    vector ``z`` is ``einsum('lb,lbic->ic', z, W)``.
    """
    y = np.linspace(-x, x, n_y)
    w = _trapezoid_weights(y)
    g, _ = kernels_g(gl, -y, y, enforce_support=support)  # g(-y_l, y_i)
    gx, ghx = kernels_g(gl, [x], y)
    W = w[:, None, None, None] * np.transpose(g, (0, 2, 1, 3))  # (l, b, i, c)
    W = W.copy()
    W[0] += 4 * gl.varpi * np.transpose(N_LOWER @ gx[0], (1, 0, 2))
    return y, W / 4, ghx[0]


def _apply(W, K):
    return np.einsum("rlb,lbic->ric", K, W)


def solve_GL(gl: GLData, x_grid, n_y: int = 257, tol: float = 1e-10, maxiter: int = 500,
             method: str = "iterate", support: bool = True) -> GLKernel:
    """Solve 4K + 4g^ - int K E(2 delta(x+y')) g(-y', y) dy' = 0 on y in [-x, x] for each x."""
    x_grid = np.asarray(x_grid, dtype=float)
    ys, Ks, its, rhos = [], [], [], []
    for x in x_grid:
        if x == 0.0:
            raise ValueError("x = 0 gives an empty interval; start the grid above zero")
        y, W, gh = gl_operator(gl, x, n_y, support)
        A = W.reshape(2 * n_y, 2 * n_y)
        rho = float(np.max(np.abs(np.linalg.eigvals(A))))
        F = -np.transpose(gh, (1, 0, 2))  # rows r: (r, i, c)
        if method == "direct":
            z = np.linalg.solve((np.eye(2 * n_y) - A).T, F.reshape(2, -1).T).T
            K = z.reshape(2, n_y, 2)
            it = 0
        else:
            K = F.copy()
            for it in range(1, maxiter + 1):
                new = F + _apply(W, K)
                change = np.max(np.abs(new - K)) / max(np.max(np.abs(new)), 1e-300)
                K = new
                if not np.isfinite(change) or change > 1e12:
                    raise GLDivergence(f"iteration diverges at x={x} (spectral radius {rho:.3g})")
                if change < tol:
                    break
            else:
                raise GLDivergence(f"no convergence at x={x} after {maxiter} steps (spectral radius {rho:.3g})")
        ys.append(y)
        Ks.append(np.transpose(K, (1, 0, 2)))
        its.append(it)
        rhos.append(rho)
    diag = np.array([K[-1] for K in Ks])
    return GLKernel(x_grid, ys, Ks, diag, diag_derivative(x_grid, diag), its, rhos)


def homogeneous_iteration(gl: GLData, x: float, n_y: int = 129, steps: int = 100, seed: int = 0,
                          support: bool = True):
    """Iterate K <- (1/4) int K E g from a random start with the forcing removed; returns the norms."""
    y, W, _ = gl_operator(gl, x, n_y, support)
    rng = np.random.default_rng(seed)
    K = rng.standard_normal((2, n_y, 2))
    norms = [float(np.max(np.abs(K)))]
    for _ in range(steps):
        K = _apply(W, K)
        norms.append(float(np.max(np.abs(K))))
    return np.array(norms)


def diag_derivative(x, f):
    """d/dx of samples on a uniform grid: 4th-order centred inside, 2nd-order one-sided at the ends."""
    x = np.asarray(x, dtype=float)
    if x.size < 3:
        return np.full_like(f, np.nan)
    h = x[1] - x[0]
    if not np.allclose(np.diff(x), h, rtol=1e-9, atol=0):
        raise ValueError("diag_derivative needs a uniform grid")
    d = np.gradient(f, h, axis=0, edge_order=2)
    if len(x) >= 5:
        d[2:-2] = (f[:-4] - 8 * f[1:-3] + 8 * f[3:-1] - f[4:]) / (12 * h)
    return d


# ---------------------------------------------------------------------------
# recovery


def _projection_vector(GH, c0, H):
    r = np.array([-(0.5 * c0 * GH[0, 1] * H + GH[1, 1]), 0.5 * c0 * GH[0, 0] * H + GH[1, 0]])
    return np.array([GH[0, 0], GH[0, 1]]), r


def d_matrix(intV, GH, c0, H):
    """D = (1/2) (int_0^x V) c r^T for stacked integrals ``intV``."""
    c, r = _projection_vector(GH, c0, H)
    return 0.5 * intV @ np.outer(c, r)


def recover_projected_V(kernel: GLKernel, T0, GH, omega: float, mu0: float, c0: float, H: float,
                        variant: str = "derived"):
    """V(x) c with c = (G11^H, G12^H) from K'(x, x).

    ``derived``: K' = T0^{-1} D' T0 + (omega^2/2 mu0) I. ``printed``: K' = T0^{-1} D' T0^{-1} + omega^2/2 mu0.
    """
    c, r = _projection_vector(GH, c0, H)
    rr = float(r @ r)
    if rr < 1e-14:
        raise ValueError("degenerate G^H: projection vector r vanishes")
    a2h = 0.5 * omega**2 / mu0
    Kp = kernel.K_diag_deriv.real
    if variant == "derived":
        Dp = T0 @ (Kp - a2h * np.eye(2)) @ np.linalg.inv(T0)
    elif variant == "printed":
        Dp = T0 @ (Kp - a2h) @ T0
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return 2 * Dp @ r / rr


def recover_GH(jb1: dict, jb2: dict, omega1: float, omega2: float, lambda0: float, mu0: float, H: float):
    """G^H from the measured leading Jost coefficients at two frequencies.

    Returns ``(GH, report)``; the report carries the det G^H = 1 residual and the frequency spread
    of the leading coefficient.
    """
    if omega1 == omega2:
        raise ValueError("two distinct frequencies are required")
    c0 = (lambda0 + mu0) / (lambda0 + 2 * mu0)
    cols = []
    for jb, w in ((jb1, omega1), (jb2, omega2)):
        L = -(w**2 / mu0) * np.asarray(jb["lead"])
        cols.append(L.mean(axis=1))
    g11, g12 = 0.5 * (cols[0] + cols[1])
    if abs(g11) < 1e-14 and abs(g12) < 1e-14:
        raise ValueError("leading Jost coefficient vanishes; spectral data corrupted")
    S1, S2 = np.asarray(jb1["next"]), np.asarray(jb2["next"])
    Y = (S1 - S2) / (1 / omega1**2 - 1 / omega2**2)
    X = S1 - Y / omega1**2
    XP = X @ np.array([[1.0, 1.0], [-1.0, -1.0]])
    g21 = XP[0, 0] - 0.5 * c0 * H * g11
    g22 = XP[1, 0] - 0.5 * c0 * H * g12
    GH = np.array([[g11, g12], [g21, g22]])
    report = {
        "det_residual": float(abs(np.linalg.det(GH) - 1.0)),
        "lead_spread": float(np.max(np.abs(cols[0] - cols[1]))),
    }
    return GH, report


def recover_lame_from_Q(Q1, Q2, omega1: float, omega2: float):
    """lambda(x), mu(x) from Q at two frequencies via trace and determinant of the omega^2 part."""
    if omega1 == omega2:
        raise ValueError("two distinct frequencies are required")
    Qd = (np.asarray(Q1) - np.asarray(Q2)) / (omega1**2 - omega2**2)
    tr = np.trace(Qd, axis1=-2, axis2=-1)
    det = Qd[..., 0, 0] * Qd[..., 1, 1] - Qd[..., 0, 1] * Qd[..., 1, 0]
    disc = tr * tr - 4 * det
    if np.any(disc < 0) or np.any(det <= 0) or np.any(tr >= 0):
        raise ValueError("Q samples are inconsistent with positive Lame parameters")
    sq = np.sqrt(disc)
    z_big = (-tr + sq) / 2  # 1/mu
    z_small = (-tr - sq) / 2  # 1/(lambda + 2 mu)
    mu = 1 / z_big
    lam = 1 / z_small - 2 * mu
    return lam, mu


# ---------------------------------------------------------------------------
# forward check of the kernel identity


def potential_on(model: LameModel, gmat: TransformG, omega: float, x):
    """Q on [0, inf): the slab potential up to H, the background beyond."""
    x = np.asarray(x, dtype=float)
    Q = potential_Q0(model, gmat, omega, x)
    inside = x <= model.H
    if np.any(inside) and model.H > 0:
        Q[inside] = potential_Q(model, gmat, omega, x[inside])
    return Q


def regular_batch(model: LameModel, gmat: TransformG, omega: float, xi2, X: float, n: int = 4096):
    """phi(x, xi) for many real xi^2 at once: phi(0) = I, phi'(0) = -Theta(xi), RK4 on [0, X].

    Returns ``(x, phi)`` with phi of shape (n/2 + 1, len(xi2), 2, 2).
    """
    xi2 = np.asarray(xi2, dtype=float)
    th = boundary_theta(model, omega)
    x = np.linspace(0.0, X, n + 1)
    Q = potential_on(model, gmat, omega, x)
    m = xi2.size
    Y = np.zeros((m, 4, 2))
    Y[:, :2] = np.eye(2)
    Th = np.zeros((m, 2, 2))
    Th[:, 0, 0] = -th.theta3
    Th[:, 0, 1] = th.theta2
    Th[:, 1, 0] = 2 * th.varpi * xi2 - th.theta1
    Y[:, 2:] = -Th
    out = np.empty((n // 2 + 1, m, 2, 2))
    out[0] = Y[:, :2]
    eye = np.eye(2)

    def rhs(i, Z):
        return np.concatenate([Z[:, 2:], (Q[i] + xi2[:, None, None] * eye) @ Z[:, :2]], axis=1)

    for j in range(n // 2):
        i = 2 * j
        h = x[i + 2] - x[i]
        k1 = rhs(i, Y)
        k2 = rhs(i + 1, Y + 0.5 * h * k1)
        k3 = rhs(i + 1, Y + 0.5 * h * k2)
        k4 = rhs(i + 2, Y + h * k3)
        Y = Y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        out[j + 1] = Y[:, :2]
    return x[::2], out


@dataclass
class ConsistencyReport:
    x: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    discrepancy: float
    relative: float
    rhs_at0_sum_rule: float  # |RHS(0) + T0^{-1} Y2 Y1^{-1}| with the pole sum subtracted
    pole_sign_variant: float  # discrepancy with the pole sum entering with a minus sign

    def to_dict(self):
        return {
            "discrepancy": self.discrepancy,
            "relative": self.relative,
            "rhs_at0_sum_rule": self.rhs_at0_sum_rule,
            "pole_sign_variant": self.pole_sign_variant,
        }


def forward_kernel_diag(gl: GLData, model: LameModel, gmat: TransformG, x_max: float, n: int = 4096,
                        pole_sign: float = 1.0):
    """K(x, x) from forward regular solutions:

    (2/pi) int_0^inf A^(x,k) J(k) e(x,k) dk + sign * sum_j A_j(x) C_j e(x, k_j), A = T0^{-1} phi.
    """
    a2 = gl.a2
    k = gl.k_nodes
    vp = gl.varpi
    T0i = np.linalg.inv(gl.T0)
    xs, P = regular_batch(model, gmat, gl.omega, a2 - k * k, x_max, n)
    phihat = P - (2 * vp * k * np.sin(np.outer(xs, k)))[..., None, None] * N_LOWER
    # leading large-k behaviour of phi^: cos(kx) (I - varpi int_0^x (Q + a^2) dy N)
    Qx = potential_on(model, gmat, gl.omega, xs) + a2 * np.eye(2)
    intQ = np.concatenate([np.zeros((1, 2, 2)), np.cumsum(0.5 * (Qx[1:] + Qx[:-1]) * np.diff(xs)[:, None, None], 0)])
    m1 = np.eye(2) - vp * intQ @ N_LOWER
    _, Pj = regular_batch(model, gmat, gl.omega, np.array([a2 - (kj * kj).real for kj in gl.k_poles]), x_max, n) \
        if gl.k_poles.size else (None, None)
    out = np.empty((xs.size, 2, 2))
    for i, x in enumerate(xs):
        ev = e_matrix(x, k, vp)
        integrand = T0i @ phihat[i] @ gl.J @ ev
        val = (2 / np.pi) * np.einsum("k,kab->ab", gl.k_weights, integrand)
        C2 = 0.5 * (_cos2_tail(2 * x, gl.k_max) + _cos2_tail(0.0, gl.k_max))
        S1 = 0.5 * (_sin_tail(2 * x, gl.k_max) + _sin_tail(0.0, gl.k_max))
        val += (2 / np.pi) * T0i @ m1[i] @ gl.J2 @ (C2 * np.eye(2) + 2 * vp * S1 * N_LOWER)
        for jj, (kj, Cj) in enumerate(zip(gl.k_poles, gl.C)):
            val += pole_sign * T0i @ Pj[i, jj] @ Cj @ _pole_e(x, kj, vp)
        out[i] = val
    return xs, out


def gl_forward_consistency(model: LameModel, omega: float, spec: SpectralData, x_max: float | None = None,
                           gmat: TransformG | None = None, n: int = 4096, k_max: float | None = None):
    """Both sides of the kernel identity on [0, x_max].

    Left: T0^{-1}{(D(x) + (omega^2/2 mu0) x) T0 - T1} with D from the forward V. Right: the k-integral of
    A^ J e plus the guided-mode sum, from forward regular solutions and the spectral data.
    """
    gmat = gmat or solve_G(model)
    gl = build_j(spec, k_max=k_max)
    x_max = (model.H if model.H > 0 else 1.0) if x_max is None else float(x_max)
    xs, rhs = forward_kernel_diag(gl, model, gmat, x_max, n)
    _, rhs_minus = forward_kernel_diag(gl, model, gmat, x_max, n, pole_sign=-1.0) if gl.k_poles.size else (xs, rhs)
    Qx = potential_on(model, gmat, omega, xs)
    V = Qx - potential_Q0(model, gmat, omega, xs)
    intV = np.concatenate([np.zeros((1, 2, 2)), np.cumsum(0.5 * (V[1:] + V[:-1]) * np.diff(xs)[:, None, None], 0)])
    D = d_matrix(intV, gmat.GH, model.c0, model.H)
    T0i = np.linalg.inv(gl.T0)
    a2h = 0.5 * omega**2 / model.mu0
    lhs = np.array([T0i @ ((Dx + a2h * x * np.eye(2)) @ gl.T0 - gl.T1) for Dx, x in zip(D, xs)])
    diff = float(np.max(np.abs(lhs - rhs)))
    scale = float(np.max(np.abs(lhs)))
    sum_rule = float(np.max(np.abs(rhs_minus[0] + T0i @ gl.Y[2] @ gl.Y1inv)))
    return ConsistencyReport(xs, lhs, rhs, diff, diff / scale, sum_rule, float(np.max(np.abs(lhs - rhs_minus))))
