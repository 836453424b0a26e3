import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import OMEGA
from oracles import homogeneous_G
from rayleigh_spectral import glinverse as gli
from rayleigh_spectral.jost import make_medium
from rayleigh_spectral.markushevich import solve_G
from rayleigh_spectral.model import LameModel
from rayleigh_spectral.spectral import fit_jost_boundary


@pytest.fixture(scope="module")
def hom_gl(hom_data):
    return gli.build_j(hom_data)


def _no_cut(gl):
    return dataclasses.replace(gl, J=np.zeros_like(gl.J), J2=np.zeros((2, 2)))


def _pole_only_solution(gl, x, y):
    """Degenerate-kernel solution K = a C e(y) of the pole-only equation with untruncated g."""
    C, kj, vp = gl.C[0], gl.k_poles[0], gl.varpi
    kap = kj.imag
    w = np.full(y.size, y[1] - y[0])
    w[[0, -1]] /= 2
    ey = gli._pole_e(y, kj, vp)
    M = np.einsum("l,lab->ab", w * np.cosh(kap * y), ey)
    M = M + 4 * vp * gli._pole_e(-x, kj, vp) @ gli.N_LOWER * np.cosh(kap * x)
    a = 4 * gli._pole_e(x, kj, vp) @ np.linalg.inv(4 * np.eye(2) + C @ M)
    return np.einsum("ab,lbc->lac", a @ C, ey)


@settings(max_examples=30, deadline=None)
@given(x=st.floats(-4, 4), k=st.floats(0.1, 20), w=st.floats(0.5, 2))
def test_e_identities(x, k, w):
    s = gli.e_matrix(x, k, w) + gli.e_matrix(-x, k, w)
    assert np.allclose(s, 2 * np.cos(k * x) * np.eye(2), atol=1e-12)
    h = 1e-5
    d = (gli.etilde_matrix(x + h, k, w) - gli.etilde_matrix(x - h, k, w)) / (2 * h)
    assert np.allclose(d, gli.e_matrix(x, k, w), atol=1e-6 * max(1.0, k * k))


def test_kernels_vanish_without_data(hom_gl):
    gl = dataclasses.replace(_no_cut(hom_gl), k_poles=np.zeros(0), C=[])
    g, gh = gli.kernels_g(gl, [0.3, 1.0], [-0.2, 0.0, 0.25])
    assert np.all(g == 0) and np.all(gh == 0)


def test_kernel_single_pole_closed_form(hom_gl):
    gl = _no_cut(hom_gl)
    x, y = np.array([0.4, 1.1]), np.array([-0.3, 0.1, 0.35])
    g, _ = gli.kernels_g(gl, x, y)
    kj, C = gl.k_poles[0], gl.C[0]
    ref = -np.cos(kj * x).real[:, None, None, None] * np.einsum("ab,lbc->lac", C, gli._pole_e(y, kj, gl.varpi))[None]
    assert np.allclose(g, ref, atol=1e-13)


def test_kernel_support_is_enforced(hom_gl):
    x = np.array([0.5, 1.0, 1.5])
    g, gh = gli.kernels_g(hom_gl, x, 1.2 * x)
    for i in range(3):
        assert np.all(g[i, i] == 0) and np.all(gh[i, i] == 0)


def test_gl_zero_data_gives_zero_kernel(hom_gl):
    gl = dataclasses.replace(_no_cut(hom_gl), k_poles=np.zeros(0), C=[])
    ker = gli.solve_GL(gl, [0.5, 1.0, 1.5], n_y=65)
    assert all(np.all(K == 0) for K in ker.K)


@pytest.mark.parametrize("x", [0.3, 1.0])
def test_gl_solver_reproduces_degenerate_kernel(hom_gl, x):
    gl = _no_cut(hom_gl)
    ker = gli.solve_GL(gl, [x], n_y=257, support=False, method="direct")
    ref = _pole_only_solution(gl, x, ker.y_grids[0])
    assert np.max(np.abs(ker.K[0] - ref)) < 1e-12


def test_gl_iterative_and_direct_agree(hom_gl):
    a = gli.solve_GL(hom_gl, [0.4, 0.8], n_y=129)
    b = gli.solve_GL(hom_gl, [0.4, 0.8], n_y=129, method="direct")
    assert max(np.max(np.abs(u - v)) for u, v in zip(a.K, b.K)) < 1e-9
    assert np.all(np.isfinite(a.K_diag))


def test_gl_divergence_is_reported(hom_gl):
    gl = dataclasses.replace(_no_cut(hom_gl), C=[50.0 * hom_gl.C[0]])
    with pytest.raises(gli.GLDivergence):
        gli.solve_GL(gl, [1.5], n_y=65)


def test_homogeneous_equation_has_only_zero_solution(hom_gl):
    n = gli.homogeneous_iteration(hom_gl, 1.5, steps=100)
    assert n[-1] < 1e-10 * n[0]


@settings(max_examples=20, deadline=None)
@given(c=st.lists(st.floats(-2, 2), min_size=4, max_size=4))
def test_diag_derivative_exact_on_cubics(c):
    x = np.linspace(0.1, 1.0, 19)
    f = np.polynomial.polynomial.polyval(x, c)[:, None, None] * np.ones((1, 2, 2))
    d = np.polynomial.polynomial.polyval(x, np.polynomial.polynomial.polyder(c))
    got = gli.diag_derivative(x, f)[2:-2, 0, 0]
    assert np.allclose(got, d[2:-2], atol=1e-9)


def test_lame_from_trace_and_determinant():
    Qd = np.diag([-1.0, -0.25])  # Tr = -5/4, det = 1/4
    lam, mu = gli.recover_lame_from_Q(Qd * 1.0, Qd * 4.0, 1.0, 2.0)
    assert lam == pytest.approx(2.0, abs=1e-12) and mu == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        gli.recover_lame_from_Q(-Qd, -4 * Qd, 1.0, 2.0)
    with pytest.raises(ValueError):
        gli.recover_lame_from_Q(Qd, Qd, 1.0, 1.0)


@pytest.mark.parametrize("H", [0.0, 1.5])
def test_GH_for_homogeneous_models(H):
    m = LameModel(1.0, 1.0, H)
    gm = solve_G(m)
    jb = [fit_jost_boundary(make_medium(m, w, gm)) for w in (1.0, 2.0)]
    GH, rep = gli.recover_GH(jb[0], jb[1], 1.0, 2.0, 1.0, 1.0, H)
    assert np.allclose(GH, homogeneous_G(m.c0, H), atol=1e-6)
    assert rep["det_residual"] < 1e-6


def test_GH_rejects_equal_frequencies_and_zero_lead():
    jb = {"lead": np.zeros((2, 2)), "next": np.zeros((2, 2))}
    with pytest.raises(ValueError):
        gli.recover_GH(jb, jb, 1.0, 1.0, 1.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        gli.recover_GH(jb, jb, 1.0, 2.0, 1.0, 1.0, 0.0)


def test_projected_V_rejects_degenerate_GH(hom_gl):
    ker = gli.GLKernel(np.array([0.1, 0.2, 0.3]), [], [], np.zeros((3, 2, 2)), np.zeros((3, 2, 2)), [], [])
    with pytest.raises(ValueError):
        gli.recover_projected_V(ker, hom_gl.T0, np.zeros((2, 2)), 1.0, 1.0, 1 / 3, 1.0)


def test_projected_V_vanishes_for_homogeneous_slab():
    # H = 1.5 homogeneous slab: V = 0, so the recovered V c must vanish.
    m = LameModel(1.0, 1.0, 1.5)
    from rayleigh_spectral.spectral import spectral_data

    gm = solve_G(m)
    sd = spectral_data(make_medium(m, OMEGA, gm))
    gl = gli.build_j(sd)
    ker = gli.solve_GL(gl, np.linspace(0.1, 1.5, 15), n_y=129)
    Vc = gli.recover_projected_V(ker, gl.T0, gm.GH, OMEGA, m.mu0, m.c0, m.H)
    print("max |V c| for a homogeneous slab:", np.max(np.abs(Vc)))
    assert np.max(np.abs(Vc)) < 1e-6


def test_consistency_identity_at_surface(hom_model, hom_data):
    rep = gli.gl_forward_consistency(hom_model, OMEGA, hom_data, x_max=1.0)
    T0i = np.linalg.inv(hom_data.T0)
    assert np.allclose(rep.lhs[0], -T0i @ hom_data.T1, atol=1e-14)
    # x = 0 value of the right side against the sum rule -T0^{-1} Y2 Y1^{-1}
    assert rep.rhs_at0_sum_rule < 1e-3


def test_consistency_homogeneous(hom_model, hom_data):
    rep = gli.gl_forward_consistency(hom_model, OMEGA, hom_data, x_max=1.0)
    print("homogeneous kernel-identity discrepancy", rep.to_dict())
    assert rep.discrepancy <= 1e-6
