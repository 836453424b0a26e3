import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import homogeneous_G
from rayleigh_spectral.jost import adjoint_relation, jost_functions, jost_solution, make_medium
from rayleigh_spectral.markushevich import b_matrices, potential_Q, solve_G
from rayleigh_spectral.model import LameModel, evaluate_profile
from rayleigh_spectral.riemann import PLUS, SheetPoint


def test_homogeneous_G_closed_form():
    m = LameModel(1.0, 1.0, 1.5)
    assert np.allclose(solve_G(m).GH, homogeneous_G(m.c0, m.H), atol=1e-13)


def test_homogeneous_potential():
    m = LameModel(1.0, 1.0, 1.5)
    x = np.linspace(0, 1.5, 7)
    Q = potential_Q(m, solve_G(m), 1.0, x)
    assert np.allclose(Q[:, 0, 0], -1) and np.allclose(Q[:, 1, 1], -1 / 3) and np.allclose(Q[:, 1, 0], 0)
    assert np.allclose(Q[:, 0, 1], -2 * x / 9, atol=1e-12)


@settings(max_examples=8, deadline=None)
@given(a=st.floats(-0.3, 0.3), b=st.floats(-0.3, 0.3), c=st.floats(0.5, 1.5))
def test_det_G_is_one(a, b, c):
    m = LameModel(1.0, 1.0, 2.0, mu_bumps=[(c, 0.4, a)], lambda_bumps=[(1.0, 0.8, b)])
    gm = solve_G(m)
    x = np.linspace(0, 3.0, 301)
    assert np.max(np.abs(np.linalg.det(gm(x)) - 1)) < 1e-10


@settings(max_examples=20, deadline=None)
@given(x=st.floats(0.0, 2.0))
def test_similarity_invariants_of_frequency_part(x):
    m = LameModel(1.0, 2.0, 2.0, mu_bumps=[(1.0, 0.9, 0.2)], lambda_bumps=[(1.0, 0.7, -0.3)])
    gm = solve_G(m)
    Q2 = (potential_Q(m, gm, 1.0, x) - potential_Q(m, gm, 2.0, x)) / (1.0 - 4.0)
    _, B2 = b_matrices(m, np.asarray(x))
    mu, lam = evaluate_profile(m, "mu", x), evaluate_profile(m, "lambda", x)
    assert np.trace(Q2) == pytest.approx(np.trace(B2), abs=1e-10)
    assert np.trace(Q2) == pytest.approx(-1 / mu - 1 / (lam + 2 * mu), abs=1e-10)
    assert np.linalg.det(Q2) == pytest.approx(1 / (mu * (lam + 2 * mu)), abs=1e-10)


def test_jost_solves_the_ode(bump_medium):
    med = bump_medium
    b = jost_solution(med, 2.0 + 0.5j)
    F, x = b.F, med.grid
    hl, hr = np.diff(x)[:-1], np.diff(x)[1:]
    uniform = np.abs(hl - hr) < 1e-12
    Fpp = (F[2:] - 2 * F[1:-1] + F[:-2]) / (hl * hr)[:, None, None]
    res = -Fpp + med.Q[1:-1] @ F[1:-1] + b.xi**2 * F[1:-1]
    assert np.max(np.abs(res[uniform])) / np.max(np.abs(F)) < 1e-5


def test_adjoint_jost_relation(bump_medium):
    for xi in (1.7, 0.8 + 0.4j, SheetPoint(0.5, PLUS)):
        FT, FaT = jost_functions(bump_medium, xi)
        assert np.max(np.abs(FaT - adjoint_relation(bump_medium, xi) @ FT)) < 1e-8 * np.max(np.abs(FaT))
