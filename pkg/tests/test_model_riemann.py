import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rayleigh_spectral.model import LameModel, boundary_theta, evaluate_profile, validate
from rayleigh_spectral.riemann import MINUS, PLUS, SheetPoint, k_to_xi, quasi_momentum, xi_to_k

amp = st.floats(-0.3, 0.3)


def test_homogeneous_boundary_theta():
    th = boundary_theta(LameModel(1.0, 1.0, 0.0), 1.0)
    assert th.varpi == 1.0 and th.theta3 == 0.0
    assert th.theta2 == pytest.approx(1 / 6, abs=1e-15)
    assert 1 - 2 * th.varpi * th.theta2 == pytest.approx(2 / 3, abs=1e-15)


def test_validate_flags_bad_models():
    assert validate(LameModel(1.0, 1.0, 2.0, mu_bumps=[(1.0, 0.9, 0.03)])).ok
    assert not validate(LameModel(1.0, 1.0, 2.0, mu_bumps=[(1.5, 0.9, 0.03)])).ok
    assert not validate(LameModel(1.0, 1.0, 2.0, mu_bumps=[(1.0, 0.5, -1.5)])).ok


def test_model_dict_round_trip():
    m = LameModel(1.0, 2.0, 3.0, mu_bumps=[(0.8, 0.5, 0.2)], lambda_bumps=[(1.5, 0.7, 0.3)])
    assert LameModel.from_dict(m.to_dict()) == m


@settings(max_examples=30, deadline=None)
@given(a=amp, b=amp)
def test_bumps_leave_boundary_values_and_are_smooth_at_edges(a, b):
    m = LameModel(1.0, 1.5, 2.0, mu_bumps=[(1.0, 0.6, a)], lambda_bumps=[(0.9, 0.5, b)])
    for which, edges in (("mu", (0.4, 1.6)), ("lambda", (0.4, 1.4))):
        assert evaluate_profile(m, which, 0.0) == (1.0 if which == "mu" else 1.5)
        for k in (1, 2, 3):
            assert np.all(np.abs(evaluate_profile(m, which, np.array(edges), k)) < 1e-12)


@settings(max_examples=60, deadline=None)
@given(re=st.floats(0.05, 5.0), im=st.floats(-5.0, 5.0).filter(lambda v: abs(v) > 1e-3))
def test_quasi_momentum_square_and_sheet(re, im):
    xi = complex(re, im)
    q = quasi_momentum(1.0, 1.0, xi)
    assert abs(q * q - (1 - xi * xi)) < 1e-12 * max(1.0, abs(xi) ** 2)
    assert np.sign(q.imag) == np.sign(xi.real)


@settings(max_examples=60, deadline=None)
@given(kr=st.floats(-4.0, 4.0).filter(lambda v: abs(v) > 1e-3 and abs(abs(v) - 1) > 1e-3), ki=st.floats(0.0, 3.0))
def test_k_xi_inverse(kr, ki):
    k = complex(kr, ki)
    p = k_to_xi(1.0, 1.0, k)
    assert abs(xi_to_k(1.0, 1.0, p) - k) < 1e-10 * max(1.0, abs(k))


def test_sheet_point_involutions():
    for p in (SheetPoint(0.3, PLUS), SheetPoint(1.5j, MINUS), SheetPoint(1 + 2j)):
        assert p.negated().negated() == p
        assert p.conjugated().conjugated() == p
    assert quasi_momentum(1.0, 1.0, SheetPoint(0.6, PLUS)) == -quasi_momentum(1.0, 1.0, SheetPoint(0.6, MINUS))
