import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import loglog_slope
from rayleigh_spectral.glinverse import j_from_weyl
from rayleigh_spectral.riemann import k_to_xi
from rayleigh_spectral.spectral import (
    E_matrix,
    SpectralData,
    cauchy_reconstruct,
    contour_residue,
    homogeneous_weyl,
    weyl_asymptotics,
)

N = np.array([[0.0, 0.0], [1.0, 0.0]])


def test_contour_residue_of_planted_pole():
    A = np.array([[1.0, 2.0 - 1j], [0.5j, -3.0]])
    B = np.array([[0.2, 0.0], [1.0, 4.0]])
    f = lambda z: A / (z - (1.3 + 0.2j)) + B * z**2
    assert np.max(np.abs(contour_residue(f, 1.3 + 0.2j, 0.1) - A)) < 1e-10


def test_homogeneous_residue_matches_closed_form(hom_data):
    xi1 = hom_data.poles[0]
    closed = contour_residue(lambda z: homogeneous_weyl(1.0, 1.0, 1.0, np.sqrt(z)), xi1**2, 0.02)
    assert np.max(np.abs(hom_data.residues[0] - closed)) < 1e-9
    sv = np.linalg.svd(hom_data.residues[0], compute_uv=False)
    print("residue singular values", sv)


@settings(max_examples=20, deadline=None)
@given(x1=st.floats(-5, 5), x2=st.floats(-5, 5), w=st.floats(0.5, 2.0))
def test_E_group_law(x1, x2, w):
    lhs = E_matrix(w, x1) @ np.linalg.inv(E_matrix(w, x2))
    assert np.allclose(lhs, [[1, 0], [2 * w * (x1 - x2), 1]], atol=1e-12)


@settings(max_examples=20, deadline=None)
@given(k=st.floats(0.1, 50.0))
def test_E_inverse_on_imaginary_argument(k):
    assert np.allclose(E_matrix(1.0, -1j * k) @ E_matrix(1.0, 1j * k), np.eye(2), atol=1e-12)


def test_half_Y0_Y1inv_is_varpi_N(bump_medium):
    wx = weyl_asymptotics(bump_medium)
    assert np.allclose(0.5 * wx.Y0 @ np.linalg.inv(wx.Y1), wx.varpi * N, atol=1e-10)


def test_homogeneous_leading_coefficients(hom_medium):
    wx = weyl_asymptotics(hom_medium)
    assert wx.coupling == pytest.approx(2 / 3)
    assert np.allclose(wx.Y0, 1.5 * np.array([[0, 0], [-2, 0]]), atol=1e-12)
    assert np.allclose(np.diag(wx.Y1), -1.5, atol=1e-12)


def _hom_j(k):
    M = homogeneous_weyl(1.0, 1.0, 1.0, k_to_xi(1.0, 1.0, k))
    Y1 = -1.5 * np.eye(2)
    return j_from_weyl(M, k, Y1, 1.0)


def test_homogeneous_j_decay_and_parity():
    ks = np.geomspace(10, 100, 8)
    jn = [np.max(np.abs(_hom_j(k))) for k in ks]
    jd = [np.max(np.abs(_hom_j(k) - _hom_j(-k))) for k in ks]
    assert loglog_slope(ks, jn) <= -2 + 0.1
    assert loglog_slope(ks, jd) <= -3 + 0.1


def test_cauchy_partition_is_exact(hom_data):
    p = cauchy_reconstruct(hom_data, 2.0 + 1.0j)
    parts = p.constant + p.evanescent + p.evanescent_tail + p.radiating + p.guided
    assert np.array_equal(parts, p.total)


def test_cauchy_with_planted_pole_only(hom_data):
    d = SpectralData.from_dict(hom_data.to_dict())
    d.branch_T = np.zeros_like(d.branch_T)
    d.Y = [np.zeros((2, 2))] * 4
    alpha = np.array([[1.0, 2.0], [3.0, 4.0]])
    d.residues = [alpha]
    z = 0.3 + 0.7j
    assert np.allclose(cauchy_reconstruct(d, z).total, alpha / (z - d.poles[0] ** 2), atol=1e-15)


def test_spectral_data_json_round_trip(hom_data, tmp_path):
    path = tmp_path / "sd.json"
    hom_data.to_json(path)
    back = SpectralData.from_json(path)
    assert back.to_dict() == hom_data.to_dict()
