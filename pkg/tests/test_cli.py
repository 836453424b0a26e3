import json

import numpy as np
import pytest

from rayleigh_spectral.cli import main
from rayleigh_spectral.model import LameModel
from rayleigh_spectral.spectral import SpectralData


@pytest.fixture()
def model_file(tmp_path):
    p = tmp_path / "hom.json"
    p.write_text(json.dumps(LameModel(1.0, 1.0, 0.0).to_dict()))
    return p


def test_usage_errors(model_file, tmp_path):
    assert main(["forward"]) == 1
    assert main(["bogus"]) == 1
    assert main(["invert", "--model", str(model_file), "--omega", "1", "--omega2", "1"]) == 1
    assert main(["forward", "--model", str(model_file), "--omega", "-1"]) == 1
    assert main(["verify", "--model", str(model_file), "--tol", "cauchy"]) == 1
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"not_a_field": 1}))
    assert main(["validate", "--model", str(model_file), "--config", str(cfg)]) == 1


def test_validate_exit_codes(model_file, tmp_path):
    assert main(["validate", "--model", str(model_file)]) == 0
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(LameModel(1.0, 1.0, 1.0, mu_bumps=[(0.5, 0.4, -2.0)]).to_dict()))
    assert main(["validate", "--model", str(bad)]) == 2


def test_forward_is_deterministic_and_config_overrides(model_file, tmp_path):
    cfg = tmp_path / "cfg.json"
    outs = []
    for name in ("a", "b"):
        cfg.write_text(json.dumps({"omega2": 2.0, "out": str(tmp_path / name), "grid": 5}))
        assert main(["forward", "--model", str(model_file), "--config", str(cfg)]) == 0
        outs.append(tmp_path / name)
    files = sorted(p.name for p in outs[0].iterdir())
    assert files == ["forward_omega1.csv", "forward_omega2.csv", "spectral_omega1.json", "spectral_omega2.json"]
    for f in files:
        assert (outs[0] / f).read_bytes() == (outs[1] / f).read_bytes()
    header = (outs[0] / "forward_omega1.csv").read_text().splitlines()[0]
    assert header.startswith("xi,M11_re,M11_im") and header.endswith("detF_re,detF_im,delta_R")
    a = SpectralData.from_json(outs[0] / "spectral_omega1.json")
    b = SpectralData.from_json(outs[0] / "spectral_omega2.json")
    assert a.model_hash == b.model_hash
    assert len(a.poles) == 1 and a.poles[0] == pytest.approx(1 / 0.9194017, rel=1e-6)


def test_modes_and_spectral_tables(model_file, tmp_path):
    out = tmp_path / "o"
    assert main(["modes", "--model", str(model_file), "--out", str(out)]) == 0
    rows = (out / "modes_omega1.csv").read_text().splitlines()
    assert rows[0].split(",")[:3] == ["index", "xi", "phase_velocity"] and len(rows) == 2
    assert main(["spectral", "--model", str(model_file), "--out", str(out)]) == 0
    assert (out / "branch_omega1.csv").read_text().startswith("eta,section,weight,T11_re")


def test_verify_passes_then_catches_scaled_residues(model_file, tmp_path):
    out = tmp_path / "v"
    assert main(["verify", "--model", str(model_file), "--out", str(out)]) == 0
    report = json.loads((out / "verify_report.json").read_text())
    assert all(c["verdict"] != "fail" for c in report["checks"])
    assert main(["forward", "--model", str(model_file), "--out", str(out), "--grid", "3"]) == 0
    sd = SpectralData.from_json(out / "spectral_omega1.json")
    sd.residues = [1.5 * r for r in sd.residues]
    bad = out / "corrupt.json"
    sd.to_json(bad)
    code = main(["verify", "--model", str(model_file), "--data", str(bad), "--out", str(out)])
    report = json.loads((out / "verify_report.json").read_text())
    failed = [c["name"] for c in report["checks"] if c["verdict"] == "fail"]
    assert "cauchy_closure" in failed and code == 2 + len(failed)


def test_tight_tolerance_override_fails(model_file, tmp_path):
    code = main(["verify", "--model", str(model_file), "--out", str(tmp_path), "--tol", "detG=-1"])
    assert code == 3


def test_invert_round_trip_homogeneous(model_file, tmp_path):
    out = tmp_path / "inv"
    assert main(["forward", "--model", str(model_file), "--omega2", "2", "--out", str(out), "--grid", "3"]) == 0
    data = [str(out / "spectral_omega1.json"), str(out / "spectral_omega2.json")]
    assert main(["invert", "--data", *data, "--model", str(model_file), "--out", str(out), "--grid", "4"]) == 0
    rep = json.loads((out / "invert_report.json").read_text())
    assert rep["GH_error"] < 1e-6 and rep["lame_error"] < 1e-6
    lame = np.loadtxt(out / "lame.csv", delimiter=",", skiprows=1, ndmin=2)
    assert np.allclose(lame[:, 1:], [1.0, 1.0], atol=1e-6)
    assert main(["invert", "--data", data[0], data[0]]) == 1
