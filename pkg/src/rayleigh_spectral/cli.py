"""Command-line front end: validate, forward, modes, spectral, invert, verify.

Exit codes: 0 success, 1 usage error, 2 numerical failure. ``verify`` exits with 2 + the number
of failed checks when any check fails.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import glinverse as gli
from .jost import jost_solution, make_medium, wronskian, wronskian_closed_form
from .markushevich import potential_Q, potential_Q0_and_V, solve_G
from .model import LameModel, evaluate_profile, validate
from .riemann import as_point
from .spectral import (
    SpectralData,
    boundary_identities,
    branch_density,
    cauchy_reconstruct,
    det_jost,
    homogeneous_weyl,
    rayleigh_determinant,
    spectral_data,
    weyl_matrix,
)

COMMANDS = ("validate", "forward", "modes", "spectral", "invert", "verify")
FMT = "%.17g"


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    model_path: str | None = None
    omega: float = 1.0
    omega2: float | None = None
    out: str = "."
    xi_max: float | None = None
    grid: int = 64
    tol: dict = field(default_factory=dict)
    data: list = field(default_factory=list)

    def check(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if not self.omega > 0 or (self.omega2 is not None and not self.omega2 > 0):
            raise UsageError("omega must be positive")
        if self.command == "invert":
            w2 = self.omega2 if self.omega2 is not None else 2 * self.omega
            if w2 == self.omega and not self.data:
                raise UsageError("invert needs two distinct frequencies")
        if self.command in ("validate", "forward", "verify") and not self.model_path:
            raise UsageError(f"{self.command} needs --model")
        if self.command in ("modes", "spectral", "invert") and not (self.model_path or self.data):
            raise UsageError(f"{self.command} needs --model or --data")
        if self.grid < 2:
            raise UsageError("--grid must be at least 2")


def _dump_json(obj, path: Path):
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _write_csv(path: Path, header, rows):
    np.savetxt(path, np.asarray(rows, dtype=float).reshape(-1, len(header)), fmt=FMT, delimiter=",",
               header=",".join(header), comments="")


def _cols(prefix, m):
    m = np.asarray(m, dtype=complex).ravel()
    names = [f"{prefix}{i}{j}_{p}" for i in (1, 2) for j in (1, 2) for p in ("re", "im")]
    vals = [v for z in m for v in (z.real, z.imag)]
    return names, vals


def _freqs(cfg: RunConfig):
    return [cfg.omega] if cfg.omega2 is None else [cfg.omega, cfg.omega2]


def _load_model(cfg: RunConfig) -> LameModel:
    return LameModel.from_json(cfg.model_path)


# ---------------------------------------------------------------------------


def run_validate(cfg: RunConfig) -> int:
    diag = validate(_load_model(cfg))
    print(json.dumps(diag.to_dict(), indent=2, sort_keys=True))
    return 0 if diag.ok else 2


def run_forward(cfg: RunConfig) -> list:
    model = _load_model(cfg)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    gmat = solve_G(model)
    files = []
    for w in _freqs(cfg):
        med = make_medium(model, w, gmat)
        sd = spectral_data(med, xi_max=cfg.xi_max)
        path = out / f"spectral_omega{w:g}.json"
        sd.to_json(path)
        files.append(path)
        a = w / np.sqrt(model.mu0)
        xi = np.linspace(a * 1.001, cfg.xi_max or 3 * a, cfg.grid)
        header, rows = None, []
        for x in xi:
            names, vals = _cols("M", weyl_matrix(med, x))
            d = det_jost(med, x)
            header = ["xi"] + names + ["detF_re", "detF_im", "delta_R"]
            rows.append([x] + vals + [d.real, d.imag, rayleigh_determinant(w, x, model.lambda0, model.mu0).real])
        _write_csv(out / f"forward_omega{w:g}.csv", header, rows)
    return files


def _spectral_sets(cfg: RunConfig) -> list:
    if cfg.data:
        return [SpectralData.from_json(p) for p in cfg.data]
    model = _load_model(cfg)
    gmat = solve_G(model)
    return [spectral_data(make_medium(model, w, gmat), xi_max=cfg.xi_max) for w in _freqs(cfg)]


def run_modes(cfg: RunConfig) -> int:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    for sd in _spectral_sets(cfg):
        rows, header = [], None
        for j, (xi, al) in enumerate(zip(sd.poles, sd.residues), start=1):
            names, vals = _cols("alpha", al)
            sv = np.linalg.svd(al, compute_uv=False)
            header = ["index", "xi", "phase_velocity"] + names + ["sv1", "sv2"]
            rows.append([j, xi, sd.omega / xi] + vals + list(sv))
        header = header or ["index", "xi", "phase_velocity"]
        _write_csv(out / f"modes_omega{sd.omega:g}.csv", header, rows)
    return 0


def run_spectral(cfg: RunConfig) -> int:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    codes = {"evanescent": 0, "radiating": 1}
    for sd in _spectral_sets(cfg):
        header = ["eta", "section", "weight"] + _cols("T", np.zeros((2, 2)))[0]
        rows = [[e, codes[s], w] + _cols("T", T)[1]
                for e, s, w, T in zip(sd.branch_eta, sd.branch_section, sd.branch_weight, sd.branch_T)]
        _write_csv(out / f"branch_omega{sd.omega:g}.csv", header, rows)
    return 0


def run_invert(cfg: RunConfig) -> dict:
    if cfg.data:
        if len(cfg.data) != 2:
            raise UsageError("invert needs exactly two spectral data files")
        sds = [SpectralData.from_json(p) for p in cfg.data]
        model = _load_model(cfg) if cfg.model_path else None
    else:
        cfg = RunConfig(**{**cfg.__dict__, "omega2": cfg.omega2 or 2 * cfg.omega})
        model = _load_model(cfg)
        gmat = solve_G(model)
        sds = [spectral_data(make_medium(model, w, gmat), xi_max=cfg.xi_max) for w in _freqs(cfg)]
    s1, s2 = sds
    if s1.omega == s2.omega:
        raise UsageError("the two spectral data files share one frequency")
    if s1.model_hash != s2.model_hash:
        raise UsageError("spectral data files come from different models")
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    GH, rep = gli.recover_GH(s1.jost_boundary, s2.jost_boundary, s1.omega, s2.omega, s1.lambda0, s1.mu0, s1.H)
    report = {"GH": GH.tolist(), "GH_checks": rep}
    c0 = (s1.lambda0 + s1.mu0) / (s1.lambda0 + 2 * s1.mu0)
    if s1.H > 0:
        gl = gli.build_j(s1)
        xg = np.linspace(s1.H / cfg.grid, s1.H, cfg.grid)
        ker = gli.solve_GL(gl, xg)
        Vc = gli.recover_projected_V(ker, gl.T0, GH, s1.omega, s1.mu0, c0, s1.H)
        header, cols = ["x", "Vc1", "Vc2"], [xg, Vc[:, 0], Vc[:, 1]]
        if model is not None:
            gm = solve_G(model)
            truth = potential_Q0_and_V(model, gm, s1.omega, xg)[1] @ gm.GH[0]
            header += ["Vc1_forward", "Vc2_forward"]
            cols += [truth[:, 0], truth[:, 1]]
            err, scale = float(np.max(np.abs(Vc - truth))), float(np.max(np.abs(truth)))
            report["Vc_max_error"] = err
            if scale > 0:
                report["Vc_relative_error"] = err / scale
        _write_csv(out / "projected_V.csv", header, np.column_stack(cols))
        report["GL_contraction_max"] = float(max(ker.contraction))
    if model is not None:
        gm = solve_G(model)
        report["GH_error"] = float(np.max(np.abs(GH - gm.GH)))
        x = np.linspace(0.0, model.H, cfg.grid) if model.H > 0 else np.zeros(1)
        lam, mu = gli.recover_lame_from_Q(potential_Q(model, gm, s1.omega, x), potential_Q(model, gm, s2.omega, x),
                                          s1.omega, s2.omega)
        _write_csv(out / "lame.csv", ["x", "lambda", "mu"], np.column_stack([x, lam, mu]))
        report["lame_error"] = float(max(np.max(np.abs(lam - evaluate_profile(model, "lambda", x))),
                                         np.max(np.abs(mu - evaluate_profile(model, "mu", x)))))
    _dump_json(report, out / "invert_report.json")
    return report


# ---------------------------------------------------------------------------
# verification suite


def _check(name, value, tol, info=False):
    return {"name": name, "value": float(value), "tol": float(tol),
            "verdict": "info" if info else ("pass" if value <= tol else "fail")}


def verify_suite(model: LameModel, omega: float, tol: dict | None = None, sd: SpectralData | None = None) -> list:
    """Run the invariant checks on one model and frequency."""
    tol = {"detG": 1e-10, "wronskian": 1e-8, "conjugation": 1e-9, "homogeneous": 1e-8, "boundary": 1e-8,
           "cauchy": 1e-3, "jump": 1e-8, "gl_uniqueness": 1e-10, "e_identity": 1e-12, **(tol or {})}
    gm = solve_G(model)
    med = make_medium(model, omega, gm)
    a = omega / np.sqrt(model.mu0)
    out = []
    x = np.linspace(0.0, max(model.H, 1.0), 257)
    out.append(_check("detG", np.max(np.abs(np.linalg.det(gm(x)) - 1)), tol["detG"]))
    w = 0.0
    for xi in map(as_point, (1.5 * a, 3.0 * a, a * (0.7 + 0.6j))):
        Fa, Fap = jost_solution(med, xi.negated(), adjoint=True).at0()
        F, Fp = jost_solution(med, xi).at0()
        ref = wronskian_closed_form(med, xi)
        w = max(w, np.max(np.abs(wronskian(Fa, Fap, F, Fp) - ref)) / np.max(np.abs(ref)))
    out.append(_check("wronskian", w, tol["wronskian"]))
    z = a * (1.3 + 0.4j)
    out.append(_check("conjugation", np.max(np.abs(weyl_matrix(med, np.conj(z)) - np.conj(weyl_matrix(med, z)))),
                      tol["conjugation"]))
    if model.is_homogeneous:
        pts = [a * s for s in (1.2, 2.0, 5.0, 0.9 + 0.5j, 3.0 - 1.0j)]
        d = max(np.max(np.abs(weyl_matrix(med, p) - homogeneous_weyl(omega, model.lambda0, model.mu0, p)))
                for p in pts)
        out.append(_check("homogeneous_oracle", d, tol["homogeneous"]))
    bi = boundary_identities(med, 2.0 * a)
    out.append(_check("boundary_identities", max(bi.jost_from_B, bi.adjoint_from_B, bi.adjoint_relation, bi.nd),
                      tol["boundary"]))
    jump = max(np.max(np.abs(branch_density(med, e, "jump") - branch_density(med, e, "wronskian")))
               / np.max(np.abs(branch_density(med, e, "jump"))) for e in (-4.0 * a * a, -0.5 * a * a, -0.01))
    out.append(_check("jump_identity_evanescent", jump, tol["jump"]))
    if sd is None:
        sd = spectral_data(med)
    cz = 0.0
    for zeta in (2 * a * a + 1j, -a * a + 0.5j, 0.5 * a * a + 0.3j):
        ref = weyl_matrix(med, np.sqrt(zeta))
        cz = max(cz, np.max(np.abs(cauchy_reconstruct(sd, zeta).total - ref)) / np.max(np.abs(ref)))
    out.append(_check("cauchy_closure", cz, tol["cauchy"]))
    for j, al in enumerate(sd.residues, start=1):
        sv = np.linalg.svd(al, compute_uv=False)
        out.append(_check(f"residue_rank_pole{j}", sv[1] / sv[0], 0.0, info=True))
    gl = gli.build_j(sd)
    norms = gli.homogeneous_iteration(gl, max(model.H, 1.0), steps=100)
    out.append(_check("gl_uniqueness", norms[-1] / norms[0], tol["gl_uniqueness"]))
    xs = np.linspace(-2, 2, 9)
    e_sum = gli.e_matrix(xs, 1.7, sd.varpi) + gli.e_matrix(-xs, 1.7, sd.varpi)
    out.append(_check("e_identity", np.max(np.abs(e_sum - 2 * np.cos(1.7 * xs)[:, None, None] * np.eye(2))),
                      tol["e_identity"]))
    return out


def run_verify(cfg: RunConfig) -> int:
    model = _load_model(cfg)
    sd = SpectralData.from_json(cfg.data[0]) if cfg.data else None
    res = verify_suite(model, cfg.omega, cfg.tol, sd)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    _dump_json({"omega": cfg.omega, "checks": res}, out / "verify_report.json")
    for r in res:
        print(f"{r['verdict']:5s} {r['name']}: {r['value']:.3e} (tol {r['tol']:.1e})")
    failed = sum(r["verdict"] == "fail" for r in res)
    return 0 if failed == 0 else 2 + failed


# ---------------------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="rayleigh-spectral", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--model", dest="model_path")
    p.add_argument("--omega", type=float, default=1.0)
    p.add_argument("--omega2", type=float)
    p.add_argument("--out", default=".")
    p.add_argument("--xi-max", dest="xi_max", type=float)
    p.add_argument("--grid", type=int, default=64)
    p.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE",
                   help="tolerance override for one verify check")
    p.add_argument("--data", nargs="+", default=[], help="SpectralData JSON files")
    p.add_argument("--config", help="JSON file whose keys override the flags")
    return p


def parse_config(argv) -> RunConfig:
    args = build_parser().parse_args(argv)
    vals = {k: v for k, v in vars(args).items() if k != "config"}
    tol = {}
    for item in vals.pop("tol"):
        name, sep, v = item.partition("=")
        if not sep:
            raise UsageError(f"--tol expects NAME=VALUE, got {item!r}")
        tol[name] = float(v)
    vals["tol"] = tol
    if args.config:
        extra = json.loads(Path(args.config).read_text())
        unknown = set(extra) - set(RunConfig.__dataclass_fields__)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        vals.update(extra)
    cfg = RunConfig(**vals)
    cfg.check()
    return cfg


def main(argv=None) -> int:
    try:
        cfg = parse_config(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 1
    except (UsageError, json.JSONDecodeError, OSError) as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 1
    try:
        if cfg.command == "validate":
            return run_validate(cfg)
        if cfg.command == "forward":
            for f in run_forward(cfg):
                print(f)
            return 0
        if cfg.command == "modes":
            return run_modes(cfg)
        if cfg.command == "spectral":
            return run_spectral(cfg)
        if cfg.command == "invert":
            print(json.dumps(run_invert(cfg), indent=2, sort_keys=True))
            return 0
        return run_verify(cfg)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 1
    except (ArithmeticError, ValueError, RuntimeError, np.linalg.LinAlgError) as e:
        mod = type(e).__module__.rsplit(".", 1)[-1]
        print(f"[{mod}] {type(e).__name__}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
