"""Elastic medium: a slab of depth-dependent Lamé profiles bonded to a homogeneous half-space.

Profiles are built from compactly supported C^3 bumps ``B(t) = (1 - t^2)^4`` added to the
half-space constants, so every derivative needed by the transformed potential is available
in closed form. Density is normalized to one throughout.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

_MODEL_FIELDS = {"mu0", "lambda0", "H", "mu_bumps", "lambda_bumps"}


def bump(t, order=0):
    """Derivative of order ``order`` of ``(1 - t^2)^4`` (zero for |t| >= 1)."""
    t = np.asarray(t, dtype=float)
    s = 1.0 - t * t
    inside = np.abs(t) < 1.0
    if order == 0:
        v = s**4
    elif order == 1:
        v = -8.0 * t * s**3
    elif order == 2:
        v = s**2 * (56.0 * t * t - 8.0)
    elif order == 3:
        v = 48.0 * t * s * (3.0 - 7.0 * t * t)
    else:
        raise ValueError("bump derivatives are available up to order 3")
    return np.where(inside, v, 0.0)


@dataclass(frozen=True)
class LameModel:
    """Lamé profiles on [0, H] matched to constants ``mu0``, ``lambda0`` below ``H``.

    Each bump is a triple ``(center, half_width, amplitude)``.
    """

    mu0: float
    lambda0: float
    H: float
    mu_bumps: tuple = field(default_factory=tuple)
    lambda_bumps: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "mu_bumps", _as_bumps(self.mu_bumps))
        object.__setattr__(self, "lambda_bumps", _as_bumps(self.lambda_bumps))
        if not self.H >= 0.0:
            raise ValueError("slab thickness H must be non-negative")
        if not self.mu0 > 0.0:
            raise ValueError("mu0 must be positive")
        if not 2.0 * self.mu0 + 3.0 * self.lambda0 > 0.0:
            raise ValueError("2*mu0 + 3*lambda0 must be positive")

    @property
    def sigma0(self) -> float:
        """P-wave modulus of the half-space, lambda0 + 2 mu0."""
        return self.lambda0 + 2.0 * self.mu0

    @property
    def c0(self) -> float:
        """Background coupling (lambda0 + mu0)/(lambda0 + 2 mu0)."""
        return (self.lambda0 + self.mu0) / self.sigma0

    @property
    def is_homogeneous(self) -> bool:
        return not any(a != 0.0 for _, _, a in self.mu_bumps + self.lambda_bumps)

    def to_dict(self) -> dict:
        return {
            "mu0": self.mu0,
            "lambda0": self.lambda0,
            "H": self.H,
            "mu_bumps": [list(b) for b in self.mu_bumps],
            "lambda_bumps": [list(b) for b in self.lambda_bumps],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "LameModel":
        unknown = set(data) - _MODEL_FIELDS
        if unknown:
            raise ValueError(f"unknown model fields: {sorted(unknown)}")
        missing = {"mu0", "lambda0", "H"} - set(data)
        if missing:
            raise ValueError(f"missing model fields: {sorted(missing)}")
        return cls(
            mu0=float(data["mu0"]),
            lambda0=float(data["lambda0"]),
            H=float(data["H"]),
            mu_bumps=data.get("mu_bumps", []),
            lambda_bumps=data.get("lambda_bumps", []),
        )

    @classmethod
    def from_json(cls, path) -> "LameModel":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def _as_bumps(bumps: Sequence) -> tuple:
    out = []
    for b in bumps:
        if len(b) != 3:
            raise ValueError("each bump must be (center, half_width, amplitude)")
        c, w, a = (float(v) for v in b)
        if not w > 0.0:
            raise ValueError("bump half-width must be positive")
        out.append((c, w, a))
    return tuple(out)


def evaluate_profile(model: LameModel, which: str, x, order: int = 0):
    """Value or derivative (``order`` <= 3) of the ``mu`` or ``lambda`` profile at depth ``x``."""
    if which == "mu":
        base, bumps = model.mu0, model.mu_bumps
    elif which == "lambda":
        base, bumps = model.lambda0, model.lambda_bumps
    else:
        raise ValueError("which must be 'mu' or 'lambda'")
    if not 0 <= order <= 3:
        raise ValueError("order must be between 0 and 3")
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0):
        raise ValueError("depth must be non-negative")
    out = np.full(xa.shape, base if order == 0 else 0.0)
    for c, w, a in bumps:
        out = out + a * w ** (-order) * bump((xa - c) / w, order)
    # Exactly constant below the slab.
    out = np.where(xa >= model.H, base if order == 0 else 0.0, out)
    return out if out.ndim else float(out)


def profile_jet(model: LameModel, x):
    """Arrays (mu, mu', mu'', mu''') and (lam, lam', lam'', lam''') at ``x``."""
    mu = np.array([evaluate_profile(model, "mu", x, k) for k in range(4)])
    lam = np.array([evaluate_profile(model, "lambda", x, k) for k in range(4)])
    return mu, lam


def inverse_mu_jet(mu):
    """Derivatives of 1/mu up to third order from the jet (mu, mu', mu'', mu''')."""
    m, m1, m2, m3 = mu
    r0 = 1.0 / m
    r1 = -m1 / m**2
    r2 = -m2 / m**2 + 2.0 * m1**2 / m**3
    r3 = -m3 / m**2 + 6.0 * m1 * m2 / m**3 - 6.0 * m1**3 / m**4
    return np.array([r0, r1, r2, r3])


@dataclass(frozen=True)
class BoundaryTheta:
    """Boundary constants of the Robin matrix Theta(xi) = [[-theta3, theta2], [2 varpi xi^2 - theta1, 0]]."""

    theta1: float
    theta2: float
    theta3: float
    varpi: float

    def matrix(self, xi):
        xi = complex(xi)
        return np.array(
            [[-self.theta3, self.theta2], [2.0 * self.varpi * xi * xi - self.theta1, 0.0]],
            dtype=complex,
        )

    @property
    def coupling(self) -> float:
        """1 - 2 varpi theta2, equal to (lambda(0)+mu(0))/(lambda(0)+2mu(0))."""
        return 1.0 - 2.0 * self.varpi * self.theta2


def boundary_theta(model: LameModel, omega: float) -> BoundaryTheta:
    mu, lam = profile_jet(model, 0.0)
    rmu = inverse_mu_jet(mu)
    m0, l0 = mu[0], lam[0]
    varpi = model.mu0 / m0
    theta3 = mu[1] / m0
    theta2 = m0**2 / (2.0 * model.mu0 * (l0 + 2.0 * m0))
    theta1 = varpi * (omega**2 / m0 + m0 * rmu[2])
    return BoundaryTheta(float(theta1), float(theta2), float(theta3), float(varpi))


@dataclass
class Diagnostics:
    ok: bool
    min_mu: float
    min_mu_at: float
    min_stiffness: float
    min_stiffness_at: float
    messages: list

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "min_mu": self.min_mu,
            "min_mu_at": self.min_mu_at,
            "min_2mu_plus_3lambda": self.min_stiffness,
            "min_2mu_plus_3lambda_at": self.min_stiffness_at,
            "messages": list(self.messages),
        }


def validate(model: LameModel, alpha0: float = 0.0, beta0: float = 0.0, n: int = 2048) -> Diagnostics:
    """Check positivity of mu and 2mu+3lambda on a dense grid and bump containment in (0, H)."""
    msgs = []
    for name, bumps in (("mu", model.mu_bumps), ("lambda", model.lambda_bumps)):
        for c, w, a in bumps:
            if not (c - w > 0.0 and c + w < model.H):
                msgs.append(
                    f"{name} bump (c={c}, w={w}) support [{c - w}, {c + w}] not inside (0, {model.H})"
                )
    x = np.linspace(0.0, model.H, n) if model.H > 0 else np.zeros(1)
    mu = evaluate_profile(model, "mu", x)
    lam = evaluate_profile(model, "lambda", x)
    stiff = 2.0 * mu + 3.0 * lam
    i, j = int(np.argmin(mu)), int(np.argmin(stiff))
    if mu[i] <= alpha0 or model.mu0 <= alpha0:
        msgs.append(f"mu <= {alpha0}: min mu = {mu[i]:.6g} at x = {x[i]:.6g}")
    if stiff[j] <= beta0:
        msgs.append(f"2mu + 3lambda <= {beta0}: min = {stiff[j]:.6g} at x = {x[j]:.6g}")
    return Diagnostics(not msgs, float(mu[i]), float(x[i]), float(stiff[j]), float(x[j]), msgs)
