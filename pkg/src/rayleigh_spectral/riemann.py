"""Branch-consistent quasi-momenta on the physical sheet and the xi <-> k, xi <-> zeta maps.

The physical sheet is the xi-plane cut along [-a, a] and the imaginary axis, where
``a = omega/sqrt(speed_sq)``; the square root ``q = sqrt(omega^2/speed_sq - xi^2)`` is taken with
``Im q > 0`` for ``Re xi > 0`` and ``Im q < 0`` for ``Re xi < 0``.

Points on a cut carry a side tag. On the real segment ``plus_i0`` means the limit from
``Im xi > 0``; on the imaginary axis it means the limit from ``Re xi > 0``. ``minus_i0`` is the
opposite side in both cases.

Only the real segment is a cut of q itself: ``q = i xi sqrt(1 - a^2/xi^2)`` is analytic across the
imaginary axis, where ``q(i s) = -sign(s) sqrt(a^2 + s^2)`` from either side. The imaginary axis
is kept as a cut because it bounds the half-sheets and maps onto the negative zeta axis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

INTERIOR, PLUS, MINUS = "interior", "plus_i0", "minus_i0"
_SIDES = (INTERIOR, PLUS, MINUS)
BRANCH_TOL = 1e-10


@dataclass(frozen=True)
class SheetPoint:
    xi: complex
    side: str = INTERIOR

    def __post_init__(self):
        if self.side not in _SIDES:
            raise ValueError(f"side must be one of {_SIDES}")
        object.__setattr__(self, "xi", complex(self.xi))

    def negated(self) -> "SheetPoint":
        """The point -xi; the side flips because -(xi + i0) = -xi - i0."""
        flip = {INTERIOR: INTERIOR, PLUS: MINUS, MINUS: PLUS}
        return SheetPoint(-self.xi, flip[self.side])

    def conjugated(self) -> "SheetPoint":
        """The point conj(xi). On the real segment the side flips, on the imaginary axis it does not."""
        xi = self.xi.conjugate()
        if self.side == INTERIOR or self.xi.real == 0.0:
            return SheetPoint(xi, self.side)
        return SheetPoint(xi, MINUS if self.side == PLUS else PLUS)


def as_point(p) -> SheetPoint:
    return p if isinstance(p, SheetPoint) else SheetPoint(complex(p))


def on_cut(xi: complex, cut_half_width: float) -> bool:
    """True when ``xi`` lies on [-a, a] or on the imaginary axis."""
    return xi.real == 0.0 or (xi.imag == 0.0 and abs(xi.real) <= cut_half_width)


def quasi_momentum(omega: float, speed_sq: float, p) -> complex:
    """sqrt(omega^2/speed_sq - xi^2) on the physical sheet, or its one-sided limit on a cut."""
    if not speed_sq > 0:
        raise ValueError("speed_sq must be positive")
    p = as_point(p)
    xi = p.xi
    a = omega / np.sqrt(speed_sq)
    w = omega**2 / speed_sq - xi * xi
    if on_cut(xi, a):
        if xi.imag == 0.0:
            if w.real <= 0.0:
                # Beyond the branch point the root is imaginary and continuous across the axis.
                return 1j * np.sign(xi.real) * np.sqrt(-w.real) if xi.real != 0 else 0j
            if p.side == INTERIOR:
                raise ValueError(f"xi={xi} lies on a cut; specify plus_i0 or minus_i0")
            r = np.sqrt(w.real)
            return complex(-r if p.side == PLUS else r)
        if p.side == INTERIOR:
            raise ValueError(f"xi={xi} lies on the imaginary-axis cut; specify a side")
        # q = i xi sqrt(1 - a^2/xi^2) is analytic across the imaginary axis, so both sides agree.
        return complex(-np.sign(xi.imag) * np.sqrt(w.real))
    if p.side == INTERIOR and min(abs(xi - a), abs(xi + a)) < BRANCH_TOL * max(1.0, a):
        raise ValueError("xi too close to a branch point")
    q = np.sqrt(complex(w))
    if np.sign(q.imag) != np.sign(xi.real):
        q = -q
    return complex(q)


def q_pair(omega: float, lambda0: float, mu0: float, p):
    """(q_P, q_S) at a sheet point."""
    p = as_point(p)
    return (
        quasi_momentum(omega, lambda0 + 2.0 * mu0, p),
        quasi_momentum(omega, mu0, p),
    )


def xi_to_k(omega: float, mu0: float, p) -> complex:
    """k = q_S(xi); maps the physical half-sheet Re xi > 0 onto Im k > 0 and its boundary onto the real line."""
    p = as_point(p)
    if p.xi.real < 0 or (p.xi.real == 0 and p.side != PLUS):
        raise ValueError("xi must lie in the right half-sheet (or on its boundary, side plus_i0 on the imaginary axis)")
    return quasi_momentum(omega, mu0, p)


def k_to_xi(omega: float, mu0: float, k: complex) -> SheetPoint:
    """Inverse of :func:`xi_to_k`. Real k returns the boundary point with its side tag."""
    k = complex(k)
    if k.imag < 0:
        raise ValueError("k must satisfy Im k >= 0")
    a2 = omega**2 / mu0
    xi = np.sqrt(complex(a2 - k * k))
    if k.imag > 0:
        return SheetPoint(xi)
    kr = k.real
    if kr == 0.0:
        raise ValueError("k = 0 is the branch point")
    if abs(kr) < np.sqrt(a2):
        # q_S(xi - i0) = +|.|, so positive k is approached from below the real segment.
        return SheetPoint(complex(np.sqrt(a2 - kr * kr)), MINUS if kr > 0 else PLUS)
    if abs(kr) == np.sqrt(a2):
        raise ValueError("xi = 0 is not a valid sheet point")
    s = np.sqrt(kr * kr - a2)
    # On the imaginary axis from the right: q_S(i s + 0) = -sign(s)|.|.
    return SheetPoint(complex(0.0, -s if kr > 0 else s), PLUS)


def zeta(p) -> complex:
    return as_point(p).xi ** 2


def sqrt_zeta(z: complex, cut_end: float, side: str = INTERIOR) -> SheetPoint:
    """xi = sqrt(zeta) with Re xi > 0; ``side`` selects zeta +- i0 on the cut (-inf, cut_end]."""
    z = complex(z)
    if not (z.imag == 0.0 and z.real <= cut_end):
        return SheetPoint(np.sqrt(z))
    if side == INTERIOR:
        raise ValueError("zeta on the cut requires a side tag")
    x = z.real
    if x > 0:
        return SheetPoint(complex(np.sqrt(x)), side)
    if x == 0:
        raise ValueError("zeta = 0 maps to xi = 0, which is excluded")
    s = np.sqrt(-x)
    # sqrt(x + i0) = i s + 0 and sqrt(x - i0) = -i s + 0, both reached from Re xi > 0.
    return SheetPoint(complex(0.0, s if side == PLUS else -s), PLUS)
