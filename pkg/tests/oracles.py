"""Independent reference values that share no code with the package."""

import numpy as np


def rayleigh_speed_ratio(lambda0: float, mu0: float, tol: float = 1e-14) -> float:
    """c_R / c_S from the classical Rayleigh cubic, by bisection on (0, 1).

    With s = (c/c_S)^2 and g = mu/(lambda + 2 mu):  s^3 - 8 s^2 + (24 - 16 g) s - 16 (1 - g) = 0.
    """
    g = mu0 / (lambda0 + 2 * mu0)
    f = lambda s: s**3 - 8 * s**2 + (24 - 16 * g) * s - 16 * (1 - g)
    lo, hi = 1e-12, 1.0 - 1e-15
    if f(lo) * f(hi) > 0:
        raise ValueError("no Rayleigh root in (0, 1)")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(lo) * f(mid) <= 0:
            hi = mid
        else:
            lo = mid
    return float(np.sqrt(0.5 * (lo + hi)))


def homogeneous_G(c0: float, H: float):
    """G(H) for constant coefficients: [[1, 0], [-c0 H / 2, 1]]."""
    return np.array([[1.0, 0.0], [-0.5 * c0 * H, 1.0]])


def loglog_slope(x, y) -> float:
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])
