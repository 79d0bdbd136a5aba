"""Curvature-parameter trigonometry: S_kappa, C_kappa, T_kappa.

kappa > 0 is the sphere, kappa = 0 the plane, kappa < 0 the pseudosphere;
all three branches are continuous in kappa at kappa = 0.
"""

import numpy as np

from .errors import PoleOfTangent

_POLE_TOL = 1e-12


def S_kappa(kappa: float, x):
    """sin(sqrt(k)x)/sqrt(k) for k>0, x for k=0, sinh(sqrt(-k)x)/sqrt(-k) for k<0."""
    if kappa > 0:
        rk = np.sqrt(kappa)
        return np.sin(rk * x) / rk
    if kappa < 0:
        rk = np.sqrt(-kappa)
        return np.sinh(rk * x) / rk
    return np.asarray(x, dtype=float) if np.ndim(x) else float(x)


def C_kappa(kappa: float, x):
    """cos(sqrt(k)x) for k>0, 1 for k=0, cosh(sqrt(-k)x) for k<0."""
    if kappa > 0:
        return np.cos(np.sqrt(kappa) * x)
    if kappa < 0:
        return np.cosh(np.sqrt(-kappa) * x)
    return np.ones_like(np.asarray(x, dtype=float)) if np.ndim(x) else 1.0


def T_kappa(kappa: float, x):
    """S_kappa/C_kappa; raises PoleOfTangent at zeros of C_kappa."""
    c = C_kappa(kappa, x)
    if np.any(np.abs(c) < _POLE_TOL):
        raise PoleOfTangent(f"C_kappa vanishes at kappa={kappa}, x={x}")
    return S_kappa(kappa, x) / c


def kappa_functions(kappa: float, x: float) -> tuple[float, float, float]:
    """Return the triple (S_kappa(x), C_kappa(x), T_kappa(x))."""
    if not np.isfinite(x):
        raise ValueError("x must be finite")
    return S_kappa(kappa, x), C_kappa(kappa, x), T_kappa(kappa, x)
