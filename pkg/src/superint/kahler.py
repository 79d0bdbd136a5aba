"""Kahler geometry of C^N and CP^N: metric, connection, curvature, Killing test."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .phase import EPS_CBRT


@dataclass(frozen=True)
class KaehlerGeometry:
    """Analytic Kahler data in one chart.

    metric(z)[a,b]      = g_{a bbar}
    inverse(z)[a,b]     = g^{a bbar}   (sum_b g^{a bbar} g_{c bbar} = delta_ac)
    christoffel(z)[a,b,c] = Gamma^a_{bc}
    curvature(z)[a,b,c,d] = R_{a bbar c dbar}
    """

    name: str
    N: int
    potential: Callable[[np.ndarray], float]
    metric: Callable[[np.ndarray], np.ndarray]
    inverse: Callable[[np.ndarray], np.ndarray]
    christoffel: Callable[[np.ndarray], np.ndarray]
    curvature: Callable[[np.ndarray], np.ndarray]
    chart_radius: float = 10.0


def flat_space(N: int) -> KaehlerGeometry:
    """C^N with K = z zbar."""
    eye = np.eye(N, dtype=complex)

    return KaehlerGeometry(
        name="flat",
        N=N,
        potential=lambda z: float(np.vdot(z, z).real),
        metric=lambda z: eye.copy(),
        inverse=lambda z: eye.copy(),
        christoffel=lambda z: np.zeros((N, N, N), dtype=complex),
        curvature=lambda z: np.zeros((N, N, N, N), dtype=complex),
    )


def fubini_study(N: int) -> KaehlerGeometry:
    """CP^N in an inhomogeneous chart, K = log(1 + z zbar)."""
    if N < 1:
        raise ValueError("N must be >= 1")

    def metric(z):
        s = 1.0 + np.vdot(z, z).real
        return np.eye(N) / s - np.outer(np.conj(z), z) / s ** 2

    def inverse(z):
        s = 1.0 + np.vdot(z, z).real
        return s * (np.eye(N) + np.outer(z, np.conj(z)))

    def christoffel(z):
        s = 1.0 + np.vdot(z, z).real
        G = np.zeros((N, N, N), dtype=complex)
        zb = np.conj(z)
        for a in range(N):
            G[a, a, :] += -zb / s
            G[a, :, a] += -zb / s
        return G

    def curvature(z):
        g = metric(z)
        # R_{a bbar c dbar} = g_{a bbar} g_{c dbar} + g_{c bbar} g_{a dbar}
        return np.einsum("ab,cd->abcd", g, g) + np.einsum("cb,ad->abcd", g, g)

    return KaehlerGeometry(
        name="fubini_study",
        N=N,
        potential=lambda z: float(np.log1p(np.vdot(z, z).real)),
        metric=metric,
        inverse=inverse,
        christoffel=christoffel,
        curvature=curvature,
    )


def _holo_grad(h: Callable[[np.ndarray], complex], z: np.ndarray) -> np.ndarray:
    """Wirtinger derivative dh/dz^a by central differences."""
    N = z.size
    out = np.empty(N, dtype=complex)
    for a in range(N):
        step = EPS_CBRT * max(1.0, abs(z[a]))
        e = np.zeros(N, dtype=complex)
        e[a] = step
        dre = (h(z + e) - h(z - e)) / (2 * step)
        e[a] = 1j * step
        dim = (h(z + e) - h(z - e)) / (2 * step)
        out[a] = (dre - 1j * dim) / 2
    return out


def _holo_hessian_step(h, z, step_scale):
    N = z.size
    out = np.empty((N, N), dtype=complex)
    for a in range(N):
        step = step_scale * max(1.0, abs(z[a]))
        e = np.zeros(N, dtype=complex)
        e[a] = step
        gp_re = _holo_grad(h, z + e)
        gm_re = _holo_grad(h, z - e)
        e[a] = 1j * step
        gp_im = _holo_grad(h, z + e)
        gm_im = _holo_grad(h, z - e)
        dre = (gp_re - gm_re) / (2 * step)
        dim = (gp_im - gm_im) / (2 * step)
        out[a, :] = (dre - 1j * dim) / 2
    return out


def _holo_hessian(h: Callable[[np.ndarray], complex], z: np.ndarray) -> np.ndarray:
    """d^2 h / dz^a dz^b, nested central differences + one Richardson level."""
    s = 2e-3
    coarse = _holo_hessian_step(h, z, s)
    fine = _holo_hessian_step(h, z, s / 2)
    return (4 * fine - coarse) / 3


def verify_killing_potential(h: Callable[[np.ndarray], complex],
                             geom: KaehlerGeometry, z: np.ndarray) -> float:
    """Max-norm residual of d^2h/dz^a dz^b - Gamma^c_{ab} dh/dz^c at z."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    hess = _holo_hessian(h, z)
    grad = _holo_grad(h, z)
    Gam = geom.christoffel(z)
    resid = hess - np.einsum("cab,c->ab", Gam, grad)
    return float(np.max(np.abs(resid)))


def su_killing_potentials(geom: KaehlerGeometry):
    """Catalog of Killing potentials for the geometry (complex combinations allowed)."""
    N = geom.N
    pots = {}
    if geom.name == "flat":
        for a in range(N):
            for b in range(N):
                pots[f"h_{a}{b}"] = (lambda z, a=a, b=b: np.conj(z[a]) * z[b])
            pots[f"h_plus_{a}"] = (lambda z, a=a: np.conj(z[a]))
            pots[f"h_minus_{a}"] = (lambda z, a=a: z[a])
    else:
        for a in range(N):
            for b in range(N):
                pots[f"h_{a}{b}"] = (lambda z, a=a, b=b:
                                     np.conj(z[a]) * z[b] / (1 + np.vdot(z, z).real))
            pots[f"h_minus_{a}"] = (lambda z, a=a: np.conj(z[a]) / (1 + np.vdot(z, z).real))
            pots[f"h_plus_{a}"] = (lambda z, a=a: z[a] / (1 + np.vdot(z, z).real))
    return pots
