"""Reduction and duality maps: Kustaanheimo-Stiefel, oscillator-Coulomb,
U(1)^N reduction of CP^N-Rosochatius to the spherical Rosochatius system."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateZ, OriginSingularity, UnsupportedFamily
from .phase import (BracketStructure, Observable, PhasePoint, canonical,
                    complex_split, monopole)
from .solutions import effective_frequencies
from .systems import SystemParams, SystemSpec
from . import flows

SIGMA = (np.array([[0, 1], [1, 0]], complex),
         np.array([[0, -1j], [1j, 0]], complex),
         np.array([[1, 0], [0, -1]], complex))


@dataclass(frozen=True)
class KSImage:
    q: np.ndarray
    p: np.ndarray
    s: float                      # U(1) charge, J0 = 2s
    gamma: float                  # (E_SW - B s)/2 on the energy surface

    def point(self) -> PhasePoint:
        return PhasePoint(self.q, self.p)


def ks_transform(spec: SystemSpec, x) -> KSImage:
    """C^2-SW phase point -> 3d Coulomb-like variables q = z sigma zbar."""
    if spec.family != "sw_complex" or spec.params.N != 2:
        raise UnsupportedFamily("KS reduction applies to the C^2 system")
    state = x.state if isinstance(x, PhasePoint) else np.asarray(x, float)
    z, pi = complex_split(state)
    zz = np.vdot(z, z).real
    if zz < 1e-10:
        raise OriginSingularity("z zbar too small for the KS map")
    B = float(spec.params.get("B", 0.0))
    q = np.array([(z @ sig @ np.conj(z)).real for sig in SIGMA])
    p = np.array([((z @ sig @ pi + np.conj(pi) @ sig @ np.conj(z)) / (2 * zz)).real
                  for sig in SIGMA])
    J0 = (1j * (np.dot(z, pi) - np.conj(np.dot(z, pi)))).real - B * zz
    E_SW = complex(spec.hamiltonian(state)).real
    s = J0 / 2
    return KSImage(q=q, p=p, s=s, gamma=(E_SW - B * s) / 2)


def gmicz_system(s: float, gamma: float, g1: float, g2: float) -> SystemSpec:
    """Generalized MICZ-Kepler system with monopole-twisted bracket."""
    params = SystemParams("gmicz", 3, {"s": s, "gamma": gamma, "g1": g1, "g2": g2})

    def H(st):
        q, p = st[:3], st[3:]
        r = np.linalg.norm(q)
        return (0.5 * p @ p + s ** 2 / (2 * r ** 2)
                + g1 ** 2 / (r * (r + q[2])) + g2 ** 2 / (r * (r - q[2]))
                - gamma / r)

    def Jk(k):
        def fn(st, k=k):
            q, p = st[:3], st[3:]
            r = np.linalg.norm(q)
            i, j = (k + 1) % 3, (k + 2) % 3
            return p[i] * q[j] - p[j] * q[i] - s * q[k] / r
        return fn

    def Lint(st):
        return Jk(2)(st)

    def Jint(st):
        q = st[:3]
        r = np.linalg.norm(q)
        return (Jk(0)(st) ** 2 + Jk(1)(st) ** 2
                + g1 ** 2 * (r - q[2]) / (r + q[2])
                + g2 ** 2 * (r + q[2]) / (r - q[2]))

    def Iint(st):
        q, p = st[:3], st[3:]
        r = np.linalg.norm(q)
        return (p[0] * Jk(1)(st) - p[1] * Jk(0)(st) + gamma * q[2] / r
                + g1 ** 2 * (r - q[2]) / (r * (r + q[2]))
                - g2 ** 2 * (r + q[2]) / (r * (r - q[2])))

    integrals = {
        "I": Observable("I", Iint),
        "L": Observable("L", Lint),
        "J": Observable("J", Jint),
    }
    named = dict(integrals)
    named["J1"] = Observable("J1", Jk(0))
    named["J2"] = Observable("J2", Jk(1))
    loci = [("r=0", lambda st: np.linalg.norm(st[:3])),
            ("r+q3=0", lambda st: np.linalg.norm(st[:3]) + st[2]),
            ("r-q3=0", lambda st: np.linalg.norm(st[:3]) - st[2])]

    def guard(st):
        return min(abs(fn(st)) for _, fn in loci)

    def sample(rng):
        q = rng.uniform(0.5, 1.5, 3) * rng.choice([-1.0, 1.0], 3)
        r = np.linalg.norm(q)
        p = rng.normal(size=3)
        p *= 0.5 * np.sqrt(2 * abs(gamma) / r) / np.linalg.norm(p)
        return PhasePoint(q, p)

    return SystemSpec(
        params=params,
        hamiltonian=Observable("H", H),
        bracket=monopole(s, singular_guard=guard),
        integrals=integrals,
        named=named,
        singular_loci=loci,
        sample=sample,
        char_period=2 * np.pi,
        dt_default=5e-4,
        flow=(flows.flow_gmicz, np.array([s, gamma, g1, g2])),
    )


def gmicz_s2_polynomial(vals: dict, s: float, gamma: float, g1: float, g2: float):
    """S^2 in ({I,J})^2 = S^2 for the gMICZ symmetry algebra."""
    H, L, J, I = vals["H"], vals["L"], vals["J"], vals["I"]
    t1 = 4 * g2 ** 2 + (L + s) ** 2
    t2 = 4 * g1 ** 2 + (L - s) ** 2
    Jh = J + 0.5 * (L ** 2 - s ** 2)
    return (2 * H * (4 * Jh ** 2 - t1 * t2)
            - t1 * (I + gamma) ** 2 - t2 * (I - gamma) ** 2
            - 4 * Jh * (I - gamma) * (I + gamma))


# ------------------------------------------------------------- duality map

@dataclass(frozen=True)
class DualityImage:
    Z: complex
    curly_I: float
    Lambda: np.ndarray
    u: np.ndarray
    k: np.ndarray                 # rationality parameters of the Coulomb side


def duality_map(Z: complex, curly_I: float, Lambda, u, k, lam: float = 1.0):
    """Oscillator -> Coulomb map of the Lobachevsky/angle variables.

    Ztilde = i(Zbar - Z) Z/(lam sqrt(I)), Itilde = I/4, Lambdatilde = 2 Lambda,
    utilde = u, ktilde = k/2.
    """
    if lam <= 0:
        raise ValueError("lam must be positive")
    if Z.imag <= 0 or abs(Z.imag) < 1e-14:
        raise DegenerateZ("Im Z must be positive")
    Zt = 1j * (np.conj(Z) - Z) * Z / (lam * np.sqrt(curly_I))
    return DualityImage(Z=complex(Zt), curly_I=curly_I / 4,
                        Lambda=2 * np.asarray(Lambda, float),
                        u=np.asarray(u, complex).copy(),
                        k=np.asarray(k, float) / 2)


def duality_inverse(img: DualityImage, lam: float = 1.0):
    """Coulomb -> oscillator: Z = sqrt(lam) (4 Itilde)^{1/4} Zt/sqrt(i(Ztb - Zt))."""
    Zt = img.Z
    if Zt.imag <= 0:
        raise DegenerateZ("Im Ztilde must be positive")
    denom = np.sqrt(1j * (np.conj(Zt) - Zt))
    Z = np.sqrt(lam) * (4 * img.curly_I) ** 0.25 * Zt / denom
    return complex(Z), 4 * img.curly_I, img.Lambda / 2, img.u.copy(), img.k * 2


def u1_reduce_rosochatius(spec: SystemSpec, p_phi) -> SystemSpec:
    """Fix the U(1) momenta of CP^N-Rosochatius -> spherical Rosochatius in (y, p)."""
    if spec.family != "cpn_rosochatius":
        raise UnsupportedFamily("reduction defined for cpn_rosochatius")
    par = spec.params
    N = par.N
    p_phi = np.asarray(p_phi, float)
    om = np.asarray(par.get("omega_i", np.ones(N + 1)), float)
    B = float(par.get("B", 0.0))
    wt_a2, wt_02 = effective_frequencies(om, p_phi, B)
    E0 = B ** 2 / 4 + float(np.sum(om ** 2))
    params = SystemParams("spherical_rosochatius", N,
                          {"wt_a2": wt_a2, "wt_02": wt_02, "E0": E0,
                           "p_phi": p_phi, "B": B, "omega_i": om})

    def H(st):
        y, p = st[:N], st[N:]
        y2 = float(y @ y)
        kin = 0.25 * (1 + y2) * (p @ p + (y @ p) ** 2)
        pot = (1 + y2) * (wt_02 + np.sum(wt_a2 / y ** 2))
        return kin + pot - E0

    integrals = {}
    wt2 = np.concatenate([[np.nan], wt_a2, [wt_02]])

    def chain(st, upto):
        from .solutions import liouville_chain, spherical_from_y, y_from_spherical
        y, p = st[:N], st[N:]
        theta = spherical_from_y(y)
        J = np.empty((N, N))
        for i in range(N):
            e = np.zeros(N)
            e[i] = 1e-7
            J[:, i] = (y_from_spherical(theta + e) - y_from_spherical(theta - e)) / 2e-7
        p_theta = J.T @ p
        return liouville_chain(theta, p_theta, wt2)[upto]

    for a in range(1, N):
        integrals[f"cal_I_{a}"] = Observable(f"cal_I_{a}",
                                             lambda st, a=a: chain(st, a - 1))
    named = dict(integrals)
    loci = [(f"y_{a}=0", lambda st, a=a: st[a]) for a in range(N)]

    def guard(st):
        return min(abs(fn(st)) for _, fn in loci) if loci else np.inf

    def sample(rng):
        y = rng.uniform(0.4, 1.5, N)
        return PhasePoint(y, rng.normal(size=N) * 0.8)

    return SystemSpec(
        params=params,
        hamiltonian=Observable("H", H),
        bracket=canonical(N, singular_guard=guard),
        integrals=integrals,
        named=named,
        singular_loci=loci,
        sample=sample,
        char_period=np.pi / max(np.max(np.sqrt(wt_a2)), 0.5),
        dt_default=5e-4,
    )


def reduced_hamiltonian_matches(spec: SystemSpec, reduced: SystemSpec, x: PhasePoint) -> float:
    """|H_CPN(x) - H_red(y,p)| at the point corresponding to x (same p_phi)."""
    from .solutions import angles_from_phase_point
    theta, p_theta, phi, p_phi_x = angles_from_phase_point(spec, x)
    from .solutions import y_from_spherical
    y = y_from_spherical(theta)
    N = theta.size
    J = np.empty((N, N))
    for i in range(N):
        e = np.zeros(N)
        e[i] = 1e-7
        J[:, i] = (y_from_spherical(theta + e) - y_from_spherical(theta - e)) / 2e-7
    p_y = np.linalg.solve(J.T, p_theta)
    Hx = complex(spec.hamiltonian(x)).real
    Hr = complex(reduced.hamiltonian(np.concatenate([y, p_y]))).real
    return abs(Hx - Hr) / (1 + abs(Hx))
