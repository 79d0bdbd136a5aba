"""Action-angle machinery: quadrature actions, frequencies, holomorphic variables,
and the recursive spherical-segment angular family.

The endpoint square-root singularities of the action integrand are absorbed by
x = x_min + (x_max - x_min) sin^2(tau/2), after which fixed-order Gauss-Legendre
is spectrally accurate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import (DegenerateActions, DegenerateZ, NoBoundMotion,
                     NonpositiveAngularPart, QuadratureFailure, UnsupportedFamily)
from .phase import PhasePoint
from .systems import SystemSpec, j_chain, rational_k

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(240)


@dataclass(frozen=True)
class ActionAngleChart:
    actions: np.ndarray                 # I_a >= 0
    angles: np.ndarray                  # Phi_a in [0, 2pi)
    frequencies: np.ndarray             # Omega_a = d sqrt(2 I_ang) / d I_a
    rationality: Optional[list] = None  # (n_a, m_a) when Omega_a is rational
    c0: float = 0.0

    def __post_init__(self):
        if np.any(self.actions < 0):
            raise DegenerateActions("actions must be nonnegative")


def find_turning_points(V: Callable[[float], float], E: float,
                        bracket_interval: tuple[float, float],
                        refine_tol: float = 1e-12) -> tuple[float, float]:
    """Two roots of E - V = 0 enclosing the classically allowed region."""
    lo, hi = bracket_interval
    xs = np.linspace(lo, hi, 4001)
    vals = np.array([E - V(x) for x in xs])
    inside = np.where(vals > 0)[0]
    if inside.size == 0:
        raise NoBoundMotion("E below the potential minimum on the interval")
    i0, i1 = inside[0], inside[-1]
    if i0 == 0 or i1 == len(xs) - 1:
        raise NoBoundMotion("allowed region touches the bracket boundary")
    f = lambda x: E - V(x)
    x_min = brentq(f, xs[i0 - 1], xs[i0], xtol=refine_tol)
    x_max = brentq(f, xs[i1], xs[i1 + 1], xtol=refine_tol)
    return x_min, x_max


def action_integral(V: Callable[[float], float], E: float,
                    bracket_interval: tuple[float, float]) -> float:
    """I = (1/pi) Int sqrt(2(E-V)) dx between the turning points."""
    x_min, x_max = find_turning_points(V, E, bracket_interval)
    half = 0.5 * (x_max - x_min)
    tau = 0.5 * np.pi * (_GL_NODES + 1.0)          # tau in (0, pi)
    x = x_min + (x_max - x_min) * np.sin(tau / 2) ** 2
    jac = half * np.sin(tau / 2) * np.cos(tau / 2) * (0.5 * np.pi)
    integrand = 2.0 * (E - np.array([V(xi) for xi in x]))
    integrand = np.sqrt(np.maximum(integrand, 0.0))
    val = float(np.sum(_GL_WEIGHTS * integrand * jac)) * 2 / np.pi
    if not np.isfinite(val):
        raise QuadratureFailure("action quadrature produced a non-finite value")
    return val


def frequencies(curly_I: Callable[[np.ndarray], float], actions,
                exact_k: Optional[Sequence] = None) -> np.ndarray:
    """Omega_a = d sqrt(2 I_ang)/d I_a, exact for the (sum k_a I_a + c0)^2/2 family."""
    if exact_k is not None:
        return np.array([float(rational_k(k)) for k in exact_k])
    actions = np.atleast_1d(np.asarray(actions, float))
    out = np.empty(actions.size)
    for a in range(actions.size):
        h = 1e-6 * max(1.0, abs(actions[a]))
        e = np.zeros_like(actions)
        e[a] = h
        out[a] = ((np.sqrt(2 * curly_I(actions + e))
                   - np.sqrt(2 * curly_I(actions - e))) / (2 * h))
    return out


# --------------------------------------------------------- Poschl-Teller

def pt_action(k: float, alpha: float, beta: float, curly_I: float) -> float:
    """Closed-form PT action for I_PT = p^2/2 + k^2 a^2/sin^2 + k^2 b^2/cos^2.

    The wedge k*phi in (0, pi/2) gives I = sqrt(2 I_PT)/(2k) - (a+b)/sqrt(2),
    equivalently I_PT = 2 k^2 (I + (a+b)/sqrt(2))^2.
    """
    val = np.sqrt(2 * curly_I) / (2 * k) - (alpha + beta) / np.sqrt(2)
    if val < 0:
        raise NoBoundMotion("I_PT below the Poschl-Teller well minimum")
    return float(val)


def pt_angle(k: float, alpha: float, beta: float, phi: float, p_phi: float) -> float:
    """PT angle variable (advances 2pi per libration), branch-resolved via p_phi.

    The rotating factor V = sqrt(2I) p sin(2k phi)/2 + i(k^2(b^2-a^2) - I cos(2k phi))
    equals (2 I Btilde) e^{i Phi}, so Phi = arg V.
    """
    curly_I = p_phi ** 2 / 2 + k ** 2 * alpha ** 2 / np.sin(k * phi) ** 2 \
        + k ** 2 * beta ** 2 / np.cos(k * phi) ** 2
    re = np.sqrt(2 * curly_I) * p_phi * np.sin(2 * k * phi) / 2
    im = k ** 2 * (beta ** 2 - alpha ** 2) - curly_I * np.cos(2 * k * phi)
    return float(np.arctan2(im, re) % (2 * np.pi))


# ------------------------------------------------------ holomorphic vars

@dataclass(frozen=True)
class HolomorphicVars:
    Z: complex
    u: np.ndarray                      # u_a = sqrt(I_a) e^{i Phi_a}
    actions: np.ndarray
    angles: np.ndarray
    Lambda: np.ndarray                 # local angle conjugate to sqrt(2 I_ang)
    curly_I: float
    k: np.ndarray                      # Omega_a as floats
    fractions: list                    # Omega_a as Fraction(n_a, m_a)
    M: np.ndarray                      # M_a = Z u_a^{1/k_a}
    calM: np.ndarray                   # Z^{n_a} u_a^{m_a}
    A: Optional[np.ndarray] = None     # oscillator ladder factors
    B: Optional[np.ndarray] = None
    Mcoul: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.Z.imag <= 0:
            raise DegenerateZ("Im Z must be positive")


def holomorphic_vars(spec: SystemSpec, x) -> HolomorphicVars:
    """Assemble (Z, u_a) and the derived constants for a radial-chart system."""
    state = x.state if isinstance(x, PhasePoint) else np.asarray(x, float)
    fam = spec.family
    par = spec.params
    if fam in ("kappa_oscillator", "kappa_coulomb"):
        M = par.N - 1
        fracs = [rational_k(k) for k in par.get("k", [1] * M)]
        actions = state[M + 2:].copy()
        angles = state[1:M + 1] % (2 * np.pi)
        c0 = float(par.get("c0", 0.0))
        ks = np.array([float(f) for f in fracs])
        cI = 0.5 * (ks @ actions + c0) ** 2
        Z = complex(spec.named["Z"](state))
        coupling = float(par.get(
            "omega" if fam == "kappa_oscillator" else "gamma", 1.0))
    elif fam in ("ttw", "pw"):
        kfrac = rational_k(par.get("k", 1))
        kv = float(kfrac)
        al = float(par.get("alpha", 0.5))
        be = float(par.get("beta", 0.5))
        ch = spec.radial_chart(state)
        cI = ch["curlyI"]
        actions = np.array([pt_action(kv, al, be, cI)])
        angles = np.array([pt_angle(kv, al, be, state[1], state[3])])
        # the PT well has Omega = d sqrt(2 I_PT)/dI = 2k
        fracs = [Fraction(2 * kfrac.numerator, kfrac.denominator)]
        ks = np.array([float(f) for f in fracs])
        Z = complex(ch["p"] / np.sqrt(2) + 1j * np.sqrt(cI) / ch["x"])
        coupling = float(par.get("omega" if fam == "ttw" else "gamma", 1.0))
    else:
        raise UnsupportedFamily(f"{fam} has no action-angle chart")
    if cI <= 0:
        raise NonpositiveAngularPart("angular invariant must be positive")
    u = np.sqrt(actions) * np.exp(1j * angles)
    Mloc = np.array([Z * u[a] ** (1.0 / ks[a]) for a in range(len(u))])
    calM = np.array([Z ** f.numerator * u[a] ** f.denominator
                     for a, f in enumerate(fracs)])
    A = Bf = Mc = None
    if fam in ("kappa_oscillator", "ttw"):
        w = coupling
        rad_p = Z + w * np.sqrt(2 * cI) / (np.conj(Z) - Z)
        rad_m = Z - w * np.sqrt(2 * cI) / (np.conj(Z) - Z)
        A = np.array([rad_p * u[a] ** (1.0 / ks[a]) for a in range(len(u))])
        Bf = np.array([rad_m * u[a] ** (1.0 / ks[a]) for a in range(len(u))])
    if fam in ("kappa_coulomb", "pw"):
        gam = coupling
        Mc = np.array([(Z - 1j * gam / (2 * np.sqrt(cI))) * u[a] ** (1.0 / ks[a])
                       for a in range(len(u))])
    return HolomorphicVars(
        Z=Z, u=u, actions=actions, angles=angles,
        Lambda=np.array([angles[a] / ks[a] for a in range(len(u))]),
        curly_I=float(cI), k=ks, fractions=fracs, M=Mloc, calM=calM,
        A=A, B=Bf, Mcoul=Mc)


# ----------------------------------------------- recursive angular family

@dataclass(frozen=True)
class RecursiveAngularSystem:
    k: list                            # rational k_a
    c0: float = 0.0

    @property
    def M(self) -> int:
        return len(self.k)

    def ks(self) -> np.ndarray:
        return np.array([float(rational_k(k)) for k in self.k])


def recursive_angular_actions(sys: RecursiveAngularSystem, x) -> ActionAngleChart:
    """Actions I_a = (sqrt(j_a) - sqrt(j_{a-1}))/k_a and branch-resolved angles."""
    state = x.state if isinstance(x, PhasePoint) else np.asarray(x, float)
    M = sys.M
    theta, p = state[:M], state[M:]
    ks = sys.ks()
    j = j_chain(theta, p, ks, sys.c0)
    if np.any(np.diff(j) <= 0):
        raise DegenerateActions("angular hierarchy must satisfy j_a > j_{a-1}")
    actions = (np.sqrt(j[1:]) - np.sqrt(j[:-1])) / ks
    a_l = np.empty(M)
    b_l = np.empty(M)
    for l in range(M):
        kl = ks[l]
        c = np.cos(kl * theta[l])
        s = np.sin(kl * theta[l])
        X = np.sqrt(j[l + 1] / (j[l + 1] - j[l])) * c
        X = np.clip(X, -1.0, 1.0)
        # branch: the phase advances with the flow; p_l > 0 selects pi - arcsin
        a_l[l] = np.pi - np.arcsin(X) if p[l] > 0 else np.arcsin(X)
        if j[l] > 0:
            b_l[l] = np.arctan2(np.sqrt(j[l]) * c, p[l] * s)
        else:
            b_l[l] = 0.0
    angles = np.empty(M)
    for a in range(M):
        tot = sum(ks[a] / ks[l] * a_l[l] for l in range(a, M))
        tot += sum(ks[a] / ks[l] * b_l[l] for l in range(a + 1, M))
        angles[a] = tot % (2 * np.pi)
    return ActionAngleChart(actions=actions, angles=angles, frequencies=ks.copy(),
                            rationality=[(rational_k(k).numerator,
                                          rational_k(k).denominator) for k in sys.k],
                            c0=sys.c0)


def recursive_angular_point(sys: RecursiveAngularSystem,
                            chart: ActionAngleChart) -> PhasePoint:
    """Inverse map (I, Phi) -> (theta, p), top level first."""
    M = sys.M
    ks = sys.ks()
    j = np.empty(M + 1)
    j[0] = sys.c0 ** 2
    for a in range(M):
        j[a + 1] = (np.sqrt(j[a]) + ks[a] * chart.actions[a]) ** 2
    if np.any(np.diff(j) <= 0):
        raise DegenerateActions("angular hierarchy must satisfy j_a > j_{a-1}")
    theta = np.empty(M)
    p = np.empty(M)
    a_l = np.empty(M)
    b_l = np.empty(M)
    for l in range(M - 1, -1, -1):
        # recover a_l from Phi_l once the outer a's and b's are known
        tot = sum(ks[l] / ks[m] * a_l[m] for m in range(l + 1, M))
        tot += sum(ks[l] / ks[m] * b_l[m] for m in range(l + 1, M))
        a_l[l] = (chart.angles[l] - tot) % (2 * np.pi)
        X = np.sin(a_l[l])  # sin(pi - x) = sin(x): consistent on both branches
        c = X / np.sqrt(j[l + 1] / (j[l + 1] - j[l]))
        kl = ks[l]
        th = np.arccos(np.clip(c, -1.0, 1.0)) / kl
        s2 = 1 - c ** 2
        p2 = j[l + 1] - j[l] / s2
        p_l = np.sqrt(max(p2, 0.0))
        if np.cos(a_l[l]) > 0:
            p_l = -p_l  # arcsin branch (cos > 0) carries p < 0
        theta[l] = th
        p[l] = p_l
        b_l[l] = np.arctan2(np.sqrt(j[l]) * c, p_l * np.sin(kl * th)) if j[l] > 0 else 0.0
    return PhasePoint(theta, p)
