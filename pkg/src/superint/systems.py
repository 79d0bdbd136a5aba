"""System catalog: every Hamiltonian family with brackets, integrals and loci.

Families
--------
oscillator, coulomb, conformal, sw_real      real canonical (q, p)
ttw, pw                                      planar (r, phi, p_r, p_phi)
sw_complex                                   C^N, magnetic bracket
cpn_rosochatius                              CP^N, Kahler-twisted bracket
kappa_oscillator, kappa_coulomb              radial + action-angle chart, curvature kappa
recursive_angular                            spherical-segment angular hierarchy
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from . import flows
from .errors import (InvalidParams, NonpositiveAngularPart, SingularRadius,
                     UnsupportedFamily)
from .kahler import fubini_study
from .kappa import C_kappa, S_kappa, T_kappa
from .phase import (BracketStructure, Observable, PhasePoint, canonical,
                    complex_split, kaehler_twisted, magnetic_flat)

FAMILIES = ("oscillator", "coulomb", "conformal", "ttw", "pw", "sw_real",
            "sw_complex", "cpn_rosochatius", "kappa_oscillator",
            "kappa_coulomb", "recursive_angular")


@dataclass(frozen=True)
class SystemParams:
    family: str
    N: int
    couplings: dict = field(default_factory=dict)
    hbar: float = 1.0

    def get(self, key, default=None):
        return self.couplings.get(key, default)


@dataclass
class SystemSpec:
    params: SystemParams
    hamiltonian: Observable
    bracket: BracketStructure
    integrals: dict                      # name -> Observable, all Poisson-commute with H
    named: dict                          # integrals plus auxiliary named observables
    singular_loci: list                  # (name, state -> distance-like value)
    sample: Callable[[np.random.Generator], PhasePoint]
    char_period: float
    dt_default: float
    flow: Optional[tuple] = None         # (njit function, params array)
    radial_chart: Optional[Callable] = None   # state -> dict with r/x, p, curlyI, ...
    notes: str = ""

    @property
    def family(self) -> str:
        return self.params.family

    @property
    def dim(self) -> int:
        return self.bracket.dim

    def flow_field(self, state: np.ndarray) -> np.ndarray:
        if self.flow is not None:
            fn, par = self.flow
            return fn(np.asarray(state, float), par)
        gH = np.real(self.hamiltonian.gradient(state))
        return self.bracket.poisson_tensor(state).T @ gH


def _obs(name, fn, grad=None):
    return Observable(name, fn, grad)


def _guard_from_loci(loci):
    if not loci:
        return None

    def guard(state):
        return min(abs(fn(state)) for _, fn in loci)

    return guard


def rational_k(value) -> Fraction:
    """Coerce a TTW-type rational parameter to a Fraction in lowest terms."""
    if isinstance(value, Fraction):
        frac = value
    elif isinstance(value, tuple):
        frac = Fraction(int(value[0]), int(value[1]))
    elif isinstance(value, int):
        frac = Fraction(value, 1)
    else:
        frac = Fraction(value).limit_denominator(10 ** 6)
    if frac <= 0:
        raise InvalidParams("k must be a positive rational")
    return frac


# ---------------------------------------------------------------- real flat

def _build_oscillator(par: SystemParams) -> SystemSpec:
    N = par.N
    w = float(par.get("omega", 1.0))
    if N < 1 or w <= 0:
        raise InvalidParams("oscillator needs N>=1, omega>0")

    def H(s):
        return 0.5 * np.sum(s[N:] ** 2) + 0.5 * w ** 2 * np.sum(s[:N] ** 2)

    def gradH(s):
        return np.concatenate([w ** 2 * s[:N], s[N:]])

    integrals = {}
    for i in range(N):
        for j in range(i + 1, N):
            integrals[f"L_{i}{j}"] = _obs(
                f"L_{i}{j}", lambda s, i=i, j=j: s[N + i] * s[j] - s[N + j] * s[i])
    for i in range(N):
        for j in range(i, N):
            integrals[f"F_{i}{j}"] = _obs(
                f"F_{i}{j}",
                lambda s, i=i, j=j: s[N + i] * s[N + j] + w ** 2 * s[i] * s[j])

    def sample(rng):
        q = rng.uniform(0.3, 3.0, N) * rng.choice([-1.0, 1.0], N)
        return PhasePoint(q, rng.normal(size=N))

    return SystemSpec(
        params=par,
        hamiltonian=_obs("H", H, gradH),
        bracket=canonical(N),
        integrals=integrals,
        named=dict(integrals),
        singular_loci=[],
        sample=sample,
        char_period=2 * np.pi / w,
        dt_default=2e-3 / w,
        flow=(flows.flow_oscillator, np.array([N, w], float)),
    )


def _build_coulomb(par: SystemParams) -> SystemSpec:
    N = par.N
    gam = float(par.get("gamma", 1.0))
    if N < 2 or gam <= 0:
        raise InvalidParams("coulomb needs N>=2, gamma>0")

    def H(s):
        return 0.5 * np.sum(s[N:] ** 2) - gam / np.linalg.norm(s[:N])

    def gradH(s):
        r = np.linalg.norm(s[:N])
        return np.concatenate([gam * s[:N] / r ** 3, s[N:]])

    integrals = {}
    for i in range(N):
        for j in range(i + 1, N):
            integrals[f"L_{i}{j}"] = _obs(
                f"L_{i}{j}", lambda s, i=i, j=j: s[N + i] * s[j] - s[N + j] * s[i])
    for i in range(N):
        def A_i(s, i=i):
            q, p = s[:N], s[N:]
            r = np.linalg.norm(q)
            return p[i] * (q @ p) - q[i] * (p @ p) + gam * q[i] / r

        integrals[f"A_{i}"] = _obs(f"A_{i}", A_i)

    loci = [("r=0", lambda s: np.linalg.norm(s[:N]))]

    def sample(rng):
        # bound orbits: place on an annulus, momenta scaled below escape speed
        q = rng.uniform(0.8, 1.8, N) * rng.choice([-1.0, 1.0], N)
        r = np.linalg.norm(q)
        v_esc = np.sqrt(2 * gam / r)
        p = rng.normal(size=N)
        p *= 0.6 * v_esc / np.linalg.norm(p)
        return PhasePoint(q, p)

    return SystemSpec(
        params=par,
        hamiltonian=_obs("H", H, gradH),
        bracket=canonical(N, singular_guard=_guard_from_loci(loci)),
        integrals=integrals,
        named=dict(integrals),
        singular_loci=loci,
        sample=sample,
        char_period=2 * np.pi,
        dt_default=1e-3,
        flow=(flows.flow_coulomb, np.array([N, gam], float)),
    )


def _sw_real_like(par: SystemParams, omega: float) -> SystemSpec:
    N = par.N
    g = np.asarray(par.get("g", np.ones(N)), float)
    if g.size != N or np.any(g < 0):
        raise InvalidParams("g must be N nonnegative couplings")

    def H(s):
        return 0.5 * np.sum(s[N:] ** 2 + g ** 2 / s[:N] ** 2 + omega ** 2 * s[:N] ** 2)

    def gradH(s):
        return np.concatenate([-g ** 2 / s[:N] ** 3 + omega ** 2 * s[:N], s[N:]])

    integrals = {}
    named = {}
    for i in range(N):
        integrals[f"I_{i}"] = _obs(
            f"I_{i}",
            lambda s, i=i: 0.5 * (s[N + i] ** 2 + g[i] ** 2 / s[i] ** 2
                                  + omega ** 2 * s[i] ** 2))
    for i in range(N):
        for j in range(i + 1, N):
            def Iij(s, i=i, j=j):
                L = s[N + i] * s[j] - s[N + j] * s[i]
                return (-L * L - g[i] ** 2 * s[j] ** 2 / s[i] ** 2
                        - g[j] ** 2 * s[i] ** 2 / s[j] ** 2)

            integrals[f"I_{i}{j}"] = _obs(f"I_{i}{j}", Iij)
            named[f"L_{i}{j}"] = _obs(
                f"L_{i}{j}", lambda s, i=i, j=j: s[N + i] * s[j] - s[N + j] * s[i])

    named.update(integrals)
    loci = [(f"x_{i}=0", lambda s, i=i: s[i]) for i in range(N)]

    def sample(rng):
        q = rng.uniform(0.3, 3.0, N)  # inverse-square wall keeps each x_i positive
        return PhasePoint(q, rng.normal(size=N))

    period = 2 * np.pi if omega == 0 else np.pi / omega  # radial period of the singular oscillator

    return SystemSpec(
        params=par,
        hamiltonian=_obs("H", H, gradH),
        bracket=canonical(N, singular_guard=_guard_from_loci(loci)),
        integrals=integrals,
        named=named,
        singular_loci=loci,
        sample=sample,
        char_period=period,
        dt_default=5e-4,
        flow=(flows.flow_sw_real, np.concatenate([[N, omega], g])),
    )


def _build_sw_real(par: SystemParams) -> SystemSpec:
    w = float(par.get("omega", 1.0))
    if w <= 0:
        raise InvalidParams("sw_real needs omega>0")
    return _sw_real_like(par, w)


def _build_conformal(par: SystemParams) -> SystemSpec:
    spec = _sw_real_like(par, 0.0)
    N = par.N
    g = np.asarray(par.get("g", np.ones(N)), float)
    spec.named["D"] = _obs("D", lambda s: float(s[:N] @ s[N:]))
    spec.named["K"] = _obs("K", lambda s: 0.5 * float(s[:N] @ s[:N]))
    spec.named["H"] = spec.hamiltonian

    def curly_I(s):
        # angular Casimir from angular data alone: L^2/2 + r^2 V
        q, p = s[:N], s[N:]
        L2 = 0.0
        for i in range(N):
            for j in range(i + 1, N):
                L2 += (p[i] * q[j] - p[j] * q[i]) ** 2
        return 0.5 * L2 + float(q @ q) * 0.5 * np.sum(g ** 2 / q ** 2)

    spec.named["curlyI"] = _obs("curlyI", curly_I)
    return spec


# ---------------------------------------------------------------- TTW / PW

def _pt_angular(kv, al, be):
    def ipt(s):
        sk, ck = np.sin(kv * s[1]), np.cos(kv * s[1])
        return s[3] ** 2 / 2 + kv ** 2 * al ** 2 / sk ** 2 + kv ** 2 * be ** 2 / ck ** 2

    return ipt


def _build_planar(par: SystemParams, which: str) -> SystemSpec:
    frac = rational_k(par.get("k", 1))
    kv = float(frac)
    al = float(par.get("alpha", 0.5))
    be = float(par.get("beta", 0.5))
    if al <= 0 or be <= 0:
        raise InvalidParams("Poschl-Teller couplings must be positive")
    if which == "ttw":
        w = float(par.get("omega", 1.0))
        coupling = w
    else:
        gam = float(par.get("gamma", 1.0))
        coupling = gam

    ipt = _pt_angular(kv, al, be)

    def H(s):
        rad = 0.5 * s[2] ** 2 + ipt(s) / s[0] ** 2
        if which == "ttw":
            return rad + 0.5 * coupling ** 2 * s[0] ** 2
        return rad - coupling / s[0]

    integrals = {"I_PT": _obs("I_PT", ipt)}

    n_, m_ = frac.numerator, frac.denominator

    def rad_osc(s):
        I = ipt(s)
        return (H(s) - 2 * I / s[0] ** 2) + 1j * np.sqrt(2 * I) * s[2] / s[0]

    def rad_coul(s):
        I = ipt(s)
        if I <= 0:
            raise NonpositiveAngularPart("I_PT <= 0")
        return s[2] / np.sqrt(2) + 1j * np.sqrt(I) / s[0] - 1j * coupling / (2 * np.sqrt(I))

    def ang_factor(s):
        I = ipt(s)
        return (np.sqrt(2 * I) * s[3] * np.sin(2 * kv * s[1]) / 2
                + 1j * (kv ** 2 * (be ** 2 - al ** 2) - I * np.cos(2 * kv * s[1])))

    if m_ == 1:  # integer k: globally defined Ranada-type constant
        if which == "ttw":
            ranada = lambda s: rad_osc(s) ** n_ * ang_factor(s)
        else:
            ranada = lambda s: rad_coul(s) ** (2 * n_) * ang_factor(s)
        integrals["Ranada_re"] = _obs("Ranada_re", lambda s: ranada(s).real)
        integrals["Ranada_im"] = _obs("Ranada_im", lambda s: ranada(s).imag)

    named = dict(integrals)
    named["H"] = None  # placeholder replaced below
    loci = [("r=0", lambda s: s[0]),
            ("sin(k phi)=0", lambda s: np.sin(kv * s[1])),
            ("cos(k phi)=0", lambda s: np.cos(kv * s[1]))]

    def sample(rng):
        r = rng.uniform(0.5, 2.0)
        phi = rng.uniform(0.15, 0.85) * (np.pi / (2 * kv))
        return PhasePoint([r, phi], rng.normal(size=2))

    Hobs = _obs("H", H)
    named["H"] = Hobs
    named["curlyI"] = _obs("curlyI", ipt)
    named["D"] = _obs("D", lambda s: s[0] * s[2])
    named["K"] = _obs("K", lambda s: 0.5 * s[0] ** 2)
    named["H0"] = _obs("H0", lambda s: 0.5 * s[2] ** 2 + ipt(s) / s[0] ** 2)

    def radial_chart(s):
        I = ipt(s)
        return {"x": s[0], "p": s[2], "curlyI": I, "kappa": 0.0}

    spec = SystemSpec(
        params=par,
        hamiltonian=Hobs,
        bracket=canonical(2, singular_guard=_guard_from_loci(loci)),
        integrals=integrals,
        named=named,
        singular_loci=loci,
        sample=sample,
        char_period=np.pi / coupling if which == "ttw" else 2 * np.pi,
        dt_default=2e-4,
        flow=(flows.flow_planar,
              np.array([0.0 if which == "ttw" else 1.0, kv, coupling, al, be])),
        radial_chart=radial_chart,
    )
    return spec


# ---------------------------------------------------------------- C^N SW

def _build_sw_complex(par: SystemParams) -> SystemSpec:
    N = par.N
    w = float(par.get("omega", 1.0))
    B = float(par.get("B", 0.0))
    g = np.asarray(par.get("g", np.ones(N)), float)
    if g.size != N or np.any(g < 0) or w < 0:
        raise InvalidParams("sw_complex needs omega>=0 and N nonnegative g_a")

    def H(s):
        z, pi = complex_split(s)
        return float(np.sum((pi * np.conj(pi)).real + g ** 2 / (z * np.conj(z)).real
                            + w ** 2 * (z * np.conj(z)).real))

    def Ia(a):
        def fn(s, a=a):
            z, pi = complex_split(s)
            r2 = (z[a] * np.conj(z[a])).real
            return (pi[a] * np.conj(pi[a])).real + g[a] ** 2 / r2 + w ** 2 * r2
        return fn

    def Lab(a, b):
        def fn(s, a=a, b=b):
            z, pi = complex_split(s)
            return (1j * (pi[a] * z[b] - np.conj(pi[b]) * np.conj(z[a]))
                    - B * np.conj(z[a]) * z[b])
        return fn

    def Iab(a, b):
        def fn(s, a=a, b=b):
            z, _ = complex_split(s)
            ra = (z[a] * np.conj(z[a])).real
            rb = (z[b] * np.conj(z[b])).real
            return ((Lab(a, b)(s) * Lab(b, a)(s)).real
                    + g[a] ** 2 * rb / ra + g[b] ** 2 * ra / rb)
        return fn

    integrals = {}
    named = {}
    for a in range(N):
        integrals[f"I_{a}"] = _obs(f"I_{a}", Ia(a))
        integrals[f"L_{a}{a}"] = _obs(f"L_{a}{a}", lambda s, a=a: Lab(a, a)(s).real)
    for a in range(N):
        for b in range(N):
            if a != b:
                named[f"L_{a}{b}"] = _obs(f"L_{a}{b}", Lab(a, b))
    for a in range(N):
        for b in range(a + 1, N):
            integrals[f"I_{a}{b}"] = _obs(f"I_{a}{b}", Iab(a, b))
    named.update(integrals)

    loci = [(f"z_{a}=0",
             lambda s, a=a: np.abs(complex_split(s)[0][a])) for a in range(N)]

    def sample(rng):
        z = rng.uniform(0.3, 3.0, N) * np.exp(1j * rng.uniform(0, 2 * np.pi, N))
        pi = (rng.normal(size=N) + 1j * rng.normal(size=N)) / np.sqrt(2)
        return PhasePoint.from_complex(z, pi)

    Wt = np.sqrt(w ** 2 + B ** 2 / 4)
    return SystemSpec(
        params=par,
        hamiltonian=_obs("H", H),
        bracket=magnetic_flat(N, B, singular_guard=_guard_from_loci(loci)),
        integrals=integrals,
        named=named,
        singular_loci=loci,
        sample=sample,
        char_period=np.pi / Wt if Wt > 0 else 2 * np.pi,
        dt_default=5e-4,
        flow=(flows.flow_sw_complex, np.concatenate([[N, w, B], g])),
    )


# ---------------------------------------------------------------- CP^N Ros

def _build_cpn_rosochatius(par: SystemParams) -> SystemSpec:
    N = par.N
    B = float(par.get("B", 0.0))
    r0 = float(par.get("r0", 1.0))
    om = np.asarray(par.get("omega_i", np.ones(N + 1)), float)
    if r0 <= 0:
        raise InvalidParams("r0 must be positive")
    if om.size != N + 1:
        raise InvalidParams("cpn_rosochatius needs N+1 frequencies omega_0..omega_N")
    geom = fubini_study(N)

    def H(s):
        z, pi = complex_split(s)
        sf = 1 + np.vdot(z, z).real
        kin = sf * (np.vdot(pi, pi).real + abs(np.dot(z, pi)) ** 2) / r0 ** 2
        pot = r0 ** 2 * (sf * (om[0] ** 2
                               + np.sum(om[1:] ** 2 / (z * np.conj(z)).real))
                         - np.sum(om ** 2))
        return kin + pot

    def Jab(a, b):
        def fn(s, a=a, b=b):
            z, pi = complex_split(s)
            sf = 1 + np.vdot(z, z).real
            return (1j * (z[b] * pi[a] - np.conj(pi[b]) * np.conj(z[a]))
                    - B * r0 ** 2 * np.conj(z[a]) * z[b] / sf)
        return fn

    def Jvec(a):
        def fn(s, a=a):
            z, pi = complex_split(s)
            sf = 1 + np.vdot(z, z).real
            return (pi[a] + np.conj(z[a]) * np.conj(np.dot(z, pi))
                    + 1j * B * r0 ** 2 * np.conj(z[a]) / sf)
        return fn

    def I0a(a):
        def fn(s, a=a):
            z, _ = complex_split(s)
            v = Jvec(a)(s)
            ra = (z[a] * np.conj(z[a])).real
            return ((v * np.conj(v)).real / r0 ** 2
                    + r0 ** 2 * (om[0] ** 2 * ra + om[a + 1] ** 2 / ra))
        return fn

    def Iab(a, b):
        def fn(s, a=a, b=b):
            z, _ = complex_split(s)
            ra = (z[a] * np.conj(z[a])).real
            rb = (z[b] * np.conj(z[b])).real
            return ((Jab(a, b)(s) * Jab(b, a)(s)).real / r0 ** 2
                    + r0 ** 2 * (om[a + 1] ** 2 * rb / ra + om[b + 1] ** 2 * ra / rb))
        return fn

    integrals = {}
    named = {}
    for a in range(N):
        integrals[f"J_{a}{a}"] = _obs(f"J_{a}{a}", lambda s, a=a: Jab(a, a)(s).real)
        integrals[f"I_0{a + 1}"] = _obs(f"I_0{a + 1}", I0a(a))
    for a in range(N):
        for b in range(a + 1, N):
            integrals[f"I_{a + 1}{b + 1}"] = _obs(f"I_{a + 1}{b + 1}", Iab(a, b))
    for a in range(N):
        for b in range(N):
            if a != b:
                named[f"J_{a}{b}"] = _obs(f"J_{a}{b}", Jab(a, b))
        named[f"Jvec_{a}"] = _obs(f"Jvec_{a}", Jvec(a))
        named[f"Jvecbar_{a}"] = _obs(
            f"Jvecbar_{a}", lambda s, a=a: np.conj(Jvec(a)(s)))

    def J0(s):
        return sum(Jab(a, a)(s).real for a in range(N)) + B * r0 ** 2

    named["J0"] = _obs("J0", J0)
    named.update(integrals)

    loci = [(f"z_{a}=0", lambda s, a=a: np.abs(complex_split(s)[0][a]))
            for a in range(N)]

    def sample(rng):
        z = rng.uniform(0.3, 1.6, N) * np.exp(1j * rng.uniform(0, 2 * np.pi, N))
        pi = (rng.normal(size=N) + 1j * rng.normal(size=N)) * 0.7
        return PhasePoint.from_complex(z, pi)

    return SystemSpec(
        params=par,
        hamiltonian=_obs("H", H),
        bracket=kaehler_twisted(N, B, metric=geom.metric, r0=r0,
                                singular_guard=_guard_from_loci(loci)),
        integrals=integrals,
        named=named,
        singular_loci=loci,
        sample=sample,
        char_period=np.pi / max(np.max(om), 0.5),
        dt_default=5e-4,
        flow=(flows.flow_cpn_ros, np.concatenate([[N, B, r0], om])),
    )


# ------------------------------------------------- kappa radial + angular

def _kappa_radial_family(par: SystemParams, which: str) -> SystemSpec:
    """Deformed oscillator/Coulomb with angular part (sum k_a I_a + c0)^2/2."""
    N = par.N
    M = N - 1
    kap = float(par.get("kappa", 0.0))
    c0 = float(par.get("c0", 0.0))
    fracs = [rational_k(k) for k in par.get("k", [1] * M)]
    if len(fracs) != M:
        raise InvalidParams("need N-1 rational frequencies k_a")
    ks = np.array([float(f) for f in fracs])
    coupling = float(par.get("omega" if which == "kappa_oscillator" else "gamma", 1.0))
    if coupling <= 0:
        raise InvalidParams("coupling must be positive")
    r0_sq = abs(kap)
    if kap > 0:
        x_max = np.pi / (2 * np.sqrt(kap))  # pole of T_kappa
    else:
        x_max = np.inf

    def split(s):
        return s[0], s[1:M + 1], s[M + 1], s[M + 2:]

    def curlyI_of_actions(I):
        return 0.5 * (ks @ I + c0) ** 2

    def H(s):
        x, Phi, p, I = split(s)
        cI = curlyI_of_actions(I)
        Sk = S_kappa(kap, x)
        if which == "kappa_oscillator":
            V = 0.5 * coupling ** 2 * T_kappa(kap, x) ** 2
        else:
            V = -coupling / T_kappa(kap, x)
        return 0.5 * p ** 2 + cI / Sk ** 2 + V

    integrals = {}
    named = {}
    for a in range(M):
        integrals[f"I_{a}"] = _obs(f"I_{a}", lambda s, a=a: s[M + 2 + a])
        named[f"Phi_{a}"] = _obs(f"Phi_{a}", lambda s, a=a: s[1 + a])
        named[f"u_{a}"] = _obs(
            f"u_{a}", lambda s, a=a: np.sqrt(s[M + 2 + a]) * np.exp(1j * s[1 + a]))

    def curlyI(s):
        return curlyI_of_actions(split(s)[3])

    def Zfun(s):
        x, _, p, I = split(s)
        cI = curlyI(s)
        if cI <= 0:
            raise NonpositiveAngularPart("angular invariant must be positive")
        T = T_kappa(kap, x)
        if T <= 0:
            raise SingularRadius("T_kappa <= 0")
        return p / np.sqrt(2) + 1j * np.sqrt(cI) / T

    named["curlyI"] = _obs("curlyI", curlyI)
    named["Z"] = _obs("Z", Zfun)
    named["Zbar"] = _obs("Zbar", lambda s: np.conj(Zfun(s)))
    named["T"] = _obs("T", lambda s: T_kappa(kap, s[0]))
    named["H0"] = _obs("H0", lambda s: abs(Zfun(s)) ** 2 + kap * curlyI(s))
    named["D"] = _obs("D", lambda s: (np.sqrt(2 * curlyI(s))
                                      * (Zfun(s) + np.conj(Zfun(s)))
                                      / (1j * (np.conj(Zfun(s)) - Zfun(s)))).real)
    named["K"] = _obs("K", lambda s: (2 * curlyI(s)
                                      / (1j * (np.conj(Zfun(s)) - Zfun(s))) ** 2).real)

    def ufun(s, a):
        return np.sqrt(s[M + 2 + a]) * np.exp(1j * s[1 + a])

    for a in range(M):
        ka = ks[a]
        n_a, m_a = fracs[a].numerator, fracs[a].denominator
        if which == "kappa_oscillator":
            def Aa(s, a=a, ka=ka):
                Z = Zfun(s)
                return (Z + coupling * np.sqrt(2 * curlyI(s)) / (np.conj(Z) - Z)) \
                    * ufun(s, a) ** (1 / ka)

            def Ba(s, a=a, ka=ka):
                Z = Zfun(s)
                return (Z - coupling * np.sqrt(2 * curlyI(s)) / (np.conj(Z) - Z)) \
                    * ufun(s, a) ** (1 / ka)

            named[f"A_{a}"] = _obs(f"A_{a}", Aa)
            named[f"B_{a}"] = _obs(f"B_{a}", Ba)
            named[f"Abar_{a}"] = _obs(f"Abar_{a}", lambda s, Aa=Aa: np.conj(Aa(s)))
            named[f"Bbar_{a}"] = _obs(f"Bbar_{a}", lambda s, Ba=Ba: np.conj(Ba(s)))

            def Mosc(s, Aa=Aa, Ba=Ba, n_a=n_a):
                return (Aa(s) * Ba(s)) ** n_a

            named[f"Mosc_{a}"] = _obs(f"Mosc_{a}", Mosc)
            integrals[f"Mosc_{a}_re"] = _obs(f"Mosc_{a}_re", lambda s, M_=Mosc: M_(s).real)
            integrals[f"Mosc_{a}_im"] = _obs(f"Mosc_{a}_im", lambda s, M_=Mosc: M_(s).imag)
        else:
            def Mc(s, a=a, ka=ka):
                cI = curlyI(s)
                return (Zfun(s) - 1j * coupling / (2 * np.sqrt(cI))) * ufun(s, a) ** (1 / ka)

            named[f"Mcoul_{a}"] = _obs(f"Mcoul_{a}", Mc)
            named[f"Mcoulbar_{a}"] = _obs(f"Mcoulbar_{a}", lambda s, Mc=Mc: np.conj(Mc(s)))

            def McGlob(s, Mc=Mc, n_a=n_a):
                return Mc(s) ** n_a

            named[f"calMcoul_{a}"] = _obs(f"calMcoul_{a}", McGlob)
            integrals[f"Mcoul_{a}_re"] = _obs(f"Mcoul_{a}_re", lambda s, M_=McGlob: M_(s).real)
            integrals[f"Mcoul_{a}_im"] = _obs(f"Mcoul_{a}_im", lambda s, M_=McGlob: M_(s).imag)

    # free-system holomorphic constants (well-defined integrals when V->0 limit
    # is taken is not required; M_a themselves are catalogued as named objects)
    for a in range(M):
        ka = ks[a]
        n_a, m_a = fracs[a].numerator, fracs[a].denominator
        named[f"M_{a}"] = _obs(f"M_{a}", lambda s, a=a, ka=ka: Zfun(s) * ufun(s, a) ** (1 / ka))
        named[f"Mbar_{a}"] = _obs(
            f"Mbar_{a}", lambda s, a=a, ka=ka: np.conj(Zfun(s) * ufun(s, a) ** (1 / ka)))
        named[f"calM_{a}"] = _obs(
            f"calM_{a}",
            lambda s, a=a, n_a=n_a, m_a=m_a: Zfun(s) ** n_a * ufun(s, a) ** m_a)
        named[f"calMbar_{a}"] = _obs(
            f"calMbar_{a}",
            lambda s, a=a, n_a=n_a, m_a=m_a: np.conj(Zfun(s) ** n_a * ufun(s, a) ** m_a))

    named["H"] = None
    loci = [("S=0", lambda s: S_kappa(kap, s[0]))]
    if kap > 0:
        loci.append(("C=0", lambda s: C_kappa(kap, s[0])))
    for a in range(M):
        loci.append((f"I_{a}=0", lambda s, a=a: s[M + 2 + a]))

    def sample(rng):
        hi = min(2.5, 0.85 * x_max)
        x = rng.uniform(0.4, hi)
        Phi = rng.uniform(0, 2 * np.pi, M)
        if which == "kappa_coulomb":
            p = rng.normal() * 0.4
        else:
            p = rng.normal()
        I = rng.uniform(0.3, 1.5, M)
        return PhasePoint(np.concatenate([[x], Phi]), np.concatenate([[p], I]))

    Hobs = _obs("H", H)
    named["H"] = Hobs

    def radial_chart(s):
        return {"x": s[0], "p": s[M + 1], "curlyI": curlyI(s), "kappa": kap}

    which_flag = 0.0 if which == "kappa_oscillator" else 1.0
    return SystemSpec(
        params=par,
        hamiltonian=Hobs,
        bracket=canonical(M + 1, singular_guard=_guard_from_loci(loci)),
        integrals=integrals,
        named=named,
        singular_loci=loci,
        sample=sample,
        char_period=np.pi / coupling if which == "kappa_oscillator" else 2 * np.pi,
        dt_default=5e-4,
        flow=(flows.flow_kappa_radial,
              np.concatenate([[M, which_flag, coupling, kap, c0], ks])),
        radial_chart=radial_chart,
        notes=f"k_a as fractions: {[str(f) for f in fracs]}",
    )


# ---------------------------------------------------- recursive angular

def j_chain(theta: np.ndarray, p: np.ndarray, ks: np.ndarray, c0: float) -> np.ndarray:
    """j_0..j_M with j_0 = c0^2 and j_a = p_a^2 + j_{a-1}/sin^2(k_a theta_a)."""
    M = theta.size
    j = np.empty(M + 1)
    j[0] = c0 ** 2
    for a in range(1, M + 1):
        j[a] = p[a - 1] ** 2 + j[a - 1] / np.sin(ks[a - 1] * theta[a - 1]) ** 2
    return j


def _build_recursive_angular(par: SystemParams) -> SystemSpec:
    M = par.N
    c0 = float(par.get("c0", 0.0))
    fracs = [rational_k(k) for k in par.get("k", [1] * M)]
    if len(fracs) != M:
        raise InvalidParams("need M rational k_a")
    ks = np.array([float(f) for f in fracs])

    def H(s):
        return 0.5 * j_chain(s[:M], s[M:], ks, c0)[M]

    integrals = {}
    for a in range(1, M):
        integrals[f"j_{a}"] = _obs(
            f"j_{a}", lambda s, a=a: j_chain(s[:M], s[M:], ks, c0)[a])

    named = dict(integrals)
    named["H"] = _obs("H", H)
    loci = []
    for a in range(M):
        loci.append((f"sin(k theta_{a})=0", lambda s, a=a: np.sin(ks[a] * s[a])))
        loci.append((f"cos(k theta_{a})=0", lambda s, a=a: np.cos(ks[a] * s[a])))

    def sample(rng):
        th = np.array([rng.uniform(0.25, 0.75) * np.pi / (2 * ks[a]) for a in range(M)])
        return PhasePoint(th, rng.normal(size=M))

    return SystemSpec(
        params=par,
        hamiltonian=named["H"],
        bracket=canonical(M, singular_guard=_guard_from_loci(loci)),
        integrals=integrals,
        named=named,
        singular_loci=loci,
        sample=sample,
        char_period=2 * np.pi,
        dt_default=5e-4,
        flow=(flows.flow_recursive_angular, np.concatenate([[M, c0], ks])),
        notes=f"k_a as fractions: {[str(f) for f in fracs]}",
    )


_BUILDERS = {
    "oscillator": _build_oscillator,
    "coulomb": _build_coulomb,
    "conformal": _build_conformal,
    "sw_real": _build_sw_real,
    "ttw": lambda p: _build_planar(p, "ttw"),
    "pw": lambda p: _build_planar(p, "pw"),
    "sw_complex": _build_sw_complex,
    "cpn_rosochatius": _build_cpn_rosochatius,
    "kappa_oscillator": lambda p: _kappa_radial_family(p, "kappa_oscillator"),
    "kappa_coulomb": lambda p: _kappa_radial_family(p, "kappa_coulomb"),
    "recursive_angular": _build_recursive_angular,
}


def build_system(params: SystemParams) -> SystemSpec:
    if params.family not in _BUILDERS:
        raise UnsupportedFamily(f"unknown family {params.family!r}")
    if params.N < 1:
        raise InvalidParams("N must be >= 1")
    spec = _BUILDERS[params.family](params)
    spec.named.setdefault("H", spec.hamiltonian)
    return spec


def holomorphic_Z(spec: SystemSpec, x) -> complex:
    """Lobachevsky coordinate Z = p/sqrt(2) + i sqrt(I)/T_kappa for radial systems."""
    state = x.state if isinstance(x, PhasePoint) else np.asarray(x, float)
    if spec.radial_chart is None:
        raise UnsupportedFamily(f"{spec.family} exposes no radial chart")
    ch = spec.radial_chart(state)
    cI = ch["curlyI"]
    if cI <= 0:
        raise NonpositiveAngularPart("angular invariant must be positive")
    T = T_kappa(ch["kappa"], ch["x"])
    if T <= 0:
        raise SingularRadius("radial tangent coordinate must be positive")
    return complex(ch["p"] / np.sqrt(2) + 1j * np.sqrt(cI) / T)


def independent_count(spec: SystemSpec, x, tol: float = 1e-8) -> int:
    """Rank of the integral Jacobian at x (functional independence check)."""
    state = x.state if isinstance(x, PhasePoint) else np.asarray(x, float)
    rows = []
    for obs in spec.integrals.values():
        grad = obs.gradient(state)
        rows.append(np.real(grad))
        if np.max(np.abs(np.imag(grad))) > 1e-12:
            rows.append(np.imag(grad))
    mat = np.array(rows)
    sv = np.linalg.svd(mat, compute_uv=False)
    return int(np.sum(sv > tol * sv[0]))
