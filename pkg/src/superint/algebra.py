"""Numerical verification of the symmetry-algebra identities of the catalog.

Square-root structured generators (S, T, R) are never constructed; identities
that only fix ({f,g})^2 carry square=True and compare the squared bracket
against the stated polynomial.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .errors import UnknownObservable, UnsupportedFamily
from .phase import PhasePoint, poisson_bracket
from .systems import SystemSpec, rational_k


@dataclass(frozen=True)
class AlgebraIdentity:
    name: str
    lhs: tuple              # (f_name, g_name)
    rhs: Callable[[dict], complex]
    square: bool = False
    uses: tuple = ()
    tolerance: float = 1e-6


def verify_identity(ident: AlgebraIdentity, spec: SystemSpec, points: Iterable) -> float:
    """Max over points of the normalized identity residual."""
    fname, gname = ident.lhs
    for nm in (fname, gname, *ident.uses):
        if nm not in spec.named:
            raise UnknownObservable(f"{nm} not in catalog of {spec.family}")
    f = spec.named[fname]
    g = spec.named[gname]
    worst = 0.0
    for x in points:
        state = x.state if isinstance(x, PhasePoint) else np.asarray(x, float)
        spec.bracket.check_regular(state)
        vals = {nm: spec.named[nm](state) for nm in ident.uses}
        vals[fname] = f(state)
        vals[gname] = g(state)
        lhs = poisson_bracket(f, g, spec.bracket, state)
        rhs = ident.rhs(vals)
        if ident.square:
            num = abs(lhs ** 2 - rhs)
            scale = 1.0 + abs(lhs) ** 2 + abs(rhs)
        else:
            num = abs(lhs - rhs)
            scale = 1.0 + abs(lhs) + abs(rhs)
        scale += sum(abs(v) for v in vals.values())
        worst = max(worst, num / scale)
    return worst


def verify_catalog(spec: SystemSpec, points, identities=None) -> dict:
    """Residual per identity; identities default to the family catalog."""
    identities = identities if identities is not None else identity_catalog(spec)
    return {ident.name: verify_identity(ident, spec, points) for ident in identities}


# ----------------------------------------------------------------- catalogs

def _zero(_):
    return 0.0


def _sw_real_identities(spec: SystemSpec):
    par = spec.params
    N = par.N
    w = float(par.get("omega", 0.0)) if spec.family == "sw_real" else 0.0
    g = np.asarray(par.get("g", np.ones(N)), float)
    out = []
    for i in range(N):
        for j in range(i + 1, N):
            def s2(vals, i=i, j=j):
                Ii, Ij, Iij = vals[f"I_{i}"], vals[f"I_{j}"], vals[f"I_{i}{j}"]
                return -16 * (Ii * Ij * Iij + w ** 2 / 4 * Iij ** 2
                              + Ii ** 2 * g[j] ** 2 + Ij ** 2 * g[i] ** 2
                              - g[i] ** 2 * g[j] ** 2 * w ** 2)

            out.append(AlgebraIdentity(
                f"S2_{i}{j}", (f"I_{i}", f"I_{i}{j}"), s2, square=True,
                uses=(f"I_{i}", f"I_{j}", f"I_{i}{j}")))
            out.append(AlgebraIdentity(f"liouville_{i}{j}", (f"I_{i}", f"I_{j}"), _zero))
            for kk in range(N):
                if kk != i and kk != j:
                    # all-distinct index rule: every delta vanishes
                    out.append(AlgebraIdentity(
                        f"survivor_zero_{kk}.{i}{j}", (f"I_{kk}", f"I_{i}{j}"), _zero,
                        tolerance=1e-12))
    for i in range(N):
        for j in range(i + 1, N):
            for kk in range(j + 1, N):
                def t2(vals, i=i, j=j, kk=kk):
                    Iij, Ijk, Iik = (vals[f"I_{i}{j}"], vals[f"I_{j}{kk}"],
                                     vals[f"I_{i}{kk}"])
                    return -16 * (Iij * Ijk * Iik + g[kk] ** 2 * Iij ** 2
                                  + g[j] ** 2 * Iik ** 2 + g[i] ** 2 * Ijk ** 2
                                  - 4 * g[i] ** 2 * g[j] ** 2 * g[kk] ** 2)

                out.append(AlgebraIdentity(
                    f"T2_{i}{j}{kk}", (f"I_{i}{j}", f"I_{j}{kk}"), t2, square=True,
                    uses=(f"I_{i}{j}", f"I_{j}{kk}", f"I_{i}{kk}")))
    return out


def _conformal_identities(spec: SystemSpec):
    out = [
        AlgebraIdentity("ca_HD", ("H", "D"), lambda v: 2 * v["H"], uses=("H",)),
        AlgebraIdentity("ca_HK", ("H", "K"), lambda v: v["D"], uses=("D",)),
        AlgebraIdentity("ca_KD", ("K", "D"), lambda v: -2 * v["K"], uses=("K",)),
    ]
    return out + _sw_real_identities(spec)


def _so_n_identities(spec: SystemSpec):
    # {L_ij, L_kl} = d_ik L_jl + d_jl L_ik - d_il L_jk - d_jk L_il
    N = spec.params.N
    pairs = [(i, j) for i in range(N) for j in range(i + 1, N)]
    names = tuple(f"L_{i}{j}" for i, j in pairs)

    def Lval(vals, i, j):
        if i == j:
            return 0.0
        return vals[f"L_{i}{j}"] if i < j else -vals[f"L_{j}{i}"]

    out = []
    for i, j in pairs:
        for k, l in pairs:
            if (i, j) >= (k, l):
                continue

            def rhs(vals, i=i, j=j, k=k, l=l):
                return ((i == k) * Lval(vals, j, l) + (j == l) * Lval(vals, i, k)
                        - (i == l) * Lval(vals, j, k) - (j == k) * Lval(vals, i, l))

            out.append(AlgebraIdentity(
                f"so_{i}{j}.{k}{l}", (f"L_{i}{j}", f"L_{k}{l}"), rhs, uses=names))
    return out


def _coulomb_identities(spec: SystemSpec):
    # Runge-Lenz closure {A_i, A_j} = -2 H L_ij
    N = spec.params.N
    out = _so_n_identities(spec)
    out.append(AlgebraIdentity("H_named", ("H", "H"), _zero))
    for i in range(N):
        for j in range(i + 1, N):
            out.append(AlgebraIdentity(
                f"RL_{i}{j}", (f"A_{i}", f"A_{j}"),
                lambda v, i=i, j=j: -2 * v["H"] * v[f"L_{i}{j}"],
                uses=("H", f"L_{i}{j}")))
    return out


def _planar_identities(spec: SystemSpec):
    out = [AlgebraIdentity("conserve_IPT", ("H", "I_PT"), _zero)]
    for nm in ("Ranada_re", "Ranada_im"):
        if nm in spec.named:
            out.append(AlgebraIdentity(f"conserve_{nm}", ("H", nm), _zero))
    return out


def _sw_complex_identities(spec: SystemSpec):
    par = spec.params
    N = par.N
    w = float(par.get("omega", 1.0))
    B = float(par.get("B", 0.0))
    g = np.asarray(par.get("g", np.ones(N)), float)
    uses_base = tuple(f"I_{a}" for a in range(N)) + tuple(f"L_{a}{a}" for a in range(N))
    out = []

    def iab(vals, a, b):
        return vals[f"I_{min(a, b)}{max(a, b)}"]

    for a in range(N):
        for b in range(N):
            if a == b:
                continue
            lo, hi = min(a, b), max(a, b)
            uses = uses_base + (f"I_{lo}{hi}",)

            def s2_long(vals, a=a, b=b, lo=lo, hi=hi):
                Ia_, Ib_ = vals[f"I_{a}"], vals[f"I_{b}"]
                Iab_ = vals[f"I_{lo}{hi}"]
                La, Lb = vals[f"L_{a}{a}"], vals[f"L_{b}{b}"]
                return (4 * Iab_ * Ia_ * Ib_ - (La * Ib_ + Lb * Ia_) ** 2
                        - 4 * g[a] ** 2 * Ib_ ** 2 - 4 * g[b] ** 2 * Ia_ ** 2
                        - 4 * w ** 2 * Iab_ * (Iab_ - La * Lb)
                        + 4 * w ** 2 * g[b] ** 2 * La ** 2
                        + 4 * g[a] ** 2 * w ** 2 * Lb ** 2
                        + 16 * g[a] ** 2 * g[b] ** 2 * w ** 2
                        - 2 * B * (Iab_ - La * Lb) * (La * Ib_ + Lb * Ia_)
                        - B ** 2 * (Iab_ - La * Lb) ** 2
                        + 4 * B * (g[b] ** 2 * Ia_ * La + g[a] ** 2 * Ib_ * Lb)
                        + 4 * B ** 2 * g[a] ** 2 * g[b] ** 2)

            def s2_M(vals, a=a, b=b, lo=lo, hi=hi):
                La, Lb = vals[f"L_{a}{a}"], vals[f"L_{b}{b}"]
                Maa = La ** 2 + 4 * g[a] ** 2
                Mbb = Lb ** 2 + 4 * g[b] ** 2
                Mab = vals[f"I_{lo}{hi}"] - 0.5 * La * Lb
                Ma0 = vals[f"I_{a}"] - B / 2 * La
                Mb0 = vals[f"I_{b}"] - B / 2 * Lb
                return (4 * Mab * Ma0 * Mb0
                        + (w ** 2 + B ** 2 / 4) * (Maa * Mbb - 4 * Mab ** 2)
                        - Mb0 ** 2 * Maa - Ma0 ** 2 * Mbb)

            out.append(AlgebraIdentity(f"S2long_{a}{b}", (f"I_{a}", f"I_{lo}{hi}"),
                                       s2_long, square=True, uses=uses))
            out.append(AlgebraIdentity(f"S2M_{a}{b}", (f"I_{a}", f"I_{lo}{hi}"),
                                       s2_M, square=True, uses=uses))
        for b in range(a + 1, N):
            out.append(AlgebraIdentity(f"liouville_{a}{b}", (f"I_{a}", f"I_{b}"), _zero))
    for a in range(N):
        for b in range(a + 1, N):
            for c in range(b + 1, N):
                def t2(vals, a=a, b=b, c=c):
                    Iab_, Ibc_, Iac_ = iab(vals, a, b), iab(vals, b, c), iab(vals, a, c)
                    La, Lb, Lc = (vals[f"L_{a}{a}"], vals[f"L_{b}{b}"], vals[f"L_{c}{c}"])
                    ga2, gb2, gc2 = g[a] ** 2, g[b] ** 2, g[c] ** 2
                    return (2 * (Iab_ - La * Lb) * (Ibc_ - Lb * Lc) * (Iac_ - La * Lc)
                            + 2 * Iab_ * Iac_ * Ibc_ + La ** 2 * Lb ** 2 * Lc ** 2
                            - 4 * (gc2 * Iab_ * (Iab_ - La * Lb)
                                   + ga2 * Ibc_ * (Ibc_ - Lb * Lc)
                                   + gb2 * Iac_ * (Iac_ - La * Lc))
                            - (Ibc_ ** 2 * La ** 2 + Iab_ ** 2 * Lc ** 2
                               + Iac_ ** 2 * Lb ** 2)
                            + 4 * gb2 * gc2 * La ** 2 + 4 * ga2 * gc2 * Lb ** 2
                            + 4 * ga2 * gb2 * Lc ** 2 + 16 * ga2 * gb2 * gc2)

                uses = uses_base + (f"I_{a}{b}", f"I_{b}{c}", f"I_{a}{c}")
                out.append(AlgebraIdentity(f"T2_{a}{b}{c}", (f"I_{a}{b}", f"I_{b}{c}"),
                                           t2, square=True, uses=uses))
    # su(N) among all L_{a bbar} and centrality of the diagonal charges
    lnames = tuple(f"L_{a}{b}" for a in range(N) for b in range(N))
    combos = [(a, b) for a in range(N) for b in range(N)]
    for ia, (a, b) in enumerate(combos):
        for c, d in combos[ia + 1:]:
            def rhs(vals, a=a, b=b, c=c, d=d):
                val = 0.0
                if a == d:
                    val += 1j * vals[f"L_{c}{b}"]
                if c == b:
                    val -= 1j * vals[f"L_{a}{d}"]
                return val

            out.append(AlgebraIdentity(
                f"su_{a}{b}.{c}{d}", (f"L_{a}{b}", f"L_{c}{d}"), rhs, uses=lnames))
    for a in range(N):
        for nm in spec.integrals:
            if nm != f"L_{a}{a}":
                out.append(AlgebraIdentity(
                    f"central_L{a}.{nm}", (f"L_{a}{a}", nm), _zero, tolerance=1e-9))
    return out


def _cpn_ros_identities(spec: SystemSpec):
    par = spec.params
    N = par.N
    om = np.asarray(par.get("omega_i", np.ones(N + 1)), float)
    out = []

    def jdiag(vals, i):
        # J_{i ibar}; reduction fixes the 0-th charge to J_00bar = -J0
        if i == 0:
            return -vals["J0"]
        return vals[f"J_{i - 1}{i - 1}"]

    def ival(vals, i, j):
        i_, j_ = min(i, j), max(i, j)
        return vals[f"I_0{j_}"] if i_ == 0 else vals[f"I_{i_}{j_}"]

    base = tuple(f"J_{a}{a}" for a in range(N)) + ("J0",)
    for i in range(N + 1):
        for j in range(i + 1, N + 1):
            for k in range(j + 1, N + 1):
                def t2(vals, i=i, j=j, k=k):
                    Iij, Ijk, Iik = ival(vals, i, j), ival(vals, j, k), ival(vals, i, k)
                    Ji, Jj, Jk = jdiag(vals, i), jdiag(vals, j), jdiag(vals, k)
                    oi2, oj2, ok2 = om[i] ** 2, om[j] ** 2, om[k] ** 2
                    return (2 * (Iij - Ji * Jj) * (Ijk - Jj * Jk) * (Iik - Ji * Jk)
                            + 2 * Iij * Iik * Ijk + Ji ** 2 * Jj ** 2 * Jk ** 2
                            - 4 * (ok2 * Iij * (Iij - Ji * Jj)
                                   + oi2 * Ijk * (Ijk - Jj * Jk)
                                   + oj2 * Iik * (Iik - Ji * Jk))
                            + 4 * oj2 * ok2 * Ji ** 2 + 4 * oi2 * ok2 * Jj ** 2
                            + 4 * oi2 * oj2 * Jk ** 2 + 16 * oi2 * oj2 * ok2
                            - (Ijk ** 2 * Ji ** 2 + Iij ** 2 * Jk ** 2
                               + Iik ** 2 * Jj ** 2))

                names = {f"I_0{q}" if p == 0 else f"I_{p}{q}"
                         for p, q in [(i, j), (j, k), (i, k)]}
                fnm = f"I_0{j}" if i == 0 else f"I_{i}{j}"
                gnm = f"I_{j}{k}"
                out.append(AlgebraIdentity(f"T2_{i}{j}{k}", (fnm, gnm), t2,
                                           square=True, uses=base + tuple(names)))
    for a in range(N):
        for nm in spec.integrals:
            if nm != f"J_{a}{a}":
                out.append(AlgebraIdentity(
                    f"central_J{a}.{nm}", (f"J_{a}{a}", nm), _zero, tolerance=1e-9))
    # su(N+1) among named generators
    jnames = (tuple(f"J_{a}{b}" for a in range(N) for b in range(N))
              + tuple(f"Jvec_{a}" for a in range(N)) + ("J0",))
    combos = [(a, b) for a in range(N) for b in range(N)]
    for ia, (a, b) in enumerate(combos):
        for c, d in combos[ia + 1:]:
            def rhs(vals, a=a, b=b, c=c, d=d):
                val = 0.0
                if a == d:
                    val += 1j * vals[f"J_{c}{b}"]
                if c == b:
                    val -= 1j * vals[f"J_{a}{d}"]
                return val

            out.append(AlgebraIdentity(
                f"suN1_{a}{b}.{c}{d}", (f"J_{a}{b}", f"J_{c}{d}"), rhs, uses=jnames))
    for a in range(N):
        for b in range(N):
            def rhs_jjb(vals, a=a, b=b):
                val = -1j * vals[f"J_{a}{b}"]
                if a == b:
                    val += -1j * vals["J0"]
                return val

            out.append(AlgebraIdentity(
                f"JJbar_{a}{b}", (f"Jvec_{a}", f"Jvecbar_{b}"), rhs_jjb, uses=jnames))

            def rhs_jj(vals, a=a, b=b, c=b):
                return 0.0

            out.append(AlgebraIdentity(
                f"JvecJvec_{a}{b}", (f"Jvec_{a}", f"Jvec_{b}"), _zero))
        for b in range(N):
            for c in range(N):
                def rhs_jv(vals, a=a, b=b, c=c):
                    return 1j * vals[f"Jvec_{b}"] if a == c else 0.0

                out.append(AlgebraIdentity(
                    f"JvecJ_{a}.{b}{c}", (f"Jvec_{a}", f"J_{b}{c}"), rhs_jv,
                    uses=jnames))
    return out


def _kappa_identities(spec: SystemSpec):
    par = spec.params
    M = par.N - 1
    kap = float(par.get("kappa", 0.0))
    fracs = [rational_k(k) for k in par.get("k", [1] * M)]
    osc = spec.family == "kappa_oscillator"
    coupling = float(par.get("omega" if osc else "gamma", 1.0))
    sq2I = lambda v: np.sqrt(2 * v["curlyI"])
    out = [
        AlgebraIdentity(
            "kconf_HD", ("H0", "D"),
            lambda v: 2 * (v["H0"] - kap * v["curlyI"]) * (1 + 2 * kap * v["K"]),
            uses=("H0", "K", "curlyI")),
        AlgebraIdentity(
            "kconf_HK", ("H0", "K"),
            lambda v: v["D"] * (1 + 2 * kap * v["K"]), uses=("D", "K")),
        AlgebraIdentity(
            "kconf_DK", ("D", "K"),
            lambda v: 2 * v["K"] * (1 + 2 * kap * v["K"]), uses=("K",)),
        AlgebraIdentity(
            "ZbarZ", ("Zbar", "Z"),
            lambda v: (1j * (v["Z"] - v["Zbar"]) ** 2 / (2 * sq2I(v))
                       - 1j * kap * sq2I(v)),
            uses=("Z", "Zbar", "curlyI")),
    ]
    for a in range(M):
        frac = fracs[a]
        na, ma = frac.numerator, frac.denominator
        kaf = float(frac)
        out.append(AlgebraIdentity(
            f"MMbar_{a}", (f"M_{a}", f"Mbar_{a}"),
            lambda v, a=a, kaf=kaf: (
                -1j / kaf ** 2 * v[f"I_{a}"] ** (1 / kaf - 1)
                * (v["H0"] - kap * v["curlyI"])
                + 1j * kap * sq2I(v) * v[f"M_{a}"] * v[f"Mbar_{a}"]
                / (v["H0"] - kap * v["curlyI"])),
            uses=(f"I_{a}", "H0", "curlyI", f"M_{a}", f"Mbar_{a}")))
        out.append(AlgebraIdentity(
            f"calMcalMbar_{a}", (f"calM_{a}", f"calMbar_{a}"),
            lambda v, a=a, na=na, ma=ma: 1j * (
                kap * na * na * sq2I(v) / (v["H0"] - kap * v["curlyI"])
                - ma ** 2 / v[f"I_{a}"]) * v[f"calM_{a}"] * v[f"calMbar_{a}"],
            uses=(f"I_{a}", "H0", "curlyI", f"calM_{a}", f"calMbar_{a}")))
        out.append(AlgebraIdentity(
            f"IcalM_{a}", (f"I_{a}", f"calM_{a}"),
            lambda v, a=a, ma=ma: 1j * ma * v[f"calM_{a}"], uses=(f"calM_{a}",)))
        out.append(AlgebraIdentity(
            f"conserve_calM0_{a}", ("H0", f"calM_{a}"), _zero))
        for b in range(M):
            if a < b:
                out.append(AlgebraIdentity(
                    f"calMcalM_{a}{b}", (f"calM_{a}", f"calM_{b}"), _zero))
                out.append(AlgebraIdentity(
                    f"liouville_{a}{b}", (f"I_{a}", f"I_{b}"), _zero))
    if osc:
        w = coupling
        for a in range(M):
            kaf = float(fracs[a])
            na = fracs[a].numerator
            out.append(AlgebraIdentity(
                f"HA_{a}", ("H", f"A_{a}"),
                lambda v, a=a: 1j * w * (1 + kap * v["T"] ** 2) * v[f"A_{a}"],
                uses=(f"A_{a}", "T")))
            out.append(AlgebraIdentity(
                f"HB_{a}", ("H", f"B_{a}"),
                lambda v, a=a: -1j * w * (1 + kap * v["T"] ** 2) * v[f"B_{a}"],
                uses=(f"B_{a}", "T")))
            out.append(AlgebraIdentity(
                f"conserve_Mosc_{a}", ("H", f"Mosc_{a}"), _zero))
            for b in range(M):
                d = 1.0 if a == b else 0.0
                E = lambda v: v["H"] - kap * v["curlyI"]
                out.append(AlgebraIdentity(
                    f"AA_{a}{b}", (f"A_{a}", f"A_{b}"), _zero))
                out.append(AlgebraIdentity(
                    f"AB_{a}{b}", (f"A_{a}", f"B_{b}"),
                    lambda v, a=a, b=b: (-1j * kap * w * v["T"] ** 2
                                         / (v["Z"] ** 2 + w ** 2 * v["T"] ** 2 / 2)
                                         * v[f"A_{a}"] * v[f"B_{b}"]),
                    uses=(f"A_{a}", f"B_{b}", "Z", "T")))
                out.append(AlgebraIdentity(
                    f"AbarB_{a}{b}", (f"A_{a}", f"Bbar_{b}"),
                    lambda v, a=a, b=b, d=d, kaf=kaf: (
                        -1j * d / (kaf ** 2 * v[f"I_{a}"]) * v[f"A_{a}"] * v[f"Bbar_{a}"]
                        + 1j * kap * sq2I(v) * v[f"A_{a}"] * v[f"Abar_{b}"]
                        / (E(v) + w * sq2I(v))),
                    uses=(f"A_{a}", f"Bbar_{a}", f"Bbar_{b}", f"Abar_{b}", f"I_{a}",
                          "H", "curlyI")))
                out.append(AlgebraIdentity(
                    f"AbarA_{a}{b}", (f"A_{a}", f"Abar_{b}"),
                    lambda v, a=a, b=b, d=d, kaf=kaf: (
                        1j * (kap * sq2I(v) - w * (2 + kap * v["T"] ** 2))
                        / (E(v) + w * sq2I(v)) * v[f"A_{a}"] * v[f"Abar_{b}"]
                        - 1j * d / kaf ** 2 * v[f"I_{a}"] ** (1 / kaf - 1)
                        * (E(v) + w * sq2I(v))),
                    uses=(f"A_{a}", f"Abar_{b}", f"I_{a}", "H", "curlyI", "T")))
                out.append(AlgebraIdentity(
                    f"BbarB_{a}{b}", (f"B_{a}", f"Bbar_{b}"),
                    lambda v, a=a, b=b, d=d, kaf=kaf: (
                        1j * (kap * sq2I(v) + w * (2 + kap * v["T"] ** 2))
                        / (E(v) - w * sq2I(v)) * v[f"B_{a}"] * v[f"Bbar_{b}"]
                        - 1j * d / kaf ** 2 * v[f"I_{a}"] ** (1 / kaf - 1)
                        * (E(v) - w * sq2I(v))),
                    uses=(f"B_{a}", f"Bbar_{b}", f"I_{a}", "H", "curlyI", "T")))
    else:
        gam = coupling
        for a in range(M):
            kaf = float(fracs[a])
            out.append(AlgebraIdentity(
                f"conserve_Mcoul_{a}", ("H", f"calMcoul_{a}"), _zero))
            for b in range(M):
                d = 1.0 if a == b else 0.0
                out.append(AlgebraIdentity(
                    f"McMcbar_{a}{b}", (f"Mcoul_{a}", f"Mcoulbar_{b}"),
                    lambda v, a=a, b=b, d=d, kaf=kaf: (
                        1j * sq2I(v) * (gam ** 2 / (4 * v["curlyI"] ** 2) + kap)
                        * v[f"Mcoul_{a}"] * v[f"Mcoulbar_{b}"]
                        / (v["H"] - kap * v["curlyI"] + gam ** 2 / (4 * v["curlyI"]))
                        - 1j * d / kaf ** 2 * v[f"I_{a}"] ** (1 / kaf - 1)
                        * (v["H"] - kap * v["curlyI"] + gam ** 2 / (4 * v["curlyI"]))),
                    uses=(f"Mcoul_{a}", f"Mcoulbar_{b}", f"I_{a}", "H", "curlyI")))
                out.append(AlgebraIdentity(
                    f"IMc_{a}{b}", (f"I_{a}", f"Mcoul_{b}"),
                    lambda v, a=a, b=b, d=d, kaf=kaf: 1j * d / kaf * v[f"Mcoul_{b}"],
                    uses=(f"Mcoul_{b}",)))
    return out


def identity_catalog(spec: SystemSpec):
    fam = spec.family
    if fam == "sw_real":
        return _sw_real_identities(spec)
    if fam == "conformal":
        return _conformal_identities(spec)
    if fam == "oscillator":
        return _so_n_identities(spec)
    if fam == "coulomb":
        return _coulomb_identities(spec)
    if fam in ("ttw", "pw"):
        return _planar_identities(spec)
    if fam == "sw_complex":
        return _sw_complex_identities(spec)
    if fam == "cpn_rosochatius":
        return _cpn_ros_identities(spec)
    if fam in ("kappa_oscillator", "kappa_coulomb"):
        return _kappa_identities(spec)
    if fam == "recursive_angular":
        return [AlgebraIdentity(f"liouville_j{a}{b}", (f"j_{a}", f"j_{b}"), _zero)
                for a in range(1, spec.params.N) for b in range(a, spec.params.N)]
    raise UnsupportedFamily(fam)


# -------------------------------------------------------------- other checks

def casimir_check(spec: SystemSpec, x) -> float:
    """Residual of 2 H0 K - D^2/2 - curlyI (flat conformal Casimir)."""
    state = x.state if isinstance(x, PhasePoint) else np.asarray(x, float)
    named = spec.named
    if "D" not in named or "K" not in named or "curlyI" not in named:
        raise UnsupportedFamily(f"{spec.family} has no conformal chart")
    kap = float(spec.params.get("kappa", 0.0))
    if kap != 0.0:
        raise UnsupportedFamily("Casimir normalization applies to the flat chart")
    H0 = named["H0"](state) if "H0" in named else named["H"](state)
    D = named["D"](state)
    K = named["K"](state)
    cI = named["curlyI"](state)
    res = 2 * H0 * K - D ** 2 / 2 - cI
    return abs(res) / (1 + abs(H0 * K) + abs(D) ** 2 + abs(cI))


def hamiltonian_decomposition_check(spec: SystemSpec, x) -> float:
    """Residual of H minus its stated combination of symmetry generators."""
    state = x.state if isinstance(x, PhasePoint) else np.asarray(x, float)
    fam = spec.family
    H = complex(spec.hamiltonian(state)).real
    if fam == "cpn_rosochatius":
        N = spec.params.N
        r0 = float(spec.params.get("r0", 1.0))
        B = float(spec.params.get("B", 0.0))
        val = sum(complex(spec.named[f"I_0{a + 1}"](state)).real for a in range(N))
        for a in range(1, N + 1):
            for b in range(a + 1, N + 1):
                val += complex(spec.named[f"I_{a}{b}"](state)).real
        J0 = complex(spec.named["J0"](state)).real
        Jd = [complex(spec.named[f"J_{a}{a}"](state)).real for a in range(N)]
        val += (0.5 * sum(j ** 2 for j in Jd)
                + (J0 ** 2 - (B * r0 ** 2) ** 2) / 2) / r0 ** 2
        return abs(val - H) / (1 + abs(H))
    if fam in ("sw_complex", "sw_real", "conformal"):
        N = spec.params.N
        val = sum(complex(spec.named[f"I_{i}"](state)).real for i in range(N))
        return abs(val - H) / (1 + abs(H))
    raise UnsupportedFamily(f"no stated decomposition for {fam}")
