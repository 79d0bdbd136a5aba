"""Closed-form classical orbits of the CP^N-Rosochatius system.

Separation in the spherical chart xi_a = sin^2(theta_a): the top level
oscillates as xi_N = A_N + B_N sin(2 sqrt(c_N)(t-t0)); each lower level is
slaved to the phase of the level above through the kappa_alpha constants.
Azimuthal angles follow by quadrature of phi-dot along the closed-form path.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.integrate import quad

from .errors import DomainViolation, UnsupportedFamily
from .integrate import integrate
from .phase import PhasePoint
from .systems import SystemSpec


def effective_frequencies(om: np.ndarray, p_phi: np.ndarray, B: float):
    """(omtilde_1..omtilde_N, omtilde_0) squared, per the U(1) reduction."""
    wt_a2 = om[1:] ** 2 + p_phi ** 2 / 4
    wt_02 = om[0] ** 2 + (B + np.sum(p_phi)) ** 2 / 4
    return wt_a2, wt_02


@dataclass(frozen=True)
class HJSolution:
    N: int
    c: np.ndarray                  # separation constants c_1..c_N (c_N = E + E0)
    p_phi: np.ndarray              # fixed U(1) momenta
    om: np.ndarray                 # omega_0..omega_N
    B: float
    t0: float = 0.0
    kappas: np.ndarray = field(default_factory=lambda: np.zeros(0))
    phi0: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        wt_a2, wt_02 = effective_frequencies(self.om, self.p_phi, self.B)
        chain = self.chain_constants()
        for a in range(1, self.N + 1):
            A, Bamp = chain["A"][a], chain["Bamp"][a]
            if Bamp ** 2 < 0 or not np.isfinite(Bamp):
                raise DomainViolation("A_a^2 < c_{a-1}/c_a: no real libration")

    def wt2(self):
        """(wt_1^2..wt_N^2, wt_{N+1}^2 = wt_0^2) indexed 1..N+1."""
        wt_a2, wt_02 = effective_frequencies(self.om, self.p_phi, self.B)
        return np.concatenate([[np.nan], wt_a2, [wt_02]])

    @property
    def E0(self) -> float:
        return self.B ** 2 / 4 + float(np.sum(self.om ** 2))

    @property
    def energy(self) -> float:
        return float(self.c[-1]) - self.E0

    def chain_constants(self):
        wt2 = self.wt2()
        c = np.concatenate([[wt2[1]], self.c])    # c_0 = wt_1^2
        A = np.full(self.N + 1, np.nan)
        Bamp = np.full(self.N + 1, np.nan)
        for a in range(1, self.N + 1):
            A[a] = (c[a] + c[a - 1] - wt2[a + 1]) / (2 * c[a])
            Bamp[a] = np.sqrt(max(A[a] ** 2 - c[a - 1] / c[a], 0.0))
        return {"c": c, "A": A, "Bamp": Bamp}


def hj_evaluate(sol: HJSolution, t: float, with_signs: bool = False):
    """Configuration (xi_a, phi^a) of the closed-form orbit at time t."""
    N = sol.N
    ch = sol.chain_constants()
    c, A, Bamp = ch["c"], ch["A"], ch["Bamp"]
    xi = np.empty(N + 1)
    sgn = np.empty(N + 1)
    psi = 2 * np.sqrt(c[N]) * (t - sol.t0)
    xi[N] = A[N] + Bamp[N] * np.sin(psi)
    sgn[N] = np.sign(np.cos(psi)) or 1.0
    for al in range(N - 1, 0, -1):
        C = c[al] / c[al + 1]
        Q = -xi[al + 1] ** 2 + 2 * A[al + 1] * xi[al + 1] - C
        X = np.arctan2(A[al + 1] * xi[al + 1] - C,
                       sgn[al + 1] * np.sqrt(max(C * Q, 0.0)))
        phase = X + sol.kappas[al - 1]
        xi[al] = A[al] + Bamp[al] * np.sin(phase)
        sgn[al] = np.sign(np.cos(phase)) or 1.0
    xi_out = xi[1:]
    if np.any(xi_out <= 0) or np.any(xi_out >= 1):
        raise DomainViolation("xi left (0,1); inconsistent separation constants")
    phi = sol.phi0 + _phi_advance(sol, t)
    if with_signs:
        return xi_out, phi, sgn[1:]
    return xi_out, phi


def _phi_rates(sol: HJSolution, xi: np.ndarray) -> np.ndarray:
    """phi^a rates at configuration xi (chain factors of the separable H)."""
    N = sol.N
    rates = np.empty(N)
    tail = np.cumprod((1.0 / xi)[::-1])[::-1]     # tail[m] = prod_{l>=m} 1/xi_l
    for a in range(1, N + 1):
        D = tail[a - 1]
        if a >= 2:
            D /= (1 - xi[a - 2])
        rates[a - 1] = sol.p_phi[a - 1] / 2 * D
    rates += (sol.B + np.sum(sol.p_phi)) / 2 / (1 - xi[N - 1])
    return rates


def _phi_advance(sol: HJSolution, t: float) -> np.ndarray:
    if t == 0.0:
        return np.zeros(sol.N)

    out = np.empty(sol.N)
    for a in range(sol.N):
        val, _ = quad(lambda s: _phi_rates(sol, hj_evaluate_xi(sol, s))[a],
                      0.0, t, limit=400, epsabs=1e-12, epsrel=1e-11)
        out[a] = val
    return out


def hj_evaluate_xi(sol: HJSolution, t: float) -> np.ndarray:
    """xi(t) only (no angle quadrature)."""
    N = sol.N
    ch = sol.chain_constants()
    c, A, Bamp = ch["c"], ch["A"], ch["Bamp"]
    xi = np.empty(N + 1)
    sgn = 1.0
    psi = 2 * np.sqrt(c[N]) * (t - sol.t0)
    xi[N] = A[N] + Bamp[N] * np.sin(psi)
    sgn = np.sign(np.cos(psi)) or 1.0
    for al in range(N - 1, 0, -1):
        C = c[al] / c[al + 1]
        Q = -xi[al + 1] ** 2 + 2 * A[al + 1] * xi[al + 1] - C
        X = np.arctan2(A[al + 1] * xi[al + 1] - C,
                       sgn * np.sqrt(max(C * Q, 0.0)))
        phase = X + sol.kappas[al - 1]
        xi[al] = A[al] + Bamp[al] * np.sin(phase)
        sgn = np.sign(np.cos(phase)) or 1.0
    return xi[1:]


# ------------------------------------------------- chart transformations

def spherical_from_y(y: np.ndarray) -> np.ndarray:
    """theta_1..theta_N from the real chart radii y_1..y_N (y_i > 0)."""
    N = y.size
    theta = np.empty(N)
    r = np.linalg.norm(y)
    theta[N - 1] = np.arctan(r)
    rem = y.copy()
    for a in range(N - 1, 0, -1):
        # y_{a+1} = (radius at this level) * cos(theta_a)
        level_r = np.linalg.norm(rem[:a + 1])
        theta[a - 1] = np.arccos(np.clip(rem[a] / level_r, -1, 1))
        rem = rem[:a + 1]
    return theta


def y_from_spherical(theta: np.ndarray) -> np.ndarray:
    """Inverse of spherical_from_y; y_N = tan(theta_N) cos(theta_{N-1}), etc."""
    N = theta.size
    y = np.empty(N)
    r = np.tan(theta[N - 1])
    fac = r
    for a in range(N - 1, 0, -1):
        y[a] = fac * np.cos(theta[a - 1])
        fac *= np.sin(theta[a - 1])
    y[0] = fac
    return y


def spherical_jacobian(theta: np.ndarray) -> np.ndarray:
    """J[a, m] = d y_a / d theta_m of y_from_spherical (analytic)."""
    N = theta.size
    y = y_from_spherical(theta)
    J = np.zeros((N, N))
    for a in range(N):
        J[a, N - 1] = y[a] / (np.sin(theta[N - 1]) * np.cos(theta[N - 1]))
        for m in range(a, N - 1):
            J[a, m] = y[a] / np.tan(theta[m])
        if a >= 1:
            J[a, a - 1] = -y[a] * np.tan(theta[a - 1])
    return J


def phase_point_from_angles(spec: SystemSpec, theta, p_theta, phi, p_phi) -> PhasePoint:
    """(theta, p_theta, phi, p_phi) -> complex chart (z, pi) of CP^N-Rosochatius."""
    theta = np.asarray(theta, float)
    p_theta = np.asarray(p_theta, float)
    phi = np.asarray(phi, float)
    p_phi = np.asarray(p_phi, float)
    B = float(spec.params.get("B", 0.0))
    N = theta.size
    y = y_from_spherical(theta)
    # cotangent lift: p_y = J^{-T} p_theta with J = d y / d theta
    J = np.empty((N, N))
    for i in range(N):
        e = np.zeros(N)
        e[i] = 1e-7
        J[:, i] = (y_from_spherical(theta + e) - y_from_spherical(theta - e)) / 2e-7
    p_y = np.linalg.solve(J.T, p_theta)
    y2 = float(y @ y)
    z = y * np.exp(1j * phi)
    pi = 0.5 * (p_y - 1j * (p_phi / y + B * y / (1 + y2))) * np.exp(-1j * phi)
    return PhasePoint.from_complex(z, pi)


def angles_from_phase_point(spec: SystemSpec, x: PhasePoint):
    """(theta, p_theta, phi, p_phi) of a CP^N-Rosochatius phase point."""
    z, pi = x.complex_view()
    B = float(spec.params.get("B", 0.0))
    y = np.abs(z)
    phi = np.angle(z)
    w = pi * np.exp(1j * phi)
    p_y = 2 * np.real(w)
    y2 = float(y @ y)
    p_phi = y * (-2 * np.imag(w) - B * y / (1 + y2))
    theta = spherical_from_y(y)
    N = y.size
    J = np.empty((N, N))
    for i in range(N):
        e = np.zeros(N)
        e[i] = 1e-7
        J[:, i] = (y_from_spherical(theta + e) - y_from_spherical(theta - e)) / 2e-7
    p_theta = J.T @ p_y
    return theta, p_theta, phi, p_phi


def liouville_chain(theta, p_theta, wt2) -> np.ndarray:
    """I_a = p^2/4 + I_{a-1}/sin^2 + wt_{a+1}^2/cos^2, I_0 = wt_1^2; returns c_1..c_N."""
    N = theta.size
    c = np.empty(N + 1)
    c[0] = wt2[1]
    for a in range(1, N + 1):
        c[a] = (p_theta[a - 1] ** 2 / 4 + c[a - 1] / np.sin(theta[a - 1]) ** 2
                + wt2[a + 1] / np.cos(theta[a - 1]) ** 2)
    return c[1:]


def hj_from_point(spec: SystemSpec, x: PhasePoint) -> HJSolution:
    """HJSolution whose t=0 configuration matches the phase point x."""
    if spec.family != "cpn_rosochatius":
        raise UnsupportedFamily("closed-form solutions exist for cpn_rosochatius")
    par = spec.params
    N = par.N
    om = np.asarray(par.get("omega_i", np.ones(N + 1)), float)
    B = float(par.get("B", 0.0))
    theta, p_theta, phi, p_phi = angles_from_phase_point(spec, x)
    wt_a2, wt_02 = effective_frequencies(om, p_phi, B)
    wt2 = np.concatenate([[np.nan], wt_a2, [wt_02]])
    c = liouville_chain(theta, p_theta, wt2)
    sol = HJSolution(N=N, c=c, p_phi=p_phi, om=om, B=B,
                     kappas=np.zeros(max(N - 1, 0)), phi0=phi.copy())
    ch = sol.chain_constants()
    cfull, A, Bamp = ch["c"], ch["A"], ch["Bamp"]
    xi = np.sin(theta) ** 2
    sgn = np.sign(p_theta)
    sgn[sgn == 0] = 1.0
    # top-level phase fixes t0
    sin_psi = np.clip((xi[N - 1] - A[N]) / Bamp[N], -1, 1)
    psi0 = np.arctan2(sin_psi, sgn[N - 1] * np.sqrt(max(1 - sin_psi ** 2, 0.0)))
    t0 = -psi0 / (2 * np.sqrt(cfull[N]))
    kappas = np.zeros(max(N - 1, 0))
    # chain phases fix kappa_alpha
    sgn_up = sgn[N - 1]
    xi_up = xi[N - 1]
    for al in range(N - 1, 0, -1):
        C = cfull[al] / cfull[al + 1]
        Q = -xi_up ** 2 + 2 * A[al + 1] * xi_up - C
        X = np.arctan2(A[al + 1] * xi_up - C, sgn_up * np.sqrt(max(C * Q, 0.0)))
        sin_ph = np.clip((xi[al - 1] - A[al]) / Bamp[al], -1, 1)
        phase = np.arctan2(sin_ph, sgn[al - 1] * np.sqrt(max(1 - sin_ph ** 2, 0.0)))
        kappas[al - 1] = phase - X
        sgn_up = sgn[al - 1]
        xi_up = xi[al - 1]
    return HJSolution(N=N, c=c, p_phi=p_phi, om=om, B=B, t0=t0,
                      kappas=kappas, phi0=phi.copy())


def validate_against_numeric(sol: HJSolution, spec: SystemSpec, duration: float,
                             samples: int = 40, x0: Optional[PhasePoint] = None) -> float:
    """Max deviation of (xi, phi) between closed form and numerical integration."""
    if x0 is None:
        xi0, phi0, sgn0 = hj_evaluate(sol, 0.0, with_signs=True)
        theta0 = np.arcsin(np.sqrt(xi0))
        wt2 = sol.wt2()
        c = np.concatenate([[wt2[1]], sol.c])
        p_theta0 = np.empty(sol.N)
        for a in range(1, sol.N + 1):
            val = (c[a] - c[a - 1] / xi0[a - 1] - wt2[a + 1] / (1 - xi0[a - 1]))
            p_theta0[a - 1] = sgn0[a - 1] * 2 * np.sqrt(max(val, 0.0))
        x0 = phase_point_from_angles(spec, theta0, p_theta0, phi0, sol.p_phi)
    traj = integrate(spec, x0, duration, dt=min(spec.dt_default, duration / 20000),
                     stride=1)
    worst = 0.0
    idx = np.linspace(0, len(traj.times) - 1, samples).astype(int)
    for j in idx:
        t = traj.times[j]
        th, _, ph, _ = angles_from_phase_point(spec, PhasePoint.from_state(traj.states[j]))
        xi_num = np.sin(th) ** 2
        xi_cf, phi_cf = hj_evaluate(sol, t)
        dphi = np.angle(np.exp(1j * (ph - phi_cf)))
        worst = max(worst, float(np.max(np.abs(xi_num - xi_cf))),
                    float(np.max(np.abs(dphi))))
    return worst
