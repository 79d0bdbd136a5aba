"""Time integration (implicit midpoint / embedded RK5(4)) and orbit diagnostics."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numba import njit
from scipy.integrate import solve_ivp

from .errors import InsufficientSpan, NoConvergence, SingularityHit
from .phase import PhasePoint
from .systems import SystemSpec


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray          # (nt, 2n)
    method: str
    energy_drift: float
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")

    def point(self, i: int) -> PhasePoint:
        return PhasePoint.from_state(self.states[i])


@njit(cache=True)
def _midpoint_loop(flow, par, x0, dt, nsteps, stride, tol, maxit):
    dim = x0.size
    nout = nsteps // stride + 1
    out = np.empty((nout, dim))
    tout = np.empty(nout)
    out[0] = x0
    tout[0] = 0.0
    x = x0.copy()
    t = 0.0
    k = 1
    status = 0
    for step in range(1, nsteps + 1):
        dt_cur = dt
        halvings = 0
        remaining = 1.0  # fraction of dt still to cover this step
        while remaining > 1e-14:
            xm = x + 0.5 * dt_cur * flow(x, par)
            ok = False
            for _ in range(maxit):
                xm_new = x + 0.5 * dt_cur * flow(xm, par)
                err = 0.0
                for i in range(dim):
                    d = abs(xm_new[i] - xm[i])
                    if d > err:
                        err = d
                    xm[i] = xm_new[i]
                if err < tol:
                    ok = True
                    break
            if not ok:
                halvings += 1
                if halvings > 12:
                    status = 1
                    return out[:k], tout[:k], x, status
                dt_cur *= 0.5
                continue
            x = 2.0 * xm - x
            t += dt_cur
            remaining -= dt_cur / dt
            for i in range(dim):
                if not np.isfinite(x[i]):
                    status = 2
                    return out[:k], tout[:k], x, status
        if step % stride == 0:
            out[k] = x
            tout[k] = t
            k += 1
    return out[:k], tout[:k], x, status


def integrate(spec: SystemSpec, x0, t_end: float, method: str = "implicit_midpoint",
              dt: Optional[float] = None, stride: Optional[int] = None,
              fp_tol: float = 1e-13, max_iter: int = 50,
              rtol: float = 1e-10, atol: float = 1e-12) -> Trajectory:
    """Integrate the Hamiltonian flow of spec from x0 for time t_end."""
    state0 = x0.state if isinstance(x0, PhasePoint) else np.asarray(x0, float)
    if t_end <= 0:
        raise ValueError("t_end must be positive")
    spec.bracket.check_regular(state0)
    H = spec.hamiltonian

    if method == "implicit_midpoint":
        dt = spec.dt_default if dt is None else dt
        nsteps = int(np.ceil(t_end / dt))
        if stride is None:
            stride = max(1, nsteps // 4000)
        if spec.flow is not None:
            fn, par = spec.flow
            states, times, xlast, status = _midpoint_loop(
                fn, par, state0, dt, nsteps, stride, fp_tol, max_iter)
        else:
            states, times, xlast, status = _python_midpoint(
                spec, state0, dt, nsteps, stride, fp_tol, max_iter)
        if status == 1:
            guard = spec.bracket.singular_guard
            if guard is not None and guard(xlast) < 100 * spec.bracket.delta:
                raise SingularityHit("step floor reached near a singular locus")
            raise NoConvergence("implicit midpoint fixed point stalled")
        if status == 2:
            raise SingularityHit("trajectory left the regular domain (non-finite state)")
    elif method == "embedded_rk":
        fun = lambda t, y: spec.flow_field(y)
        sol = solve_ivp(fun, (0.0, t_end), state0, method="RK45",
                        rtol=rtol, atol=atol, dense_output=False,
                        t_eval=np.linspace(0.0, t_end, 4001))
        if not sol.success:
            raise SingularityHit(sol.message)
        times, states = sol.t, sol.y.T
    else:
        raise ValueError(f"unknown method {method!r}")

    guard = spec.bracket.singular_guard
    if guard is not None:
        for srow in states[:: max(1, len(states) // 200)]:
            if guard(srow) < spec.bracket.delta:
                raise SingularityHit("stored state crossed a singular locus")

    E = np.array([complex(H(srow)).real for srow in states])
    drift = float(np.max(np.abs(E - E[0])) / (1 + abs(E[0])))
    return Trajectory(times, states, method, drift, meta={"dt": dt})


def _python_midpoint(spec, x0, dt, nsteps, stride, tol, maxit):
    # generic fallback for specs without a compiled flow
    x = x0.copy()
    out = [x0.copy()]
    tout = [0.0]
    t = 0.0
    for step in range(1, nsteps + 1):
        xm = x + 0.5 * dt * spec.flow_field(x)
        ok = False
        for _ in range(maxit):
            xm_new = x + 0.5 * dt * spec.flow_field(xm)
            err = np.max(np.abs(xm_new - xm))
            xm = xm_new
            if err < tol:
                ok = True
                break
        if not ok:
            return np.array(out), np.array(tout), x, 1
        x = 2 * xm - x
        t += dt
        if not np.all(np.isfinite(x)):
            return np.array(out), np.array(tout), x, 2
        if step % stride == 0:
            out.append(x.copy())
            tout.append(t)
    return np.array(out), np.array(tout), x, 0


def drift_report(traj: Trajectory, spec: SystemSpec) -> dict:
    """Max relative drift |I(t)-I(0)|/(1+|I(0)|) for every catalogued integral."""
    if len(traj.states) == 0:
        raise ValueError("empty trajectory")
    report = {}
    for name, obs in spec.integrals.items():
        vals = np.array([complex(obs(srow)) for srow in traj.states])
        report[name] = float(np.max(np.abs(vals - vals[0])) / (1 + abs(vals[0])))
    report["H"] = traj.energy_drift
    return report


@dataclass(frozen=True)
class ClosureResult:
    closed: bool
    period: Optional[float] = None
    miss: float = float("nan")   # best sustained normalized return distance


def _hermite_miss(spec, s, t, j, ref, scale):
    """Min over t near t[j] of |s(t) - ref|/scale via cubic Hermite interpolation."""
    from scipy.optimize import minimize_scalar

    best_val, best_t = np.inf, t[j]
    for j0 in (max(j - 1, 0), j):
        j1 = j0 + 1
        if j1 >= len(t):
            continue
        h = t[j1] - t[j0]
        p0, p1 = s[j0], s[j1]
        m0 = spec.flow_field(p0) * h
        m1 = spec.flow_field(p1) * h

        def dist(u):
            u2, u3 = u * u, u * u * u
            sh = ((2 * u3 - 3 * u2 + 1) * p0 + (u3 - 2 * u2 + u) * m0
                  + (-2 * u3 + 3 * u2) * p1 + (u3 - u2) * m1)
            return float(np.linalg.norm(sh - ref))

        res = minimize_scalar(dist, bounds=(0.0, 1.0), method="bounded",
                              options={"xatol": 1e-12})
        if res.fun < best_val:
            best_val, best_t = res.fun, t[j0] + res.x * h
    return best_val / scale, best_t


def detect_closure(traj: Trajectory, tol: float = 1e-5, window: int = 5,
                   spec: Optional[SystemSpec] = None) -> ClosureResult:
    """Poincare-return test on the full state with a sustained-return window.

    A candidate period is a local minimum of the return distance whose
    Hermite-refined miss stays below tol over `window` consecutive returns.
    """
    s = traj.states
    t = traj.times
    if len(s) < 16:
        raise InsufficientSpan("too few samples for closure detection")
    spec = spec if spec is not None else traj.meta.get("spec")
    if spec is None:
        raise ValueError("detect_closure needs the SystemSpec (pass spec=...)")
    scale = float(np.max(np.linalg.norm(s - s.mean(axis=0), axis=1)))
    if scale == 0:
        return ClosureResult(True, 0.0, 0.0)
    d = np.linalg.norm(s - s[0], axis=1) / scale
    vmax = np.max(np.linalg.norm(np.diff(s, axis=0), axis=1)) / np.min(np.diff(t)) / scale
    coarse = tol + 0.75 * vmax * np.max(np.diff(t))

    best_miss = np.inf
    for j in range(2, len(d) - 1):
        if not (d[j] <= d[j - 1] and d[j] <= d[j + 1] and d[j] < coarse):
            continue
        miss, T = _hermite_miss(spec, s, t, j, s[0], scale)
        best_miss = min(best_miss, miss)
        if miss >= tol or T <= 0:
            continue
        if t[-1] < 2 * T:
            raise InsufficientSpan("span shorter than twice the candidate period")
        worst = miss
        hits = 1
        for k in range(2, window + 1):
            target = k * T
            if target > t[-1]:
                break
            jk = int(np.argmin(np.abs(t - target)))
            val, _ = _hermite_miss(spec, s, t, jk, s[0], scale)
            worst = max(worst, val)
            hits += 1
        if worst < tol and hits >= min(window, max(2, int(t[-1] / T))):
            return ClosureResult(True, float(T), worst)
    if not np.isfinite(best_miss):
        best_miss = float(np.min(d[len(d) // 10:]))
    return ClosureResult(False, None, float(best_miss))
