"""Phase points, observables, Poisson structures, numerical brackets.

Conventions: {p_i, x_j} = +delta_ij, time evolution df/dt = {H, f}.
States are flat real vectors xi = (q, p). Complex systems store the
complex chart pairwise: z^a = q[2a] + i q[2a+1], pi_a = p[2a] + i p[2a+1],
so one real bracket engine serves the canonical, magnetic and Kahler cases.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import NonFinite, SingularPoint

EPS_CBRT = float(np.cbrt(np.finfo(float).eps))
SINGULAR_DELTA = 1e-6


@dataclass(frozen=True)
class PhasePoint:
    """Real coordinates and conjugate momenta, optionally a CP^N chart index."""

    q: np.ndarray
    p: np.ndarray
    chart_id: int = 0

    def __post_init__(self):
        q = np.atleast_1d(np.asarray(self.q, dtype=float))
        p = np.atleast_1d(np.asarray(self.p, dtype=float))
        if q.shape != p.shape or q.ndim != 1:
            raise ValueError("q and p must be equal-length 1-d vectors")
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(p))):
            raise NonFinite("phase point has non-finite entries")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)

    @property
    def dim(self) -> int:
        return self.q.size

    @property
    def state(self) -> np.ndarray:
        return np.concatenate([self.q, self.p])

    @classmethod
    def from_state(cls, state: np.ndarray, chart_id: int = 0) -> "PhasePoint":
        state = np.asarray(state, dtype=float)
        n = state.size // 2
        return cls(state[:n], state[n:], chart_id)

    def complex_view(self) -> tuple[np.ndarray, np.ndarray]:
        """(z, pi) with z^a = q_{2a} + i q_{2a+1} and likewise for momenta."""
        if self.dim % 2:
            raise ValueError("complex view needs even dimension")
        z = self.q[0::2] + 1j * self.q[1::2]
        pi = self.p[0::2] + 1j * self.p[1::2]
        return z, pi

    @classmethod
    def from_complex(cls, z: np.ndarray, pi: np.ndarray, chart_id: int = 0) -> "PhasePoint":
        z = np.atleast_1d(np.asarray(z, complex))
        pi = np.atleast_1d(np.asarray(pi, complex))
        q = np.empty(2 * z.size)
        p = np.empty(2 * z.size)
        q[0::2], q[1::2] = z.real, z.imag
        p[0::2], p[1::2] = pi.real, pi.imag
        return cls(q, p, chart_id)


def complex_split(state: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(z, pi) views of a flat state of a complex-chart system."""
    n = state.size // 2
    q, p = state[:n], state[n:]
    return q[0::2] + 1j * q[1::2], p[0::2] + 1j * p[1::2]


def fd_steps(state: np.ndarray) -> np.ndarray:
    """Central-difference steps h_i = cbrt(eps) * max(1, |xi_i|)."""
    return EPS_CBRT * np.maximum(1.0, np.abs(state))


def numeric_grad(fn: Callable[[np.ndarray], complex], state: np.ndarray) -> np.ndarray:
    """Central-difference gradient of a scalar function of the flat state."""
    h = fd_steps(state)
    grad = np.empty(state.size, dtype=complex)
    for i in range(state.size):
        e = np.zeros_like(state)
        e[i] = h[i]
        grad[i] = (fn(state + e) - fn(state - e)) / (2 * h[i])
    return grad


@dataclass(frozen=True)
class Observable:
    """Scalar phase-space function with optional analytic gradient."""

    name: str
    fn: Callable[[np.ndarray], complex]
    grad: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __call__(self, x) -> complex:
        state = x.state if isinstance(x, PhasePoint) else np.asarray(x, dtype=float)
        val = self.fn(state)
        if not np.isfinite(complex(val).real) or not np.isfinite(complex(val).imag):
            raise NonFinite(f"observable {self.name} is not finite at {state}")
        return val

    def gradient(self, x) -> np.ndarray:
        state = x.state if isinstance(x, PhasePoint) else np.asarray(x, dtype=float)
        if self.grad is not None:
            return np.asarray(self.grad(state))
        return numeric_grad(self.fn, state)


def _canonical_tensor(n: int) -> np.ndarray:
    P = np.zeros((2 * n, 2 * n))
    P[:n, n:] = -np.eye(n)
    P[n:, :n] = np.eye(n)
    return P


@dataclass(frozen=True)
class BracketStructure:
    """Poisson structure descriptor for the real engine.

    kind: 'canonical' | 'magnetic_flat' | 'kaehler_twisted' | 'monopole'
    For the complex kinds, the only nonzero momentum twist is
    {pi_a, pibar_b} = i M_ab with M Hermitian: M = B*delta (magnetic_flat)
    or M = B*r0^2*g_{a bbar}(z) (kaehler_twisted).
    """

    kind: str
    n: int                       # number of q components (real dim of config space)
    B: float = 0.0
    metric: Optional[Callable[[np.ndarray], np.ndarray]] = None  # z -> Hermitian matrix
    s: float = 0.0               # monopole charge
    r0: float = 1.0
    singular_guard: Optional[Callable[[np.ndarray], float]] = None
    delta: float = SINGULAR_DELTA
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def dim(self) -> int:
        return 2 * self.n

    def check_regular(self, state: np.ndarray):
        if self.singular_guard is not None:
            d = self.singular_guard(np.asarray(state, dtype=float))
            if d < self.delta:
                raise SingularPoint(f"point within {d:.2e} of a singular locus")

    def poisson_tensor(self, state: np.ndarray) -> np.ndarray:
        n = self.n
        if self.kind == "canonical":
            if "P" not in self._cache:
                self._cache["P"] = _canonical_tensor(n)
            return self._cache["P"]

        if self.kind == "monopole":
            P = _canonical_tensor(n)
            q = state[:n]
            r3 = np.linalg.norm(q) ** 3
            # {p_k, p_l} = s eps_{klm} q_m / |q|^3
            P[n + 0, n + 1] = self.s * q[2] / r3
            P[n + 1, n + 2] = self.s * q[0] / r3
            P[n + 0, n + 2] = -self.s * q[1] / r3
            P[n + 1, n + 0] = -P[n + 0, n + 1]
            P[n + 2, n + 1] = -P[n + 1, n + 2]
            P[n + 2, n + 0] = -P[n + 0, n + 2]
            return P

        if self.kind in ("magnetic_flat", "kaehler_twisted"):
            N = n // 2
            P = np.zeros((2 * n, 2 * n))
            for a in range(N):
                # {u_a, x_a} = 1/2, {v_a, y_a} = -1/2
                P[n + 2 * a, 2 * a] = 0.5
                P[2 * a, n + 2 * a] = -0.5
                P[n + 2 * a + 1, 2 * a + 1] = -0.5
                P[2 * a + 1, n + 2 * a + 1] = 0.5
            if self.kind == "magnetic_flat":
                M = self.B * np.eye(N, dtype=complex)
            else:
                z = state[:n][0::2] + 1j * state[:n][1::2]
                M = self.B * self.r0 ** 2 * self.metric(z)
            A, S = M.real, M.imag  # M Hermitian: A symmetric, S antisymmetric
            for a in range(N):
                for b in range(N):
                    # {u_a,u_b} = {v_a,v_b} = -S_ab/2, {u_a,v_b} = -A_ab/2
                    P[n + 2 * a, n + 2 * b] += -S[a, b] / 2
                    P[n + 2 * a + 1, n + 2 * b + 1] += -S[a, b] / 2
                    P[n + 2 * a, n + 2 * b + 1] += -A[a, b] / 2
                    P[n + 2 * b + 1, n + 2 * a] += A[a, b] / 2
            return P

        raise ValueError(f"unknown bracket kind {self.kind!r}")


def canonical(n: int, singular_guard=None) -> BracketStructure:
    return BracketStructure("canonical", n, singular_guard=singular_guard)


def magnetic_flat(N: int, B: float, singular_guard=None) -> BracketStructure:
    return BracketStructure("magnetic_flat", 2 * N, B=B, singular_guard=singular_guard)


def kaehler_twisted(N: int, B: float, metric, r0: float = 1.0, singular_guard=None) -> BracketStructure:
    return BracketStructure("kaehler_twisted", 2 * N, B=B, metric=metric, r0=r0,
                            singular_guard=singular_guard)


def monopole(s: float, singular_guard=None) -> BracketStructure:
    return BracketStructure("monopole", 3, s=s, singular_guard=singular_guard)


def poisson_bracket(f: Observable, g: Observable, structure: BracketStructure, x) -> complex:
    """{f, g}(x) = grad(f) . P . grad(g) under the structure's tensor."""
    state = x.state if isinstance(x, PhasePoint) else np.asarray(x, dtype=float)
    structure.check_regular(state)
    gf = f.gradient(state)
    gg = g.gradient(state)
    P = structure.poisson_tensor(state)
    val = gf @ P @ gg
    if not np.isfinite(val.real) or not np.isfinite(complex(val).imag):
        raise NonFinite("bracket evaluation produced NaN/Inf")
    return complex(val)


def hamiltonian_flow_field(H: Observable, structure: BracketStructure, x) -> np.ndarray:
    """d(xi)/dt under df/dt = {H, f}; equals P^T grad(H)."""
    state = x.state if isinstance(x, PhasePoint) else np.asarray(x, dtype=float)
    structure.check_regular(state)
    gH = np.real(H.gradient(state))
    return structure.poisson_tensor(state).T @ gH
