import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from superint.errors import NonFinite, SingularPoint
from superint.kahler import fubini_study
from superint.phase import (
    Observable,
    PhasePoint,
    canonical,
    complex_split,
    hamiltonian_flow_field,
    kaehler_twisted,
    magnetic_flat,
    monopole,
    numeric_grad,
    poisson_bracket,
)

RNG = np.random.default_rng(20240915)


def obs(name, fn):
    return Observable(name, fn)


def test_phase_point_invariants():
    with pytest.raises(ValueError):
        PhasePoint(np.zeros(2), np.zeros(3))
    with pytest.raises(NonFinite):
        PhasePoint(np.array([np.nan]), np.array([0.0]))
    x = PhasePoint.from_complex([1 + 2j, 3 - 1j], [0.5j, 1.0])
    z, pi = x.complex_view()
    assert np.allclose(z, [1 + 2j, 3 - 1j]) and np.allclose(pi, [0.5j, 1.0])


def test_canonical_p_x_bracket():
    s = canonical(1)
    f = obs("p", lambda st: st[1])
    g = obs("x", lambda st: st[0])
    x = PhasePoint([0.7], [0.3])
    assert poisson_bracket(f, g, s, x) == pytest.approx(1.0, abs=1e-9)


def test_bracket_of_h_with_itself_vanishes():
    s = canonical(2)
    H = obs("H", lambda st: 0.5 * (st[2] ** 2 + st[3] ** 2 + st[0] ** 2 + st[1] ** 2))
    x = PhasePoint([1.0, -0.4], [0.2, 0.9])
    assert abs(poisson_bracket(H, H, s, x)) < 1e-12


def test_magnetic_pi_pibar_bracket():
    # {pi_1, pibar_1} = i B with B=2 on C^1
    s = magnetic_flat(1, B=2.0)
    f = obs("pi1", lambda st: complex_split(st)[1][0])
    g = obs("pibar1", lambda st: np.conj(complex_split(st)[1][0]))
    x = PhasePoint.from_complex([0.8 + 0.1j], [0.3 - 0.7j])
    assert poisson_bracket(f, g, s, x) == pytest.approx(2j, abs=1e-9)
    # {pi_a, z^b} = delta_ab, {pi_a, zbar^b} = 0
    gz = obs("z1", lambda st: complex_split(st)[0][0])
    gzb = obs("zb1", lambda st: np.conj(complex_split(st)[0][0]))
    assert poisson_bracket(f, gz, s, x) == pytest.approx(1.0, abs=1e-9)
    assert abs(poisson_bracket(f, gzb, s, x)) < 1e-9


def test_kaehler_twisted_pi_pibar_bracket():
    geom = fubini_study(1)
    s = kaehler_twisted(1, B=1.5, metric=geom.metric)
    z0 = np.array([0.4 + 0.2j])
    x = PhasePoint.from_complex(z0, [0.3 - 0.7j])
    f = obs("pi1", lambda st: complex_split(st)[1][0])
    g = obs("pibar1", lambda st: np.conj(complex_split(st)[1][0]))
    expected = 1.5j * geom.metric(z0)[0, 0]
    assert poisson_bracket(f, g, s, x) == pytest.approx(expected, abs=1e-9)


def test_monopole_momentum_twist():
    s = monopole(s=0.7)
    x = PhasePoint([0.5, -0.4, 0.8], [0.1, 0.2, -0.3])
    p1 = obs("p1", lambda st: st[3])
    p2 = obs("p2", lambda st: st[4])
    q = x.q
    expected = 0.7 * q[2] / np.linalg.norm(q) ** 3
    assert poisson_bracket(p1, p2, s, x) == pytest.approx(expected, abs=1e-10)


def _random_cubic(rng, dim):
    c1 = rng.normal(size=dim)
    c2 = rng.normal(size=(dim, dim)) / dim
    c3 = rng.normal(size=dim) / dim

    def fn(st):
        return c1 @ st + st @ c2 @ st + np.sum(c3 * st ** 3)

    return Observable("cubic", fn)


def _structures(dim):
    geom = fubini_study(dim // 4) if dim % 4 == 0 else None
    out = [canonical(dim // 2)]
    if dim % 4 == 0:
        out.append(magnetic_flat(dim // 4, B=1.3))
        out.append(kaehler_twisted(dim // 4, B=1.3, metric=geom.metric))
    if dim == 6:
        out.append(monopole(s=0.4))
    return out


@pytest.mark.parametrize("dim", [4, 6, 8])
def test_antisymmetry_and_bilinearity(dim):
    rng = np.random.default_rng(7)
    for s in _structures(dim):
        for _ in range(20):
            st_vec = rng.uniform(0.3, 1.2, dim) * rng.choice([-1, 1], dim)
            f, g, h = (_random_cubic(rng, dim) for _ in range(3))
            bfg = poisson_bracket(f, g, s, st_vec)
            bgf = poisson_bracket(g, f, s, st_vec)
            scale = 1 + abs(bfg)
            assert abs(bfg + bgf) / scale < 1e-9
            lin = Observable("lin", lambda x_, f=f, g=g: 2.0 * f.fn(x_) + 0.5 * g.fn(x_))
            blin = poisson_bracket(lin, h, s, st_vec)
            parts = 2.0 * poisson_bracket(f, h, s, st_vec) + 0.5 * poisson_bracket(g, h, s, st_vec)
            assert abs(blin - parts) / (1 + abs(blin)) < 1e-8


@pytest.mark.parametrize("dim", [4, 8])
def test_jacobi_identity(dim):
    rng = np.random.default_rng(11)
    for s in _structures(dim):
        for _ in range(5):
            st_vec = rng.uniform(0.4, 1.1, dim) * rng.choice([-1, 1], dim)
            f, g, h = (_random_cubic(rng, dim) for _ in range(3))

            def nested(a, b):
                return Observable("br", lambda x_, a=a, b=b: poisson_bracket(a, b, s, x_))

            total = (poisson_bracket(f, nested(g, h), s, st_vec)
                     + poisson_bracket(g, nested(h, f), s, st_vec)
                     + poisson_bracket(h, nested(f, g), s, st_vec))
            assert abs(total) < 1e-6


def test_flow_field_free_particle():
    s = canonical(1)
    H = obs("H", lambda st: st[1] ** 2 / 2)
    assert np.allclose(hamiltonian_flow_field(H, s, PhasePoint([0.0], [1.0])), [1.0, 0.0])


def test_flow_field_oscillator():
    s = canonical(1)
    H = obs("H", lambda st: st[1] ** 2 / 2 + st[0] ** 2 / 2)
    assert np.allclose(hamiltonian_flow_field(H, s, PhasePoint([1.0], [0.0])), [0.0, -1.0],
                       atol=1e-10)


def test_analytic_gradient_matches_central_difference():
    # halving h reduces the central-difference error ~4x against the analytic gradient
    fn = lambda st: np.sin(st[0]) * st[1] ** 3 + st[0] ** 2
    grad = lambda st: np.array([np.cos(st[0]) * st[1] ** 3 + 2 * st[0],
                                3 * np.sin(st[0]) * st[1] ** 2])
    state = np.array([0.7, 1.3])
    exact = grad(state)

    def fd_err(h):
        g = np.empty(2)
        for i in range(2):
            e = np.zeros(2)
            e[i] = h
            g[i] = (fn(state + e) - fn(state - e)) / (2 * h)
        return np.max(np.abs(g - exact))

    e1, e2 = fd_err(1e-3), fd_err(5e-4)
    assert e1 / e2 == pytest.approx(4.0, rel=0.15)
    assert np.allclose(numeric_grad(fn, state), exact, atol=1e-8)


def test_singular_guard():
    s = canonical(1, singular_guard=lambda st: abs(st[0]))
    f = obs("p", lambda st: st[1])
    g = obs("x", lambda st: st[0])
    with pytest.raises(SingularPoint):
        poisson_bracket(f, g, s, PhasePoint([1e-9], [1.0]))
