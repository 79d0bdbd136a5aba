import numpy as np
import pytest

from superint.kahler import (
    flat_space,
    fubini_study,
    su_killing_potentials,
    verify_killing_potential,
)

RNG = np.random.default_rng(41)


def random_chart_points(N, count=100, rng=RNG):
    r = rng.uniform(0.3, 3.0, (count, N))
    ph = rng.uniform(0, 2 * np.pi, (count, N))
    return r * np.exp(1j * ph)


def test_fs_metric_at_origin_and_unit_circle():
    geom = fubini_study(1)
    assert geom.metric(np.array([0.0 + 0j]))[0, 0] == pytest.approx(1.0)
    # |z|^2 = 1: g_{1 1bar} = 1/(1+1) - 1/(1+1)^2 = 1/4
    z = np.array([np.exp(0.3j)])
    assert geom.metric(z)[0, 0] == pytest.approx(0.25, abs=1e-14)


def test_fs_christoffel_vanishes_at_origin():
    geom = fubini_study(1)
    assert np.allclose(geom.christoffel(np.array([0.0 + 0j])), 0.0)


@pytest.mark.parametrize("N", [1, 2, 3])
def test_metric_inverse_identity(N):
    geom = fubini_study(N)
    for z in random_chart_points(N, 100):
        G = geom.metric(z)
        Ginv = geom.inverse(z)
        # sum_b g^{a bbar} g_{c bbar} = delta_ac
        assert np.max(np.abs(Ginv @ G.T - np.eye(N))) < 1e-12


@pytest.mark.parametrize("N", [1, 2, 3])
def test_metric_is_hessian_of_potential(N):
    geom = fubini_study(N)
    h = 1e-4
    for z in random_chart_points(N, 10):
        G = geom.metric(z)
        for a in range(N):
            for b in range(N):
                # d^2 K / dz^a dzbar^b via 4-point Wirtinger stencil
                ea = np.zeros(N, complex)
                eb = np.zeros(N, complex)
                ea[a] = h
                eb[b] = h

                def K(w):
                    return geom.potential(w)

                def dza(w):
                    dre = (K(w + ea) - K(w - ea)) / (2 * h)
                    dim = (K(w + 1j * ea) - K(w - 1j * ea)) / (2 * h)
                    return (dre - 1j * dim) / 2

                dre = (dza(z + eb) - dza(z - eb)) / (2 * h)
                dim = (dza(z + 1j * eb) - dza(z - 1j * eb)) / (2 * h)
                val = (dre + 1j * dim) / 2
                assert abs(val - G[a, b]) < 1e-6


@pytest.mark.parametrize("N", [1, 2, 3])
def test_fs_curvature_identity(N):
    geom = fubini_study(N)
    for z in random_chart_points(N, 100):
        G = geom.metric(z)
        R = geom.curvature(z)
        expected = np.einsum("ab,cd->abcd", G, G) + np.einsum("cb,ad->abcd", G, G)
        assert np.max(np.abs(R - expected)) < 1e-13


@pytest.mark.parametrize("N", [1, 2, 3])
def test_fs_christoffel_matches_metric_derivative(N):
    # Gamma^a_{bc} = g^{a dbar} d g_{b dbar} / dz^c
    geom = fubini_study(N)
    h = 1e-6
    for z in random_chart_points(N, 5):
        Gam = geom.christoffel(z)
        Ginv = geom.inverse(z)
        for c in range(N):
            e = np.zeros(N, complex)
            e[c] = h
            dre = (geom.metric(z + e) - geom.metric(z - e)) / (2 * h)
            dim = (geom.metric(z + 1j * e) - geom.metric(z - 1j * e)) / (2 * h)
            dG = (dre - 1j * dim) / 2  # d g_{b dbar} / dz^c
            for a in range(N):
                for b in range(N):
                    val = np.sum(Ginv[a, :] * dG[b, :])
                    assert abs(val - Gam[a, b, c]) < 1e-7


def test_flat_killing_potential():
    geom = flat_space(1)
    res = verify_killing_potential(lambda z: (z[0] * np.conj(z[0])).real, geom,
                                   np.array([0.6 + 0.4j]))
    assert res < 1e-7


@pytest.mark.parametrize("N", [1, 2])
def test_fs_killing_catalog(N):
    geom = fubini_study(N)
    pots = su_killing_potentials(geom)
    for z in random_chart_points(N, 5):
        for name, h in pots.items():
            assert verify_killing_potential(h, geom, z) < 1e-8, name


def test_non_killing_rejected():
    geom = fubini_study(1)
    z = np.array([0.7 + 0.5j])
    res = verify_killing_potential(lambda w: (w[0] ** 2).real, geom, z)
    assert res > 0.1
