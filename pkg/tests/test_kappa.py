import numpy as np
import pytest
from hypothesis import given, strategies as st

from superint.errors import PoleOfTangent
from superint.kappa import C_kappa, S_kappa, T_kappa, kappa_functions


def test_flat_row():
    assert kappa_functions(0.0, 3.0) == (3.0, 1.0, 3.0)


def test_unit_sphere():
    s, c, t = kappa_functions(1.0, np.pi / 4)
    assert s == pytest.approx(np.sin(np.pi / 4), abs=1e-15)
    assert c == pytest.approx(np.cos(np.pi / 4), abs=1e-15)
    assert t == pytest.approx(1.0, abs=1e-15)


def test_pseudosphere_origin():
    assert kappa_functions(-1.0, 0.0) == (0.0, 1.0, 0.0)


def test_pole_of_tangent():
    with pytest.raises(PoleOfTangent):
        T_kappa(1.0, np.pi / 2)


@given(st.floats(-3.0, 3.0), st.floats(1e-9, 1e-7))
def test_continuity_at_kappa_zero(x, kap):
    for sgn in (+1.0, -1.0):
        assert S_kappa(sgn * kap, x) == pytest.approx(x, abs=1e-6)
        assert C_kappa(sgn * kap, x) == pytest.approx(1.0, abs=1e-6)


@given(st.floats(-2.0, 2.0), st.floats(0.1, 2.0))
def test_sphere_identity(x, kap):
    # kappa*S^2 + C^2 = 1 on both branches
    for k in (kap, -kap):
        val = k * S_kappa(k, x) ** 2 + C_kappa(k, x) ** 2
        assert val == pytest.approx(1.0, rel=1e-12)
