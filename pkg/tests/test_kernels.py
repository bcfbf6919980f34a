import math

import numpy as np
import pytest
import scipy.special as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from qfpc.kernels import (
    CHANNELS,
    HBAR_C_OVER_KB,
    Channel,
    Kinematics,
    ThermalGeometry,
    angular_bracket,
    angular_brackets,
    bose,
    bose_difference,
    integrand_F,
    integrand_unfolded,
    prefactor,
)


def ref_prefactor(ch, x):
    s, c = np.sin(x), np.cos(x)
    if ch in (Channel.XX, Channel.YY):
        return 4 / 3 - 2 / x**3 * (x * c + (x * x - 1) * s)
    if ch is Channel.ZZ:
        return 4 / 3 - 4 / x**3 * (x * c - s)
    return -2 * (2 / x**4 * (-3 * x * c - (x * x - 3) * s))




def test_kinematics_and_geometry():
    for v in (0.0, 0.3, 0.99):
        k = Kinematics(v)
        assert k.gamma >= 1
        assert abs(k.gamma**2 * (1 - v * v) - 1) < 1e-14
    g = ThermalGeometry(10e-9, 16100.0)
    assert abs(g.z * 2 * g.a * g.T / HBAR_C_OVER_KB - 1) < 1e-12
    assert g.beta_natural == pytest.approx(2 * g.a * g.z)
    with pytest.raises(ValueError):
        Kinematics(1.0)
    with pytest.raises(ValueError):
        ThermalGeometry(0.0, 1.0)


@pytest.mark.parametrize("ch", CHANNELS)
def test_prefactor_matches_direct_form_away_from_origin(ch):
    x = np.linspace(1.0, 200.0, 2000)
    assert np.allclose(prefactor(ch, x), ref_prefactor(ch, x), rtol=1e-12, atol=1e-14)


@pytest.mark.parametrize("ch", CHANNELS)
def test_prefactor_series_branch_is_continuous(ch):
    lo = prefactor(ch, np.nextafter(1.0, 0.0))
    hi = prefactor(ch, 1.0)
    assert abs(lo - hi) < 1e-14


def test_prefactor_examples():
    assert abs(prefactor(Channel.XX, 1e6) - 4 / 3) < 1e-5
    assert abs(prefactor(Channel.XX, 1e-3)) < 1e-5
    assert abs(prefactor(Channel.ZZ, 1e-6) - 8 / 3) < 1e-12
    # XX: 4/3 - 2 (2/3 - 2 x^2 / 15 + ...) = 4 x^2 / 15 + O(x^4)
    assert prefactor(Channel.XX, 1e-3) == pytest.approx(4e-6 / 15, rel=1e-5)
    assert prefactor(Channel.XZ, 1e-4) == pytest.approx(-4e-4 / 15, rel=1e-6)
    with pytest.raises(ValueError):
        prefactor(Channel.XX, 0.0)


@pytest.mark.parametrize("ch", CHANNELS)
def test_brackets_against_plain_forms(ch):
    x = np.array([[0.5], [3.0], [40.0], [700.0]])
    u = np.linspace(0.0, 1.0, 101)[None, :]
    got = angular_bracket(ch, x, u)
    r = np.sqrt(1 - u * u)
    j0, j1 = sp.j0(x * r), sp.j1(x * r)
    if ch is Channel.XX:
        ref = (1 - u * u) * (1 - j0)
    elif ch is Channel.YY:
        ref = 0.5 * (1 + u * u) - j0 + r / x * j1
    elif ch is Channel.ZZ:
        ref = 1 + u * u + u * u * (j0 - 1) + (1 - u * u) * (j1 / np.where(x * r == 0, 1, x * r) - 0.5)
        ref = np.where(r == 0, 2.0, ref)
    else:
        ref = r * j1
    assert np.allclose(got, ref, rtol=1e-11, atol=1e-13)


def test_bracket_examples_and_evenness():
    assert angular_bracket(Channel.XX, 3.0, 1.0) == 0.0
    assert angular_bracket(Channel.XX, 3.0, -1.0) == 0.0
    assert abs(angular_bracket(Channel.YY, 1e-9, 0.0)) < 1e-17
    assert angular_bracket(Channel.XZ, 2.0, 0.0) == pytest.approx(0.5767248078, abs=1e-10)
    u = np.linspace(0, 1, 37)
    for ch in CHANNELS:
        assert np.array_equal(angular_bracket(ch, 4.2, u), angular_bracket(ch, 4.2, -u))
    many = angular_brackets(CHANNELS, 4.2, u)
    for ch, b in zip(CHANNELS, many):
        assert np.array_equal(b, angular_bracket(ch, 4.2, u))


def test_bose_difference_examples():
    assert bose_difference(1.0, 0.5, Kinematics(0.0), 1.0) == 0.0
    k = Kinematics(0.5)
    g = k.gamma
    # direct two-term difference is well conditioned at this point
    ref = 1 / math.expm1(g / 2) - 1 / math.expm1(3 * g / 2)
    assert bose_difference(1.0, 1.0, k, 1.0) == pytest.approx(ref, rel=1e-14)
    big = bose_difference(200.0, 0.5, k, 1.0)
    assert big == pytest.approx(math.exp(-200 * g * 0.75), rel=1e-12)
    assert bose_difference(1e5, 0.5, k, 1.0) == 0.0


@given(
    x=st.floats(1e-3, 300),
    u=st.floats(1e-6, 1.0),
    v=st.floats(1e-6, 0.99),
    z=st.floats(0.01, 50),
)
@settings(max_examples=300, deadline=None)
def test_bose_difference_positive_and_stable(x, u, v, z):
    k = Kinematics(v)
    d = bose_difference(x, u, k, z)
    assert d >= 0
    lo = x * k.gamma * (1 - u * v) * z
    hi = x * k.gamma * (1 + u * v) * z
    if lo < 600:
        ref = float(bose(lo) - bose(hi))
        # the direct difference loses digits to cancellation; allow for that
        assert abs(d - ref) <= 1e-12 * bose(lo) + 1e-300


@pytest.mark.parametrize("ch", CHANNELS)
def test_fold_against_unfolded_integrand(ch):
    rng = np.random.default_rng(3)
    for _ in range(100):
        x = rng.uniform(0.01, 30)
        u = rng.uniform(0.01, 1)
        k = Kinematics(rng.uniform(0.01, 0.95))
        z = rng.uniform(0.05, 5)
        folded = integrand_F(ch, x, u, k, z)
        two_sided = integrand_unfolded(ch, x, u, k, z) + integrand_unfolded(ch, x, -u, k, z)
        assert abs(folded - two_sided) <= 1e-12 * abs(folded) + 1e-12 * abs(integrand_unfolded(ch, x, u, k, z))


def test_integrand_examples():
    k = Kinematics(0.5)
    for ch in CHANNELS:
        assert integrand_F(ch, 2.0, 0.5, Kinematics(0.0), 1.0) == 0.0
        assert integrand_F(ch, 2.0, 0.0, k, 1.0) == 0.0
    val = integrand_F(Channel.XZ, 1.0, 0.5, k, 1.0)
    two = integrand_unfolded(Channel.XZ, 1.0, 0.5, k, 1.0) + integrand_unfolded(Channel.XZ, 1.0, -0.5, k, 1.0)
    assert val > 0
    assert val == pytest.approx(two, rel=1e-12)


# leading small-x power of x^7 F: prefactor order + bracket order + 7 - 1
# (the Bose difference grows like 1/x)
SMALL_X_ORDER = {Channel.XX: 10, Channel.YY: 10, Channel.ZZ: 6, Channel.XZ: 8}


@pytest.mark.parametrize("ch", CHANNELS)
def test_small_x_regularity(ch):
    k = Kinematics(0.4)
    xs = np.array([1e-3, 1e-4])
    vals = np.abs(xs**7 * integrand_F(ch, xs, 0.6, k, 1.0))
    slope = math.log10(vals[0] / vals[1])
    assert slope == pytest.approx(SMALL_X_ORDER[ch], abs=0.01)
