import math

import numpy as np
import pytest
import scipy.integrate as si
import scipy.special as sp

from qfpc import quadrature as q
from qfpc.kernels import Kinematics
from qfpc.quadrature import (
    NonConvergenceError,
    QuadratureConfig,
    QuadratureError,
    gauss_legendre,
    gl_nodes,
    integrate_u,
    integrate_x,
    integrate_xu,
    u_order,
)


def test_gauss_legendre_examples():
    assert abs(gauss_legendre(8, lambda t: t**3, 0, 1) - 0.25) < 1e-15
    assert gauss_legendre(8, lambda t: np.ones_like(t), 2, 5) == pytest.approx(3, abs=1e-14)
    assert abs(gauss_legendre(32, np.sin, 0, math.pi) - 2) < 1e-14


def test_gauss_legendre_reports_bad_node():
    with pytest.raises(QuadratureError, match="node"):
        gauss_legendre(8, lambda t: np.where(t > 0.5, np.nan, t), 0, 1)
    with pytest.raises(ValueError):
        gauss_legendre(8, np.sin, 1, 0)


@pytest.mark.parametrize("order", [16, 64, 128, 129, 256, 1024, 4096])
def test_nodes_against_scipy(order):
    t, w = gl_nodes(order)
    ref_t, ref_w = sp.roots_legendre(order)
    assert np.all((t > 0) & (t < 1))
    assert abs(w.sum() - 1) < 1e-13
    assert np.max(np.abs(t - 0.5 * (ref_t + 1))) < 1e-13
    assert np.max(np.abs(w - 0.5 * ref_w)) < 1e-13


def test_newton_nodes_integrate_high_degree_polynomial():
    t, w = gl_nodes(300)
    # exact for degree 599; check a degree-500 monomial on [0, 1]
    assert (t**500) @ w == pytest.approx(1 / 501, rel=1e-12)


def test_integrate_u_examples():
    cfg = QuadratureConfig()
    assert integrate_u(lambda u: u * (1 - u * u), cfg) == pytest.approx(0.25, abs=1e-15)
    assert integrate_u(lambda u: np.zeros_like(u), cfg) == 0.0

    def f(u):
        r = np.sqrt(1 - u * u)
        return u * r * sp.j1(r)

    ref, _ = si.quad(f, 0, 1, epsabs=0, epsrel=1e-12, limit=200)
    assert integrate_u(f, cfg) == pytest.approx(ref, rel=1e-10)


def test_u_order_grows_with_x():
    orders = u_order(np.array([0.0, 10.0, 100.0, 1000.0]), 64)
    assert orders[0] == 64 and orders[1] == 64
    assert orders[2] == 256 and orders[3] == 2048
    # the need does not depend on the base beyond the power-of-two ladder
    assert np.all(u_order(np.array([500.0]), 32) >= 532)


def test_integrate_xu_matches_scipy_at_large_x():
    xs = np.array([1.0, 50.0, 400.0])

    def f(x, u):
        r = np.sqrt((1 - u) * (1 + u))
        return u * r * sp.j1(x * r)

    got = integrate_xu(f, xs)
    for x, g in zip(xs, got):
        ref, _ = si.quad(lambda u: u * math.sqrt(1 - u * u) * sp.j1(x * math.sqrt(1 - u * u)), 0, 1, limit=2000, epsabs=1e-14)
        assert g == pytest.approx(ref, rel=1e-9, abs=1e-14)


def test_integrate_xu_components_and_cutoff():
    xs = np.array([2.0, 5.0])
    both = integrate_xu(lambda x, u: np.stack([x * u + 0 * u, u * u + 0 * x]), xs)
    assert both.shape == (2, 2)
    assert np.allclose(both[0], xs / 2, rtol=1e-14)
    assert np.allclose(both[1], 1 / 3, rtol=1e-14)
    part = integrate_xu(lambda x, u: u + 0 * x, xs, u_lo=np.array([0.5, 0.0]))
    assert np.allclose(part, [0.375, 0.5], rtol=1e-14)


def test_integrate_x_gamma_and_bose():
    res = integrate_x(lambda x: x**7 * np.exp(-x), rate=1.0)
    assert res.value == pytest.approx(5040, rel=1e-10)
    assert res.tail_bound <= 1e-16 * 5040 and res.panels > 0

    def planck(x):
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(x > 0, x**3 / np.expm1(x), 0.0)

    res = integrate_x(planck, rate=1.0, power=3)
    assert res.value == pytest.approx(math.pi**4 / 15, rel=1e-12)


def test_integrate_x_uses_kinematic_rate_and_vectors():
    kin = Kinematics(0.6)
    rate = kin.gamma * 0.4 * 2.0
    res = integrate_x(lambda x: np.stack([x**7 * np.exp(-rate * x), x**2 * np.exp(-rate * x)]), kin, 2.0)
    assert np.allclose(res.value, [5040 / rate**8, 2 / rate**3], rtol=1e-10)


def test_integrate_x_non_convergence_reports_point(monkeypatch):
    monkeypatch.setattr(q, "MAX_PANELS", 64)
    with pytest.raises(NonConvergenceError, match=r"v=0\.3, z=2"):
        integrate_x(lambda x: np.exp(x), Kinematics(0.3), 2.0)


def test_order_doubling_invariant():
    kin = Kinematics(0.5)
    z = 1.0
    rate = kin.gamma * 0.5 * z

    def f(x):
        return x**7 * np.exp(-rate * x) * np.cos(x) ** 2

    a = integrate_x(f, rate=rate).value
    b = integrate_x(f, rate=rate, cfg=QuadratureConfig(gl_order_panel=64)).value
    assert a == pytest.approx(b, rel=1e-12)


def test_config_validation():
    with pytest.raises(ValueError):
        QuadratureConfig(rel_tol=0)
