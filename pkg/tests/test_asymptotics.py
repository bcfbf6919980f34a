import math
import warnings

import numpy as np
import pytest
import scipy.integrate as si
import sympy

from qfpc.asymptotics import (
    SeriesDivergenceWarning,
    I_closed_form,
    I_integral,
    bose_derivative,
    eulerian_numbers,
    f_large_z,
    f_small_z,
    f_xz_nr,
    f_xz_series,
    gamma_power_series,
)
from qfpc.kernels import CHANNELS, Channel


def test_small_z_examples():
    ref = 16 * math.pi**4 * 0.5 / (15 * (16 / 9) * 1e-4)
    assert f_small_z(Channel.XZ, 0.5, 0.1) == pytest.approx(ref, rel=1e-14)
    # the quoted 2.9216e5 is a rounded hand evaluation; the formula gives 2.92227e5
    assert ref == pytest.approx(2.9216e5, rel=5e-4)


def test_large_z_examples():
    g2 = 4 / 3
    v = 0.5
    ref = 2 * math.factorial(9) * (math.pi**10 / 93555) / (15 * 10**10) * 8 / 63 * g2**3 * v * (21 + 30 * v**2 + 5 * v**4)
    assert f_large_z(Channel.XZ, v, 10.0) == pytest.approx(ref, rel=1e-14)
    assert ref == pytest.approx(2.100e-5, rel=1e-3)


def test_limits_signs_and_linearity():
    for fn in (f_small_z, f_large_z):
        for ch in CHANNELS:
            val = fn(ch, 0.3, 2.0)
            assert (val > 0) == (ch is Channel.XZ)
            # linear in v as v -> 0
            assert fn(ch, 2e-6, 2.0) / fn(ch, 1e-6, 2.0) == pytest.approx(2, rel=1e-9)
    for v in (0.01, 0.5, 0.99):
        assert abs(f_large_z(Channel.YY, v, 5.0)) > abs(f_large_z(Channel.XX, v, 5.0))
        # the image doubles the ZZ coupling: the two limits differ by 4
        assert f_large_z(Channel.ZZ, v, 3.0) / f_small_z(Channel.ZZ, v, 3.0) == pytest.approx(4, rel=1e-14)
    with pytest.raises(ValueError):
        f_small_z(Channel.ISO, 0.5, 1.0)


def test_I_limits():
    assert I_closed_form(1e-3) * 1e-12 == pytest.approx(8 * math.pi**4 / 15, rel=1e-3)
    assert 8 * math.pi**4 / 15 == pytest.approx(51.9515, rel=1e-5)
    big = 1e4
    assert I_closed_form(big) * big**10 == pytest.approx(1024 * math.pi**10 / 1485, rel=1e-6)
    # the quoted 64568 is a rounded hand evaluation; the constant is 64576.16
    assert 1024 * math.pi**10 / 1485 == pytest.approx(64568, rel=5e-4)


@pytest.mark.parametrize("z", [0.2, 1.0, 3.0, 10.0, 30.0])
def test_I_closed_form_against_scipy(z):
    def f(x):
        b = 3 * x * math.cos(x) + (x * x - 3) * math.sin(x)
        e = math.exp(-x * z)
        return z * b * b * 4 * e / (1 - e) ** 2

    ref, _ = si.quad(f, 0, 80 / z + 80, limit=2000, epsabs=0, epsrel=1e-12)
    assert I_closed_form(z) == pytest.approx(ref, rel=1e-8)


def test_I_closed_form_and_integral_agree():
    for z in (0.5, 1.0, 5.0):
        assert I_closed_form(z) == pytest.approx(I_integral(z), rel=1e-9)


def test_I_branches_meet_at_switch():
    lo = I_closed_form(50.0)
    hi = I_closed_form(np.nextafter(50.0, 100.0))
    assert hi == pytest.approx(lo, rel=1e-9)


def test_nr_form():
    assert f_xz_nr(0.0, 2.0) == 0.0
    assert f_xz_nr(1e-3, 1e-3) == pytest.approx(16 * math.pi**4 * 1e-3 / (15 * 1e-12), rel=1e-3)
    v = 0.37
    assert f_xz_nr(v, 1e8) * 1e80 == pytest.approx(2048 * math.pi**10 * v / 1485, rel=1e-12)


def test_gamma_power_series_identity():
    v = 0.4
    assert gamma_power_series(3, v, 200) == pytest.approx((1 - v * v) ** -3, rel=1e-14)
    assert gamma_power_series(1, v, 200) == pytest.approx(1 / (1 - v * v), rel=1e-14)


def test_eulerian_rows():
    assert eulerian_numbers(1) == [1]
    assert eulerian_numbers(3) == [1, 4, 1]
    assert eulerian_numbers(4) == [1, 11, 11, 1]
    assert sum(eulerian_numbers(7)) == math.factorial(7)


@pytest.mark.parametrize("n", [1, 3, 5, 9])
def test_bose_derivative_against_polylog(n):
    t = sympy.Symbol("t")
    li = sympy.expand_func(sympy.polylog(-n, t))
    for y in (0.01, 0.3, 2.0, 25.0):
        ref = float(li.subs(t, sympy.exp(-sympy.Float(y, 40))).evalf(30))
        assert bose_derivative(n, y) == pytest.approx(ref, rel=1e-12)


def test_series_linear_limit_and_crosscheck():
    val, terms = f_xz_series(1e-4, 2.0, 3)
    assert val == pytest.approx(terms[0], rel=1e-7)
    assert val == pytest.approx(f_xz_nr(1e-4, 2.0), rel=1e-6)
    assert f_xz_series(0.0, 2.0)[0] == 0.0


def test_series_divergence_warning():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        f_xz_series(0.8, 2.0, 4)
    assert any(issubclass(w.category, SeriesDivergenceWarning) for w in caught)
    with pytest.raises(ValueError):
        f_xz_series(0.5, 1.0, 13)
