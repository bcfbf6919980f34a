"""Closed-form limits of the dimensionless friction functions.

Small z (far from the plate or hot) reproduces blackbody friction in free
space for the diagonal channels; large z (close or cold) is dominated by ZZ,
which is four times its free-space value. The nonrelativistic XZ friction is
2 v I(z) with I(z) known in closed form, and f_xz_series evaluates the
velocity expansion of the XZ channel term by term.
"""
from __future__ import annotations

import enum
import math
import warnings

import numpy as np

from .kernels import Channel, Kinematics
from .quadrature import QuadratureConfig, integrate_x
from .specfun import bessel_half, gamma_int, zeta_even

__all__ = [
    "AsymptoticRegime",
    "SeriesDivergenceWarning",
    "f_small_z",
    "f_large_z",
    "I_closed_form",
    "I_integral",
    "f_xz_nr",
    "f_xz_series",
    "gamma_power_series",
    "eulerian_numbers",
    "bose_derivative",
]


class AsymptoticRegime(str, enum.Enum):
    SMALL_Z = "SmallZ"
    LARGE_Z = "LargeZ"
    NR = "NR"


class SeriesDivergenceWarning(RuntimeWarning):
    pass


def _gamma(v: float) -> float:
    return Kinematics(v).gamma


def f_small_z(channel, v: float, z: float) -> float:
    """Leading small-z behaviour (free-space limit for XX, YY, ZZ)."""
    ch = Channel(channel)
    g = _gamma(v)
    diag = 4 * gamma_int(8) * zeta_even(8) / (3 * z**8) * 32 / 105
    if ch is Channel.XX:
        return -diag * g**4 * v * (7 + 3 * v * v)
    if ch in (Channel.YY, Channel.ZZ):
        return -diag * g**6 * v * (14 + 37 * v * v + 9 * v**4)
    if ch is Channel.XZ:
        return 16 * gamma_int(4) * zeta_even(4) / z**4 * v / g**4
    raise ValueError("no single-channel limit for ISO")


def f_large_z(channel, v: float, z: float) -> float:
    """Leading large-z behaviour of each channel."""
    ch = Channel(channel)
    g = _gamma(v)
    v2 = v * v
    if ch is Channel.XX:
        c = gamma_int(12) * zeta_even(12) / (15 * z**12)
        return -c * 64 / 3465 * g**6 * v * (99 + 110 * v2 + 15 * v2 * v2)
    if ch is Channel.YY:
        c = gamma_int(12) * zeta_even(12) / (15 * z**12)
        return -c * 32 / 3465 * g**8 * v * (297 + 1034 * v2 + 625 * v2 * v2 + 60 * v2**3)
    if ch is Channel.ZZ:
        c = 8 * gamma_int(8) * zeta_even(8) / (3 * z**8)
        return -c * 64 / 105 * g**6 * v * (14 + 37 * v2 + 9 * v2 * v2)
    if ch is Channel.XZ:
        c = 2 * gamma_int(10) * zeta_even(10) / (15 * z**10)
        return c * 8 / 63 * g**6 * v * (21 + 30 * v2 + 5 * v2 * v2)
    raise ValueError("no single-channel limit for ISO")


# I(z) ~ sum_k A_k (pi/z)^(10+2k) for z -> inf, from expanding the
# integration-by-parts form in powers of x
_I_LARGE_Z = (
    1024 / 1485,
    -2830336 / 2149875,
    65536 / 42525,
    -237043712 / 166995675,
    11499470848 / 10190665485,
    -183092903936 / 225759909375,
)
_I_SWITCH = 50.0


def I_closed_form(z: float) -> float:
    """z-dependence of the nonrelativistic XZ friction.

    Uses the coth/csch closed form up to z = 50 and the six-term large-z
    expansion beyond, where the closed form cancels to O(z^-10).
    """
    if not z > 0:
        raise ValueError("z must be positive")
    pi = math.pi
    if z > _I_SWITCH:
        t = (pi / z) ** 2
        return (pi / z) ** 10 * sum(c * t**k for k, c in enumerate(_I_LARGE_Z))
    y = 2 * pi / z
    head = 8 * pi**4 / (15 * z**4) + 2 * pi**2 / z**2 - 9
    if y > 350:
        return head
    coth = 1.0 / math.tanh(y)
    csch2 = 1.0 / math.sinh(y) ** 2
    bracket = (
        16 * pi**5 / z**5 * (3 * coth**2 - 2) * coth
        + 16 * pi**4 / z**4 * (3 * coth**2 - 1)
        + 24 * pi**3 / z**3 * coth
        + 6 * pi**2 / z**2
    )
    return head + bracket * csch2


def I_integral(z: float, cfg: QuadratureConfig = QuadratureConfig()) -> float:
    """I(z) = z int_0^inf [3x cos x + (x^2-3) sin x]^2 / sinh^2(xz/2) dx by quadrature."""

    def f(x):
        b = 3 * x * np.cos(x) + (x * x - 3) * np.sin(x)
        with np.errstate(over="ignore"):
            # 1/sinh^2(y) = 4 e^{-2y} / (1 - e^{-2y})^2
            e = np.exp(-x * z)
            return z * b * b * 4 * e / np.expm1(-x * z) ** 2

    return integrate_x(f, rate=z, power=4, cfg=cfg).value


def f_xz_nr(v: float, z: float) -> float:
    """Term linear in v of the XZ friction: 2 v I(z)."""
    return 2.0 * v * I_closed_form(z)


def gamma_power_series(n: int, v: float, m_max: int) -> float:
    """Partial sum of gamma^(2n) = 1/(n-1)! sum_m v^(2m) (m+1)...(m+n-1)."""
    total = 0.0
    for m in range(m_max + 1):
        total += v ** (2 * m) * math.prod(range(m + 1, m + n)) / math.factorial(n - 1)
    return total


def eulerian_numbers(n: int) -> list[int]:
    """Row n of the Eulerian triangle, A(n, k) for k = 0..n-1."""
    row = [1]
    for m in range(2, n + 1):
        row = [
            (k + 1) * (row[k] if k < len(row) else 0) + (m - k) * (row[k - 1] if k else 0)
            for k in range(m)
        ]
    return row


def bose_derivative(n: int, y):
    """sum_j j^n e^{-j y} = (-1)^n d^n/dy^n 1/(e^y - 1), via Eulerian numbers.

    All terms are positive, so the closed form is stable both where the
    exponential series converges slowly (small y) and where it underflows.
    """
    y = np.asarray(y, dtype=float)
    with np.errstate(over="ignore", under="ignore"):
        t = np.exp(-y)
        poly = np.zeros_like(y)
        for c in reversed(eulerian_numbers(n)):
            poly = poly * t + c
        return t * poly / (-np.expm1(-y)) ** (n + 1)


def f_xz_series(v: float, z: float, m_max: int = 8, cfg: QuadratureConfig = QuadratureConfig()):
    """Velocity expansion of the XZ channel, keeping gamma(v) implicit.

    Returns ``(value, terms)``. Term m is proportional to v^(2m+1) and
    involves int x^(m+5) J_{5/2}(x) J_{m+5/2}(x) z^(2m+1) d^(2m+1)/dz^(2m+1)
    of the Bose factor at x gamma z. Warns when the last term has not shrunk.
    """
    if not 0 <= v < 1:
        raise ValueError("v must lie in [0, 1)")
    if m_max > 12:
        raise ValueError("m_max must be <= 12")
    if v == 0:
        return 0.0, [0.0] * (m_max + 1)
    g = _gamma(v)
    rate = g * z
    terms = []
    for m in range(m_max + 1):
        n = 2 * m + 1

        def integrand(x, m=m, n=n):
            return x ** (m + 5) * bessel_half(2, x) * bessel_half(m + 2, x) * bose_derivative(n, x * rate)

        integral = integrate_x(integrand, rate=rate, power=m + 5 + n, cfg=cfg).value
        # z^n d^n/dz^n of n(x gamma z) = (-x gamma z)^n sum_j j^n e^{-j x gamma z}
        coef = -math.pi * v**n / math.factorial(m) * 2.0 ** (2 - m) * (-(g * z)) ** n
        terms.append(coef * integral)
    if m_max >= 1 and abs(terms[-1]) >= abs(terms[-2]) and terms[-1] != 0:
        warnings.warn(
            f"velocity series not decreasing at m={m_max} "
            f"(ratio {abs(terms[-1] / terms[-2]):.3g})",
            SeriesDivergenceWarning,
            stacklevel=2,
        )
    return math.fsum(terms), terms
