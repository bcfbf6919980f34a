"""Dimensionless friction integrands for the four polarization channels.

With x = 2 omega a the dimensionless frequency and u = kbar_x / omega, each
channel contributes

    f_PQ(v, z) = int_0^inf dx x^7 P_PQ(x) int_{-1}^{1} du u B_PQ(x, u) n(x gamma (1 + u v) z)

with n(y) = 1/(e^y - 1). Every bracket B_PQ is even in u, so the u-integral is
folded onto (0, 1] where it becomes a difference of two Bose factors. That
makes the v = 0 integrand vanish identically instead of by cancellation.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .specfun import j0m1_j1x

__all__ = [
    "Channel",
    "CHANNELS",
    "Kinematics",
    "ThermalGeometry",
    "prefactor",
    "angular_bracket",
    "angular_brackets",
    "bose",
    "bose_difference",
    "integrand_F",
    "integrand_F_multi",
    "integrand_unfolded",
    "HBAR_C_OVER_KB",
]

HBAR = 1.054571817e-34
C_LIGHT = 2.99792458e8
K_B = 1.380649e-23
HBAR_C_OVER_KB = HBAR * C_LIGHT / K_B


class Channel(str, enum.Enum):
    XX = "XX"
    YY = "YY"
    ZZ = "ZZ"
    XZ = "XZ"
    ISO = "ISO"


CHANNELS = (Channel.XX, Channel.YY, Channel.ZZ, Channel.XZ)


@dataclass(frozen=True)
class Kinematics:
    v: float

    def __post_init__(self):
        if not (0.0 <= self.v < 1.0):
            raise ValueError(f"velocity must lie in [0, 1), got {self.v}")

    @property
    def gamma(self) -> float:
        return 1.0 / math.sqrt((1.0 - self.v) * (1.0 + self.v))


@dataclass(frozen=True)
class ThermalGeometry:
    """Plate distance ``a`` in meters and temperature ``T`` in kelvin."""

    a: float
    T: float

    def __post_init__(self):
        if not (self.a > 0 and self.T > 0):
            raise ValueError("distance and temperature must be positive")

    @property
    def z(self) -> float:
        return HBAR_C_OVER_KB / (2.0 * self.a * self.T)

    @property
    def beta_natural(self) -> float:
        return 2.0 * self.a * self.z


def _channel(ch) -> Channel:
    ch = Channel(ch)
    if ch is Channel.ISO:
        raise ValueError("ISO is a sum of channels, not a kernel")
    return ch


# -- x prefactors ---------------------------------------------------------------

_SERIES_CUT = 1.0
_N_SERIES = 14


def _sin_coef(j):
    # coefficient of x^j in sin x
    return Fraction((-1) ** ((j - 1) // 2), math.factorial(j)) if j % 2 else Fraction(0)


def _cos_coef(j):
    return Fraction((-1) ** (j // 2), math.factorial(j)) if j % 2 == 0 else Fraction(0)


def _maclaurin(bracket_coef, power, scale, constant):
    """Coefficients c_k of constant + scale * bracket(x) / x^power = sum c_k x^(2k)."""
    coefs = []
    for k in range(_N_SERIES):
        j = 2 * k + power
        c = scale * bracket_coef(j)
        if k == 0:
            c += constant
        coefs.append(float(c))
    return np.array(coefs)


# x cos x + (x^2 - 1) sin x
_XX_SERIES = _maclaurin(
    lambda j: _cos_coef(j - 1) + _sin_coef(j - 2) - _sin_coef(j), 3, Fraction(-2), Fraction(4, 3)
)
# x cos x - sin x
_ZZ_SERIES = _maclaurin(lambda j: _cos_coef(j - 1) - _sin_coef(j), 3, Fraction(-4), Fraction(4, 3))
# 3 x cos x + (x^2 - 3) sin x, odd: expand bracket / x^5 and multiply by x afterwards
_XZ_SERIES = _maclaurin(
    lambda j: 3 * _cos_coef(j - 1) + _sin_coef(j - 2) - 3 * _sin_coef(j), 5, Fraction(4), Fraction(0)
)


def _poly_x2(coefs, x):
    x2 = x * x
    acc = np.zeros_like(x)
    for c in coefs[::-1]:
        acc = acc * x2 + c
    return acc


def prefactor(channel, x):
    """Channel prefactor P_PQ(x), Maclaurin-expanded for x < 1.

    XX and YY share 4/3 - 2 [x cos x + (x^2-1) sin x]/x^3; ZZ is
    4/3 - 4 [x cos x - sin x]/x^3; XZ is 4 [3 x cos x + (x^2-3) sin x]/x^4,
    which behaves as -4x/15 near the origin.
    """
    ch = _channel(channel)
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("prefactor needs x > 0")
    xs = np.atleast_1d(x)
    small = xs < _SERIES_CUT
    out = np.empty_like(xs)
    big = xs[~small]
    s, c = np.sin(big), np.cos(big)
    if ch in (Channel.XX, Channel.YY):
        out[~small] = 4 / 3 - 2 / big**3 * (big * c + (big * big - 1) * s)
        out[small] = _poly_x2(_XX_SERIES, xs[small])
    elif ch is Channel.ZZ:
        out[~small] = 4 / 3 - 4 / big**3 * (big * c - s)
        out[small] = _poly_x2(_ZZ_SERIES, xs[small])
    else:
        out[~small] = 4 / big**4 * (3 * big * c + (big * big - 3) * s)
        out[small] = xs[small] * _poly_x2(_XZ_SERIES, xs[small])
    return out[0] if x.ndim == 0 else out


def angular_brackets(channels, x, u) -> list[np.ndarray]:
    """Brackets B_PQ(x, u) for several channels from one Bessel evaluation.

    Every bracket is even in u. They are written through J0 - 1 and J1(xi)/xi
    with xi = x sqrt(1 - u^2), so the small-x cancellations in the XX and YY
    brackets happen analytically.
    """
    chans = [_channel(c) for c in channels]
    x, u = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(u, dtype=float))
    u2 = u * u
    r2 = (1.0 - np.abs(u)) * (1.0 + np.abs(u))
    xi = x * np.sqrt(r2)
    j0m1, j1x = j0m1_j1x(xi)
    # r^2 J1(xi)/xi = r J1(xi) / x, written about its xi -> 0 limit r^2 / 2
    j1r = r2 * (j1x - 0.5)
    out = []
    for ch in chans:
        if ch is Channel.XX:
            out.append(-r2 * j0m1)
        elif ch is Channel.YY:
            out.append(-j0m1 + j1r)
        elif ch is Channel.ZZ:
            out.append(1.0 + u2 + u2 * j0m1 + j1r)
        else:
            # r J1(xi) = x r^2 J1(xi)/xi
            out.append(x * r2 * j1x)
    return out


def angular_bracket(channel, x, u):
    """u-dependent bracket B_PQ(x, u) of a single channel."""
    return angular_brackets([channel], x, u)[0]


def bose(y):
    """Planck occupation 1/(e^y - 1) for y > 0, underflowing to 0."""
    y = np.asarray(y, dtype=float)
    with np.errstate(over="ignore"):
        t = np.exp(-y)
        return t / -np.expm1(-y)


def bose_difference(x, u, kin: Kinematics, z):
    """n(x gamma (1 - u v) z) - n(x gamma (1 + u v) z), computed without
    subtracting nearly equal numbers; nonnegative for u, v >= 0."""
    x, u = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(u, dtype=float))
    lo = x * kin.gamma * (1.0 - u * kin.v) * z
    gap = 2.0 * x * kin.gamma * u * kin.v * z
    hi = lo + gap
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        num = np.exp(-lo) * -np.expm1(-gap)
        den = np.expm1(-lo) * np.expm1(-hi)
        out = num / den
    return np.where(gap == 0, 0.0, np.nan_to_num(out, nan=0.0, posinf=0.0))


def integrand_F(channel, x, u, kin: Kinematics, z):
    """Folded integrand on u in (0, 1]; integrating over u gives
    F_PQ(x, v, z) up to the x^7 weight."""
    return integrand_F_multi([channel], x, u, kin, z)[0]


def integrand_F_multi(channels, x, u, kin: Kinematics, z) -> np.ndarray:
    """integrand_F for several channels, stacked along a new leading axis."""
    x = np.asarray(x, dtype=float)
    occ = u * bose_difference(x, u, kin, z)
    brackets = angular_brackets(channels, x, u)
    return np.stack([-prefactor(c, x) * b * occ for c, b in zip(channels, brackets)])


def integrand_unfolded(channel, x, u, kin: Kinematics, z):
    """Integrand on u in [-1, 1] with the single Bose factor at gamma (1 + u v)."""
    ch = _channel(channel)
    x, u = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(u, dtype=float))
    occ = bose(x * kin.gamma * (1.0 + u * kin.v) * z)
    return prefactor(ch, x) * u * angular_bracket(ch, x, u) * occ
