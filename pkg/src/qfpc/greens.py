"""Reduced Green's dyadic above a planar surface, evaluated at the atom height.

Natural units (hbar = c = 1): frequencies and wave numbers are inverse
lengths. Matrices are 3x3 complex numpy arrays indexed (x, y, z).

The generic assembly builds g from the scalar TE/TM Green's functions and
their z-derivatives at coincidence z = z~ = a. The bulk term depends on
z - z~ only; at coincidence its odd derivatives are taken as the symmetric
average of the one-sided limits (zero) and contact delta terms are dropped.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SurfaceMedium",
    "SpectralArgs",
    "PC",
    "VACUUM",
    "LightConeError",
    "PoleError",
    "propagation_wavenumbers",
    "reflection_coefficients",
    "greens_planar",
    "greens_pc",
    "anti_hermitian",
    "anti_hermitian_pc",
    "coincidence_derivatives",
    "lorentz_transform",
]

_IDX = {"x": 0, "y": 1, "z": 2}


class LightConeError(ValueError):
    """Raised when kappa vanishes (k^2 == omega^2) and g is singular."""


class PoleError(ZeroDivisionError):
    """Raised when a reflection-coefficient denominator vanishes."""


@dataclass(frozen=True)
class SurfaceMedium:
    """Homogeneous isotropic reflecting half-space below z = 0.

    ``epsilon = math.inf`` marks the perfect conductor, for which the
    reflection coefficients are fixed at rE = -1, rH = +1.
    """

    epsilon: float
    mu: float = 1.0

    def __post_init__(self):
        if not (self.epsilon > 0):
            raise ValueError("epsilon must be positive (or inf for a perfect conductor)")
        if self.mu < 0:
            raise ValueError("mu must be nonnegative")

    @property
    def is_pc(self) -> bool:
        return math.isinf(self.epsilon)


PC = SurfaceMedium(epsilon=math.inf, mu=0.0)
VACUUM = SurfaceMedium(epsilon=1.0, mu=1.0)


@dataclass(frozen=True)
class SpectralArgs:
    omega: float
    kx: float
    ky: float
    a: float

    def __post_init__(self):
        vals = (self.omega, self.kx, self.ky, self.a)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("spectral arguments must be finite")
        if self.a <= 0:
            raise ValueError("plate distance a must be positive")

    @property
    def k2(self) -> float:
        return self.kx * self.kx + self.ky * self.ky


def _branch(k2: float, w2: float, sign_omega: float) -> complex:
    d = k2 - w2
    if d >= 0:
        return complex(math.sqrt(d), 0.0)
    return complex(0.0, -sign_omega * math.sqrt(-d))


def propagation_wavenumbers(args: SpectralArgs, medium: SurfaceMedium = VACUUM):
    """Vacuum and surface propagation wave numbers (kappa, kappa').

    Real and nonnegative when evanescent; -i sgn(omega) sqrt(omega^2 - k^2)
    inside the light cone (retarded branch). For the perfect conductor kappa'
    is returned as complex infinity since eps*mu is not defined there.
    """
    s = math.copysign(1.0, args.omega) if args.omega != 0 else 0.0
    kappa = _branch(args.k2, args.omega**2, s)
    if medium.is_pc:
        return kappa, complex(math.inf, 0.0)
    kappa_p = _branch(args.k2, args.omega**2 * medium.epsilon * medium.mu, s)
    return kappa, kappa_p


def reflection_coefficients(medium: SurfaceMedium, kappa: complex, kappa_prime: complex):
    """TE and TM reflection coefficients (rE, rH)."""
    if medium.is_pc:
        return complex(-1.0), complex(1.0)
    if medium.mu == 0:
        raise PoleError("mu = 0 is only meaningful in the perfect-conductor limit")
    de = kappa + kappa_prime / medium.mu
    dh = kappa + kappa_prime / medium.epsilon
    if de == 0 or dh == 0:
        raise PoleError("reflection coefficient denominator vanishes")
    r_e = (kappa - kappa_prime / medium.mu) / de
    r_h = (kappa - kappa_prime / medium.epsilon) / dh
    return r_e, r_h


def _scalar_deriv(m: int, n: int, kappa: complex, r: complex, a: float) -> complex:
    """d^m/dz^m d^n/dz~^n of the scalar Green's function at z = z~ = a."""
    p = m + n
    bulk = (-1) ** n * kappa**p if p % 2 == 0 else 0.0
    scat = r * (-kappa) ** p * np.exp(-2.0 * kappa * a)
    return (bulk + scat) / (2.0 * kappa)


def _assemble(args: SpectralArgs, kappa, r_e, r_h, dz=0, dzt=0) -> np.ndarray:
    """Matrix of d^dz/dz^dz d^dzt/dz~^dzt g_ij at coincidence."""
    kx, ky, w, k2 = args.kx, args.ky, args.omega, args.k2
    if k2 == 0:
        raise ValueError("generic assembly needs a nonzero transverse wave vector")
    a = args.a

    def gH(m, n):
        return _scalar_deriv(m + dz, n + dzt, kappa, r_h, a)

    def gE(m, n):
        return _scalar_deriv(m + dz, n + dzt, kappa, r_e, a)

    w2 = w * w
    g = np.empty((3, 3), dtype=complex)
    g[0, 0] = kx * kx / k2 * gH(1, 1) + ky * ky / k2 * w2 * gE(0, 0)
    g[0, 1] = kx * ky / k2 * gH(1, 1) - kx * ky / k2 * w2 * gE(0, 0)
    g[1, 0] = g[0, 1]
    g[1, 1] = ky * ky / k2 * gH(1, 1) + kx * kx / k2 * w2 * gE(0, 0)
    g[0, 2] = 1j * kx * gH(1, 0)
    g[1, 2] = 1j * ky * gH(1, 0)
    g[2, 0] = -1j * kx * gH(0, 1)
    g[2, 1] = -1j * ky * gH(0, 1)
    g[2, 2] = k2 * gH(0, 0)
    return g


def greens_planar(args: SpectralArgs, medium: SurfaceMedium) -> np.ndarray:
    """Reduced Green's dyadic g(omega, k; a, a) from the TE/TM scalar functions."""
    kappa, kappa_p = propagation_wavenumbers(args, medium)
    if kappa == 0:
        raise LightConeError("kappa = 0 on the light cone")
    r_e, r_h = reflection_coefficients(medium, kappa, kappa_p)
    return _assemble(args, kappa, r_e, r_h)


def greens_pc(args: SpectralArgs) -> np.ndarray:
    """Closed-form reduced Green's dyadic for the perfectly conducting plate."""
    kappa, _ = propagation_wavenumbers(args, PC)
    if kappa == 0:
        raise LightConeError("kappa = 0 on the light cone")
    kx, ky, w, k2 = args.kx, args.ky, args.omega, args.k2
    e = np.exp(-2.0 * kappa * args.a)
    one_m = (1.0 - e) / (2.0 * kappa)
    g = np.empty((3, 3), dtype=complex)
    g[0, 0] = (w * w - kx * kx) * one_m
    g[0, 1] = g[1, 0] = -kx * ky * one_m
    g[1, 1] = (w * w - ky * ky) * one_m
    g[0, 2] = -0.5j * kx * e
    g[1, 2] = -0.5j * ky * e
    g[2, 0] = 0.5j * kx * e
    g[2, 1] = 0.5j * ky * e
    g[2, 2] = k2 * (1.0 + e) / (2.0 * kappa)
    return g


def anti_hermitian(greens, args: SpectralArgs) -> np.ndarray:
    """(g_ij(omega, k) - g_ji(-omega, -k)) / 2i for a callable ``greens(args)``."""
    mirrored = SpectralArgs(-args.omega, -args.kx, -args.ky, args.a)
    return (greens(args) - greens(mirrored).T) / 2j


def anti_hermitian_pc(args: SpectralArgs) -> np.ndarray:
    """Anti-Hermitian part of the perfect-conductor dyadic in closed form.

    Vanishes outside the light cone; inside, with q = sqrt(omega^2 - k^2),
    the diagonal entries are real and the xz/zx (yz/zy) pairs are purely
    imaginary and antisymmetric.
    """
    kx, ky, w, k2 = args.kx, args.ky, args.omega, args.k2
    out = np.zeros((3, 3), dtype=complex)
    if k2 >= w * w:
        return out
    q = math.sqrt(w * w - k2)
    s = math.copysign(1.0, w)
    c2 = math.cos(2.0 * q * args.a)
    s2 = math.sin(2.0 * q * args.a)
    out[0, 0] = s * (w * w - kx * kx) / (2 * q) * (1 - c2)
    out[1, 1] = s * (w * w - ky * ky) / (2 * q) * (1 - c2)
    out[2, 2] = s * k2 / (2 * q) * (1 + c2)
    out[0, 1] = out[1, 0] = -s * kx * ky / (2 * q) * (1 - c2)
    out[0, 2] = -0.5j * s * kx * s2
    out[2, 0] = -out[0, 2]
    out[1, 2] = -0.5j * s * ky * s2
    out[2, 1] = -out[1, 2]
    return out


def coincidence_derivatives(args: SpectralArgs, r_e: complex, r_h: complex) -> dict:
    """z-derivative data of g at coincidence needed by the frame transformation.

    Keys name the derivative and component, e.g. ``"dzt_xx"`` is d/dz~ g_xx and
    ``"dzdzt_xx"`` is d^2/dz dz~ g_xx.
    """
    kappa, _ = propagation_wavenumbers(args)
    if kappa == 0:
        raise LightConeError("kappa = 0 on the light cone")
    d10 = _assemble(args, kappa, r_e, r_h, dz=1)
    d01 = _assemble(args, kappa, r_e, r_h, dzt=1)
    d11 = _assemble(args, kappa, r_e, r_h, dz=1, dzt=1)
    return {
        "g": _assemble(args, kappa, r_e, r_h),
        "dz_xx": d10[0, 0],
        "dzt_xx": d01[0, 0],
        "dz_xy": d10[0, 1],
        "dzt_yx": d01[1, 0],
        "dz_xz": d10[0, 2],
        "dzt_zx": d01[2, 0],
        "dzdzt_xx": d11[0, 0],
    }


def lorentz_transform(primed: SpectralArgs, v: float, medium: SurfaceMedium = PC) -> np.ndarray:
    """Green's dyadic seen in the frame moving with velocity v along x.

    ``primed`` holds the moving-frame (omega', k'); g and its z-derivatives are
    evaluated at the lab-frame omega = gamma (omega' + k'_x v),
    k_x = gamma (k'_x + omega' v). Each tensor index transforms on its own:
    x is unchanged, y mixes in x through k'_y v, and z mixes in d/dz g_x. with
    the row (z) index and d/dz~ g_.x with the column index. Only media with
    rE = -rH (vacuum, perfect conductor) are supported.
    """
    if not abs(v) < 1:
        raise ValueError("|v| must be < 1")
    if medium.is_pc:
        r_e, r_h = -1.0, 1.0
    elif medium == VACUUM:
        r_e, r_h = 0.0, 0.0
    else:
        raise NotImplementedError("frame transformation implemented for PC and vacuum only")
    gamma = 1.0 / math.sqrt(1.0 - v * v)
    wp, kxp, kyp = primed.omega, primed.kx, primed.ky
    s = wp + kxp * v
    if s == 0:
        raise ZeroDivisionError("omega' + k'_x v = 0 is a removable singularity; avoid it")
    lab = SpectralArgs(gamma * s, gamma * (kxp + wp * v), kyp, primed.a)
    d = coincidence_derivatives(lab, r_e, r_h)
    g = d["g"]
    W = wp / gamma
    xx, xy, xz = g[0]
    yx, yy, yz = g[1]
    zx, zy, zz = g[2]
    out = np.empty((3, 3), dtype=complex)
    out[0, 0] = xx
    out[0, 1] = (W * xy + kyp * v * xx) / s
    out[1, 0] = (W * yx + kyp * v * xx) / s
    out[1, 1] = (W * W * yy + kyp**2 * v * v * xx + W * kyp * v * (xy + yx)) / s**2
    out[0, 2] = (W * xz + 1j * v * d["dzt_xx"]) / s
    out[2, 0] = (W * zx - 1j * v * d["dz_xx"]) / s
    out[2, 2] = (
        W * W * zz
        + v * v * d["dzdzt_xx"]
        + 1j * W * v * d["dzt_zx"]
        - 1j * W * v * d["dz_xz"]
    ) / s**2
    out[1, 2] = (
        W * W * yz
        + 1j * kyp * v * v * d["dzt_xx"]
        + 1j * W * v * d["dzt_yx"]
        + W * kyp * v * xz
    ) / s**2
    out[2, 1] = (
        W * W * zy
        - 1j * kyp * v * v * d["dz_xx"]
        - 1j * W * v * d["dz_xy"]
        + W * kyp * v * zx
    ) / s**2
    return out
