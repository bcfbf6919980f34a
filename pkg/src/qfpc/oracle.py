"""Brute-force cross-checks of the reduced friction integrands.

fixed_omega_bruteforce evaluates the friction spectral density at a single
frequency directly as a double transverse-wave-vector integral of the
anti-Hermitian plate response, with the thermal coth factor in the moving
frame. Nothing from the u-form kernels is reused, so agreement with
``x^7 F_PQ(x)`` checks the angular reduction and the coth-to-Bose recast.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .asymptotics import SeriesDivergenceWarning, f_xz_series
from .forces import f_channel
from .kernels import Channel, Kinematics, integrand_F
from .quadrature import QuadratureConfig, gl_nodes, integrate_xu

__all__ = [
    "OracleReport",
    "anti_hermitian_pc_grid",
    "fixed_omega_bruteforce",
    "fixed_omega_report",
    "xz_series_crosscheck",
]

_TINY = 1e-300
_ALPHA = {
    Channel.XX: (1.0, 0.0, 0.0),
    Channel.YY: (0.0, 1.0, 0.0),
    Channel.ZZ: (0.0, 0.0, 1.0),
}


@dataclass(frozen=True)
class OracleReport:
    point: tuple
    primary_value: float
    oracle_value: float
    rel_dev: float
    cost_evals: int
    oracle_conv: float = 0.0
    warning: str | None = None

    @classmethod
    def build(cls, point, primary, oracle, cost, conv=0.0, warning=None):
        rel = abs(primary - oracle) / max(abs(oracle), _TINY)
        if primary == oracle:
            rel = 0.0
        return cls(tuple(point), float(primary), float(oracle), float(rel), int(cost), float(conv), warning)


def anti_hermitian_pc_grid(omega: float, kx, ky, a: float) -> np.ndarray:
    """Anti-Hermitian part of the perfect-conductor dyadic for arrays of
    propagating wave vectors (k < |omega|); shape kx.shape + (3, 3)."""
    kx = np.asarray(kx, dtype=float)
    ky = np.asarray(ky, dtype=float)
    k2 = kx * kx + ky * ky
    q = np.sqrt(omega * omega - k2)
    s = math.copysign(1.0, omega)
    c2 = np.cos(2 * q * a)
    s2 = np.sin(2 * q * a)
    m = np.zeros(kx.shape + (3, 3), dtype=complex)
    m[..., 0, 0] = s * (omega**2 - kx * kx) / (2 * q) * (1 - c2)
    m[..., 1, 1] = s * (omega**2 - ky * ky) / (2 * q) * (1 - c2)
    m[..., 2, 2] = s * k2 / (2 * q) * (1 + c2)
    m[..., 0, 1] = m[..., 1, 0] = -s * kx * ky / (2 * q) * (1 - c2)
    m[..., 0, 2] = -0.5j * s * kx * s2
    m[..., 2, 0] = -m[..., 0, 2]
    m[..., 1, 2] = -0.5j * s * ky * s2
    m[..., 2, 1] = -m[..., 1, 2]
    return m


def _density(alpha, x, kin: Kinematics, z, n_theta, n_phi):
    """x^7 F for a diagonal alpha (in units where both alphas are 1)."""
    # frequencies in units of 1/(2a): a = 1/2, omega = x, beta = 2 a z = z
    a = 0.5
    w = x
    beta = z
    v, g = kin.v, kin.gamma
    t, wt = gl_nodes(n_theta)
    theta = 0.5 * math.pi * t
    wt = 0.5 * math.pi * wt
    phi = np.arange(n_phi) * (2 * math.pi / n_phi)
    th, ph = np.meshgrid(theta, phi, indexing="ij")
    rho = np.sin(th)
    # k = omega sin(theta): d^2k = omega^2 rho cos(theta) dtheta dphi
    weight = (wt[:, None] * (2 * math.pi / n_phi) * w * w * rho * np.cos(th)).ravel()
    kx = (w * rho * np.cos(ph)).ravel()
    ky = (w * rho * np.sin(ph)).ravel()
    img = anti_hermitian_pc_grid(w, kx, ky, a)
    A = np.diag(alpha)
    s0 = np.einsum("n,nij->ij", weight, img)
    s1 = np.einsum("n,n,nij->ij", weight, kx, img)
    coth = 1.0 / np.tanh(0.5 * beta * g * (w + kx * v))
    # sum over (k, kbar) of (kbar_x - k_x) coth(kbar) tr[A Img(k) A Img(kbar)],
    # factorized through the k-sums s0 and s1
    t1 = np.einsum("n,n,n,ij,jk,kl,nli->", weight, coth, kx, A, s0, A, img)
    t2 = np.einsum("n,n,ij,jk,kl,nli->", weight, coth, A, s1, A, img)
    phi_density = (t1 - t2) / math.pi / (2 * math.pi) ** 4
    return 32 * math.pi**3 * phi_density.real, weight.size**2


def fixed_omega_bruteforce(
    channel, x: float, kin: Kinematics, z: float, n_theta: int = 48, n_phi: int = 64
) -> float:
    """x^7 F_PQ(x, v, z) from the wave-vector double integral.

    The XZ channel is isolated as the cross term of alpha = diag(1, 0, 1).
    """
    return _bruteforce(channel, x, kin, z, n_theta, n_phi)[0]


def _bruteforce(channel, x, kin, z, n_theta, n_phi):
    ch = Channel(channel)
    if ch is Channel.ISO:
        raise ValueError("ISO is not a single channel")
    if not x > 0:
        raise ValueError("x must be positive")
    if ch is Channel.XZ:
        both, c0 = _density((1.0, 0.0, 1.0), x, kin, z, n_theta, n_phi)
        xx, c1 = _density(_ALPHA[Channel.XX], x, kin, z, n_theta, n_phi)
        zz, c2 = _density(_ALPHA[Channel.ZZ], x, kin, z, n_theta, n_phi)
        return both - xx - zz, c0 + c1 + c2
    return _density(_ALPHA[ch], x, kin, z, n_theta, n_phi)


def _primary_density(channel, x, kin, z, cfg):
    xs = np.array([float(x)])
    val = integrate_xu(lambda xx, u: integrand_F(channel, xx, u, kin, z), xs, cfg)
    return float(x**7 * val[0])


def fixed_omega_report(
    channel,
    x: float,
    kin: Kinematics,
    z: float,
    n_theta: int = 48,
    n_phi: int = 64,
    cfg: QuadratureConfig = QuadratureConfig(),
) -> OracleReport:
    """Compare the brute-force density with the folded u-integral.

    ``oracle_conv`` is the relative change of the oracle when both node
    counts are doubled.
    """
    ch = Channel(channel)
    coarse, c0 = _bruteforce(ch, x, kin, z, n_theta, n_phi)
    fine, c1 = _bruteforce(ch, x, kin, z, 2 * n_theta, 2 * n_phi)
    conv = abs(fine - coarse) / max(abs(fine), _TINY)
    primary = _primary_density(ch, x, kin, z, cfg)
    return OracleReport.build((ch.value, x, kin.v, z), primary, fine, c0 + c1, conv)


def xz_series_crosscheck(
    v: float, z: float, m_max: int = 8, cfg: QuadratureConfig = QuadratureConfig()
) -> OracleReport:
    """Velocity series of the XZ channel against the quadrature value."""
    if not 0 <= v <= 0.8:
        raise ValueError("series cross-check requires 0 <= v <= 0.8")
    if m_max > 10:
        raise ValueError("m_max must be <= 10")
    point = ("XZ", v, z, m_max)
    if v == 0:
        return OracleReport.build(point, 0.0, 0.0, 0)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", SeriesDivergenceWarning)
        series, terms = f_xz_series(v, z, m_max, cfg)
    msg = "; ".join(str(w.message) for w in caught if issubclass(w.category, SeriesDivergenceWarning))
    quad = f_channel(Channel.XZ, Kinematics(v), z, cfg)
    return OracleReport.build(point, quad.value, series, quad.panels + len(terms), warning=msg or None)
