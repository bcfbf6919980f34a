"""SI forces from the dimensionless friction functions.

F_PQ = hbar c alpha_pp alpha_qq f_PQ(v, z) / (32 pi^3 (2a)^8) with the static
polarizabilities as volumes in m^3 and the plate distance a in meters.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .kernels import (
    C_LIGHT,
    CHANNELS,
    HBAR,
    HBAR_C_OVER_KB,
    Channel,
    Kinematics,
    ThermalGeometry,
    integrand_F_multi,
)
from .quadrature import NonConvergenceError, QuadratureConfig, integrate_x, integrate_xu

__all__ = [
    "AtomPolarizability",
    "AtomPreset",
    "PRESETS",
    "ForceBreakdown",
    "ChannelValue",
    "z_of",
    "f_channel",
    "f_channels",
    "f_value",
    "u_cutoff",
    "force_si",
    "sweep",
    "thread_count",
    "loglog_slope",
]

ANGSTROM3 = 1e-30
_MAX_REFINE = 3


@dataclass(frozen=True)
class AtomPolarizability:
    """Diagonal static polarizability in m^3."""

    alpha_xx: float
    alpha_yy: float
    alpha_zz: float
    label: str = ""

    def __post_init__(self):
        if min(self.alpha_xx, self.alpha_yy, self.alpha_zz) < 0:
            raise ValueError("polarizability components must be nonnegative")

    @classmethod
    def isotropic(cls, alpha_A3: float, label: str = "") -> "AtomPolarizability":
        a = alpha_A3 * ANGSTROM3
        return cls(a, a, a, label)

    @classmethod
    def from_A3(cls, xx: float, yy: float, zz: float, label: str = "") -> "AtomPolarizability":
        return cls(xx * ANGSTROM3, yy * ANGSTROM3, zz * ANGSTROM3, label)

    @property
    def is_isotropic(self) -> bool:
        return self.alpha_xx == self.alpha_yy == self.alpha_zz

    def pair(self, channel: Channel) -> float:
        """alpha_pp * alpha_qq for a channel (XZ pairs xx with zz)."""
        ch = Channel(channel)
        if ch is Channel.XX:
            return self.alpha_xx**2
        if ch is Channel.YY:
            return self.alpha_yy**2
        if ch is Channel.ZZ:
            return self.alpha_zz**2
        if ch is Channel.XZ:
            return self.alpha_xx * self.alpha_zz
        if not self.is_isotropic:
            raise ValueError("ISO channel requires an isotropic atom")
        return self.alpha_xx**2


@dataclass(frozen=True)
class AtomPreset:
    polarizability: AtomPolarizability
    T1_K: float
    Ti_K: float

    def __post_init__(self):
        if not 0 < self.T1_K < self.Ti_K:
            raise ValueError("need 0 < T1 < Ti")


PRESETS = {
    "Cs": AtomPreset(AtomPolarizability.isotropic(59.3, "Cs"), 16100.0, 45100.0),
}


def z_of(a: float, T: float) -> float:
    """Dimensionless inverse temperature hbar c / (2 a k_B T)."""
    if not (a > 0 and T > 0):
        raise ValueError("distance and temperature must be positive")
    return HBAR_C_OVER_KB / (2.0 * a * T)


class ChannelValue(NamedTuple):
    value: float
    tail_bound: float
    panels: int
    rel_err_est: float


# u-range cut: the Bose difference is dropped where its leading factor is below
# e^-BOSE_CUT of its value at u = 1
BOSE_CUT = 60.0


def u_cutoff(x, kin: Kinematics, z: float):
    """Smallest u kept at frequency x.

    n(y) / n(y1) <= exp(-(y - y1)) for y >= y1, and y - y1 = x gamma v z (1 - u)
    between u and u = 1, so below the returned u the integrand is suppressed
    by at least e^-BOSE_CUT relative to the u = 1 end.
    """
    steep = np.asarray(x, dtype=float) * kin.gamma * kin.v * z
    with np.errstate(divide="ignore"):
        return np.clip(1.0 - BOSE_CUT / steep, 0.0, 1.0)


def _f_once(channels, kin: Kinematics, z: float, cfg: QuadratureConfig):
    def fx(x):
        return x**7 * integrate_xu(
            lambda xx, u: integrand_F_multi(channels, xx, u, kin, z), x, cfg, u_cutoff(x, kin, z)
        )

    return integrate_x(fx, kin, z, cfg)


def _halved(cfg: QuadratureConfig) -> QuadratureConfig:
    return replace(cfg, gl_order_u=cfg.gl_order_u // 2, gl_order_panel=cfg.gl_order_panel // 2)


def _doubled(cfg: QuadratureConfig) -> QuadratureConfig:
    return replace(cfg, gl_order_u=2 * cfg.gl_order_u, gl_order_panel=2 * cfg.gl_order_panel)


def f_channels(
    channels: Iterable, kin: Kinematics, z: float, cfg: QuadratureConfig = QuadratureConfig()
) -> dict[Channel, ChannelValue]:
    """Dimensionless friction f_PQ(v, z) for several channels in one pass.

    The channels share the Bessel and Bose evaluations. The error estimate
    compares against the same rule at half the Gauss orders; while it
    exceeds cfg.rel_tol for any channel both orders are doubled (at most
    three times).
    """
    chans = list(dict.fromkeys(Channel(c) for c in channels))
    if Channel.ISO in chans:
        raise ValueError("ISO is a sum of channels; request XX, YY, ZZ and XZ")
    if not z > 0:
        raise ValueError("z must be positive")
    if kin.v == 0.0 or not chans:
        return {c: ChannelValue(0.0, 0.0, 0, 0.0) for c in chans}
    try:
        coarse = _f_once(chans, kin, z, _halved(cfg))
        for _ in range(_MAX_REFINE + 1):
            fine = _f_once(chans, kin, z, cfg)
            scale = np.maximum(np.abs(fine.value), cfg.abs_tol)
            err = (np.abs(fine.value - coarse.value) + fine.tail_bound) / scale
            if np.all(err <= cfg.rel_tol):
                break
            coarse, cfg = fine, _doubled(cfg)
    except NonConvergenceError as exc:
        raise NonConvergenceError(f"at v={kin.v:g}, z={z:g}: {exc}") from exc
    return {
        c: ChannelValue(float(fine.value[i]), float(fine.tail_bound[i]), fine.panels, float(err[i]))
        for i, c in enumerate(chans)
    }


def f_channel(channel, kin: Kinematics, z: float, cfg: QuadratureConfig = QuadratureConfig()) -> ChannelValue:
    """Dimensionless friction of one channel; ISO sums the four channels."""
    ch = Channel(channel)
    if ch is not Channel.ISO:
        return f_channels([ch], kin, z, cfg)[ch]
    parts = f_channels(CHANNELS, kin, z, cfg).values()
    value = math.fsum(p.value for p in parts)
    err = math.fsum(abs(p.value) * p.rel_err_est for p in parts)
    return ChannelValue(
        value,
        sum(p.tail_bound for p in parts),
        max(p.panels for p in parts),
        err / abs(value) if value else 0.0,
    )


def f_value(channel, v: float, z: float, cfg: QuadratureConfig = QuadratureConfig()) -> float:
    """Shorthand for f_channel(channel, Kinematics(v), z, cfg).value."""
    return f_channel(channel, Kinematics(v), z, cfg).value


@dataclass(frozen=True)
class ForceBreakdown:
    v: float
    a_m: float
    T_K: float
    z: float
    f_xx: float = math.nan
    f_yy: float = math.nan
    f_zz: float = math.nan
    f_xz: float = math.nan
    f_iso: float = math.nan
    F_xx_N: float = math.nan
    F_yy_N: float = math.nan
    F_zz_N: float = math.nan
    F_xz_N: float = math.nan
    F_iso_N: float = math.nan
    F_total_N: float = math.nan
    rel_err_est: float = math.nan
    regime_notes: tuple[str, ...] = field(default_factory=tuple)
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None

    def as_dict(self) -> dict:
        d = {k: getattr(self, k) for k in self.__dataclass_fields__}
        d["regime_notes"] = list(self.regime_notes)
        return d


def _prefactor_si(a: float) -> float:
    return HBAR * C_LIGHT / (32.0 * math.pi**3 * (2.0 * a) ** 8)


def force_si(
    atom: AtomPolarizability,
    kin: Kinematics,
    geom: ThermalGeometry,
    channels: Iterable = CHANNELS,
    cfg: QuadratureConfig = QuadratureConfig(),
    preset: AtomPreset | None = None,
) -> ForceBreakdown:
    """Per-channel and total friction force in newtons.

    F_total_N sums the requested channels among XX, YY, ZZ and XZ; when ISO
    is requested it is the ISO force instead. f_iso is filled whenever all
    four channels were evaluated.
    """
    chans = {Channel(c) for c in channels}
    if not chans:
        raise ValueError("no channels requested")
    if Channel.ISO in chans:
        if not atom.is_isotropic:
            raise ValueError("ISO channel requires an isotropic atom")
        chans |= set(CHANNELS)
    z = geom.z
    pref = _prefactor_si(geom.a)
    notes = []
    if preset is not None and geom.T > preset.T1_K:
        notes.append(
            f"T={geom.T:g} K exceeds T1={preset.T1_K:g} K: extrapolated beyond static-limit validity"
        )

    results = f_channels([c for c in CHANNELS if c in chans], kin, z, cfg)
    f = {ch: r.value for ch, r in results.items()}
    errs = {ch: r.rel_err_est for ch, r in results.items()}
    F = {ch: pref * atom.pair(ch) * val for ch, val in f.items()}

    f_iso = F_iso = math.nan
    if len(f) == len(CHANNELS):
        f_iso = math.fsum(f.values())
        if atom.is_isotropic:
            F_iso = pref * atom.pair(Channel.ISO) * f_iso
    F_total = F_iso if Channel.ISO in chans else math.fsum(F.values())
    abs_err = math.fsum(abs(F[ch]) * errs[ch] for ch in F)
    rel_err = abs_err / abs(F_total) if F_total else (0.0 if abs_err == 0 else math.inf)

    return ForceBreakdown(
        v=kin.v,
        a_m=geom.a,
        T_K=geom.T,
        z=z,
        f_xx=f.get(Channel.XX, math.nan),
        f_yy=f.get(Channel.YY, math.nan),
        f_zz=f.get(Channel.ZZ, math.nan),
        f_xz=f.get(Channel.XZ, math.nan),
        f_iso=f_iso,
        F_xx_N=F.get(Channel.XX, math.nan),
        F_yy_N=F.get(Channel.YY, math.nan),
        F_zz_N=F.get(Channel.ZZ, math.nan),
        F_xz_N=F.get(Channel.XZ, math.nan),
        F_iso_N=F_iso,
        F_total_N=F_total,
        rel_err_est=rel_err,
        regime_notes=tuple(notes),
    )


def thread_count() -> int:
    """Worker count from QFPC_THREADS, defaulting to the machine's cores."""
    raw = os.environ.get("QFPC_THREADS")
    if raw:
        n = int(raw)
        if n < 1:
            raise ValueError("QFPC_THREADS must be >= 1")
        return n
    return os.cpu_count() or 1


def sweep(
    grid: Sequence[tuple[float, float, float]],
    atom: AtomPolarizability,
    channels: Iterable = CHANNELS,
    cfg: QuadratureConfig = QuadratureConfig(),
    preset: AtomPreset | None = None,
    threads: int | None = None,
) -> list[ForceBreakdown]:
    """force_si over (v, a, T) points, in input order.

    A point that fails yields a breakdown with NaN fields and ``error`` set;
    the other points are unaffected.
    """
    grid = list(grid)
    if not grid:
        raise ValueError("empty grid")
    channels = tuple(channels)

    def one(point):
        v, a, T = point
        try:
            return force_si(atom, Kinematics(v), ThermalGeometry(a, T), channels, cfg, preset)
        except (ArithmeticError, RuntimeError, ValueError) as exc:
            z = z_of(a, T) if a > 0 and T > 0 else math.nan
            return ForceBreakdown(v=v, a_m=a, T_K=T, z=z, error=f"{type(exc).__name__}: {exc}")

    n = threads or thread_count()
    if n == 1 or len(grid) == 1:
        return [one(p) for p in grid]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(one, grid))


def loglog_slope(xs, ys) -> float:
    """Least-squares slope of log|y| against log x."""
    lx = np.log(np.asarray(xs, dtype=float))
    ly = np.log(np.abs(np.asarray(ys, dtype=float)))
    return float(np.polyfit(lx, ly, 1)[0])
