"""Self-checks of the friction pipeline, grouped into a quick and a full suite.

Both suites take the friction functions as an argument so that a deliberately
broken implementation can be fed through them; by default they use the
quadrature pipeline of :mod:`qfpc.forces`.
"""
from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from . import asymptotics as asy
from .forces import PRESETS, f_channels, force_si, loglog_slope, sweep
from .greens import (
    PC,
    SpectralArgs,
    anti_hermitian,
    anti_hermitian_pc,
    greens_pc,
    greens_planar,
    lorentz_transform,
    propagation_wavenumbers,
    reflection_coefficients,
    SurfaceMedium,
)
from .kernels import CHANNELS, Channel, Kinematics, ThermalGeometry, integrand_F, integrand_unfolded
from .oracle import fixed_omega_report, xz_series_crosscheck
from .quadrature import QuadratureConfig, gl_nodes

__all__ = [
    "CheckResult",
    "ValidationReport",
    "SIGN_GRID_V",
    "SIGN_GRID_Z",
    "REFERENCE_POINTS",
    "run_suite",
    "pipeline_f",
]

# f(v, z) -> {channel: value} for XX, YY, ZZ, XZ
FrictionFn = Callable[[float, float], dict]

SIGN_GRID_V = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)
SIGN_GRID_Z = (0.05, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0)
QUICK_GRID_V = (0.1, 0.5, 0.9)
QUICK_GRID_Z = (0.5, 2.0, 10.0)

# (label, v, a [m], T [K], |F_total| [N], relative tolerance)
REFERENCE_POINTS = (
    ("cs_v0.5_10nm", 0.5, 10e-9, 16100.0, 1.30e-25, 0.02),
    ("cs_v0.5_1nm", 0.5, 1e-9, 16100.0, 1.57e-25, 0.02),
    ("cs_v0.995_T1", 0.995, 10e-9, 16100.0, 1.66e-19, 0.05),
    ("cs_v0.995_Ti", 0.995, 10e-9, 45100.0, 6.30e-16, 0.05),
)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""
    value: float | None = None
    seconds: float = 0.0


@dataclass
class ValidationReport:
    suite: str
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self) -> dict:
        return {"suite": self.suite, "passed": self.passed, "checks": [asdict(c) for c in self.checks]}


def pipeline_f(cfg: QuadratureConfig = QuadratureConfig()) -> FrictionFn:
    """Friction function backed by the quadrature pipeline, memoized per (v, z)."""
    cache = {}

    def f(v, z):
        key = (float(v), float(z))
        if key not in cache:
            res = f_channels(CHANNELS, Kinematics(v), z, cfg)
            cache[key] = {c: r.value for c, r in res.items()}
        return cache[key]

    return f


def _rel(a, b):
    return abs(a - b) / abs(b)


# -- individual checks --------------------------------------------------------


def check_zero_velocity(f: FrictionFn):
    vals = [f(0.0, z)[c] for z in (0.5, 7.1) for c in CHANNELS]
    ok = all(v == 0.0 for v in vals)
    return ok, f"max |f(v=0)| = {max(abs(v) for v in vals):.3g}", max(abs(v) for v in vals)


def check_fold(cfg: QuadratureConfig):
    """Folded u-integral on [0, 1] equals the unfolded one on [-1, 1]."""
    worst = 0.0
    u, w = gl_nodes(256)
    for x, v, z in ((0.5, 0.3, 1.0), (3.0, 0.6, 0.5), (12.0, 0.2, 2.0)):
        kin = Kinematics(v)
        for ch in CHANNELS:
            folded = integrand_F(ch, x, u, kin, z) @ w
            full = integrand_unfolded(ch, x, 2 * u - 1, kin, z) @ (2 * w)
            worst = max(worst, abs(folded - full) / max(abs(full), 1e-300))
    return worst < 1e-10, f"max rel dev {worst:.2e}", worst


def check_asymptotics(f: FrictionFn, vs=(0.1, 0.5), tol=0.02):
    worst = 0.0
    where = ""
    for v in vs:
        for z, ref in ((0.05, asy.f_small_z), (50.0, asy.f_large_z)):
            vals = f(v, z)
            for ch in CHANNELS:
                d = _rel(vals[ch], ref(ch, v, z))
                if d > worst:
                    worst, where = d, f"{ch.value} v={v} z={z}"
    return worst < tol, f"max rel dev {worst:.3%} at {where}", worst


def check_signs(f: FrictionFn, vs, zs):
    """Drag theorem and push subdominance over a (v, z) grid."""
    bad = []
    for v in vs:
        for z in zs:
            vals = f(v, z)
            iso = math.fsum(vals.values())
            xx, yy, zz, xz = (vals[c] for c in CHANNELS)
            if not iso < 0:
                bad.append(f"f_iso>=0 at v={v} z={z}")
            if not (0 < xz < abs(zz)):
                bad.append(f"push not subdominant at v={v} z={z}")
            if not (xx < 0 and yy < 0 and zz < 0):
                bad.append(f"diagonal channel not a drag at v={v} z={z}")
    n = len(vs) * len(zs)
    return not bad, ("all %d points ok" % n) if not bad else "; ".join(bad[:5]), float(len(bad))


def check_zero_temperature(f: FrictionFn, v=0.5):
    zs = (50.0, 100.0, 200.0, 400.0)
    mags = [max(abs(x) for x in f(v, z).values()) for z in zs]
    ok = all(b < a for a, b in zip(mags, mags[1:])) and mags[-1] < 1e-6 * mags[0]
    return ok, "max |f| at z=" + ", ".join(f"{z:g}: {m:.2e}" for z, m in zip(zs, mags)), mags[-1]


def check_nr_slope(f: FrictionFn, tol=0.005):
    worst = 0.0
    for z in (0.5, 1.0, 2.0, 7.1):
        slope = f(1e-3, z)[Channel.XZ] / 1e-3
        worst = max(worst, _rel(slope, 2 * asy.I_closed_form(z)))
    return worst < tol, f"max rel dev {worst:.2e}", worst


def check_I_closed_form(cfg: QuadratureConfig):
    d = _rel(asy.I_closed_form(1.0), asy.I_integral(1.0, cfg))
    return d < 1e-8, f"rel dev {d:.2e}", d


def check_closed_form_identities():
    v = 0.37
    g = Kinematics(v).gamma
    devs = []
    for z in (0.1, 0.7, 3.0):
        lhs = asy.f_small_z(Channel.XZ, v, z) * g**4 * z**4
        devs.append(_rel(lhs, 16 * math.pi**4 * v / 15))
    # deep in the large-z regime the O(z^-2) corrections are below rounding
    z = 1e8
    limit = 2048 * math.pi**10 * v / 1485
    devs.append(_rel(asy.f_xz_nr(v, z) * z**10, limit))
    # the same constant is the v -> 0 slope of the large-z XZ closed form
    devs.append(_rel(asy.f_large_z(Channel.XZ, 1e-9, z) / 1e-9 * v * z**10, limit))
    worst = max(devs)
    return worst < 1e-12, f"max rel dev {worst:.2e}", worst


def check_series(cfg: QuadratureConfig):
    r = xz_series_crosscheck(0.5, 2.0, 8, cfg)
    return r.rel_dev < 0.005, f"rel dev {r.rel_dev:.2e}", r.rel_dev


def check_oracle(cfg: QuadratureConfig, tol=1e-3):
    worst = 0.0
    conv = 0.0
    for x in (0.5, 2.0, 8.0):
        for v, z in ((0.2, 0.5), (0.6, 5.0)):
            for ch in CHANNELS:
                r = fixed_omega_report(ch, x, Kinematics(v), z, cfg=cfg)
                worst = max(worst, r.rel_dev)
                conv = max(conv, r.oracle_conv)
    ok = worst < tol and conv < 3e-4
    return ok, f"max rel dev {worst:.2e}, oracle self-convergence {conv:.2e}", worst


def check_frame_invariance(n_points=200, seed=1):
    """g'(omega', k') from the lab-frame data equals g(omega', k') for the plate."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for v in (0.1, 0.5, 0.9, 0.99):
        for _ in range(n_points):
            w = rng.uniform(-5, 5)
            kx, ky = rng.uniform(-5, 5, size=2)
            args = SpectralArgs(w, kx, ky, rng.uniform(0.2, 2.0))
            if abs(args.k2 - w * w) < 1e-3 or abs(w + kx * v) < 1e-3:
                continue
            ref = greens_pc(args)
            got = lorentz_transform(args, v, PC)
            scale = max(np.max(np.abs(ref)), 1.0)
            worst = max(worst, float(np.max(np.abs(got - ref))) / scale)
    return worst < 1e-9, f"max dev {worst:.2e}", worst


def check_light_cone(seed=2):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(200):
        w = rng.uniform(-3, 3)
        k = abs(w) + rng.uniform(0.01, 3)
        phi = rng.uniform(0, 2 * math.pi)
        args = SpectralArgs(w, k * math.cos(phi), k * math.sin(phi), 0.7)
        worst = max(worst, float(np.max(np.abs(anti_hermitian(greens_pc, args)))))
        worst = max(worst, float(np.max(np.abs(anti_hermitian_pc(args)))))
    return worst < 1e-12, f"max |Img| outside the light cone {worst:.2e}", worst


def check_diaphanous():
    """eps mu = 1: rE + rH = 0, and no anti-Hermitian part for evanescent waves."""
    worst_sum = 0.0
    worst_img = 0.0
    for eps in (0.5, 2.0, 7.5):
        medium = SurfaceMedium(eps, 1.0 / eps)
        for w, kx, ky in ((1.0, 0.3, 0.2), (0.5, 2.0, 1.0), (-2.0, 0.1, 0.4), (0.3, -1.2, 0.5)):
            args = SpectralArgs(w, kx, ky, 1.0)
            kap, kap_p = propagation_wavenumbers(args, medium)
            r_e, r_h = reflection_coefficients(medium, kap, kap_p)
            worst_sum = max(worst_sum, abs(r_e + r_h))
            if args.k2 > w * w:
                img = anti_hermitian(lambda a: greens_planar(a, medium), args)
                worst_img = max(worst_img, float(np.max(np.abs(img))))
    ok = worst_sum < 1e-14 and worst_img < 1e-12
    return ok, f"max |rE + rH| {worst_sum:.2e}, max evanescent |Img| {worst_img:.2e}", worst_sum


def check_temperature_slope(cfg: QuadratureConfig, tol=0.02):
    cs = PRESETS["Cs"]
    Ts = np.geomspace(1000.0, 16100.0, 6)
    rows = sweep([(0.5, 10e-9, T) for T in Ts], cs.polarizability, CHANNELS, cfg)
    slope = loglog_slope(Ts, [r.F_total_N for r in rows])
    return abs(slope - 8) / 8 < tol, f"log-log slope {slope:.4f}", slope


def check_reference_points(cfg: QuadratureConfig):
    cs = PRESETS["Cs"]
    parts = []
    ok = True
    worst = 0.0
    got = {}
    for label, v, a, T, target, tol in REFERENCE_POINTS:
        b = force_si(cs.polarizability, Kinematics(v), ThermalGeometry(a, T), CHANNELS, cfg, cs)
        got[label] = b.F_total_N
        d = _rel(abs(b.F_total_N), target)
        worst = max(worst, d)
        ok &= d < tol
        parts.append(f"{label}: {abs(b.F_total_N):.4e} N ({d:+.2%})")
    far = force_si(cs.polarizability, Kinematics(0.5), ThermalGeometry(1e-6, 16100.0), CHANNELS, cfg)
    ratio = got["cs_v0.5_1nm"] / far.F_total_N
    ok &= abs(ratio - 2.0) / 2.0 < 0.15
    parts.append(f"|F(1 nm)|/|F(1 um)| = {ratio:.3f}")
    return ok, "; ".join(parts), worst


# -- suites -------------------------------------------------------------------


def _run(name, fn, *args):
    t0 = time.perf_counter()
    try:
        ok, detail, value = fn(*args)
    except Exception as exc:  # a crashing check is a failed check
        ok, detail, value = False, f"{type(exc).__name__}: {exc}", None
    return CheckResult(name, bool(ok), detail, value, time.perf_counter() - t0)


def run_suite(
    suite: str = "quick",
    f: FrictionFn | None = None,
    cfg: QuadratureConfig = QuadratureConfig(),
    progress: Callable[[CheckResult], None] | None = None,
) -> ValidationReport:
    """Run the quick or full validation suite.

    quick: zero velocity, fold invariance, asymptotic matching (v = 0.1) and
    the channel signs on a 3 x 3 grid. full: quick plus the full sign grid,
    asymptotic matching at v = 0.5, the oracle cross-checks, the frame and
    reflection identities, and the published Cs reference forces.
    """
    if suite not in ("quick", "full"):
        raise ValueError("suite must be 'quick' or 'full'")
    f = f or pipeline_f(cfg)
    report = ValidationReport(suite)
    plan = [
        ("zero_velocity", check_zero_velocity, f),
        ("fold_invariance", check_fold, cfg),
        ("asymptotic_matching_v0.1", check_asymptotics, f, (0.1,)),
        ("signs_quick_grid", check_signs, f, QUICK_GRID_V, QUICK_GRID_Z),
    ]
    if suite == "full":
        plan += [
            ("asymptotic_matching_v0.5", check_asymptotics, f, (0.5,)),
            ("signs_full_grid", check_signs, f, SIGN_GRID_V, SIGN_GRID_Z),
            ("zero_temperature_decay", check_zero_temperature, f),
            ("nr_slope", check_nr_slope, f),
            ("I_closed_form_vs_quadrature", check_I_closed_form, cfg),
            ("closed_form_identities", check_closed_form_identities),
            ("xz_series", check_series, cfg),
            ("fixed_omega_oracle", check_oracle, cfg),
            ("frame_invariance", check_frame_invariance),
            ("light_cone", check_light_cone),
            ("diaphanous", check_diaphanous),
            ("temperature_slope", check_temperature_slope, cfg),
            ("cs_reference_forces", check_reference_points, cfg),
        ]
    for name, fn, *args in plan:
        res = _run(name, fn, *args)
        report.checks.append(res)
        if progress is not None:
            progress(res)
    return report
