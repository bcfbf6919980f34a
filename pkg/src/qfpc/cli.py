"""Command-line interface: single points, sweeps, limits and self-validation.

    qfpc compute --atom Cs --v 0.5 --a-nm 10 --T-K 16100
    qfpc sweep --atom Cs --v 0.5 --a-nm 10 --axis T_K=1000:16100:12:log
    qfpc limits --v 0.5 --z 2
    qfpc validate --suite quick

Exit codes: 0 success, 1 validation failure, 2 usage error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import itertools
import json
import math
import sys
from dataclasses import dataclass, field, fields

import numpy as np

from . import asymptotics as asy
from .forces import PRESETS, AtomPolarizability, force_si, sweep, z_of
from .kernels import CHANNELS, HBAR_C_OVER_KB, Channel, Kinematics, ThermalGeometry
from .quadrature import QuadratureConfig, QuadratureError
from .validation import run_suite

__all__ = ["main", "RunConfig", "Axis", "CSV_HEADER", "UsageError"]

CSV_HEADER = (
    "v,a_m,T_K,z,f_xx,f_yy,f_zz,f_xz,f_iso,"
    "F_xx_N,F_yy_N,F_zz_N,F_xz_N,F_total_N,rel_err_est"
)
_CSV_FIELDS = CSV_HEADER.split(",")
MODES = ("compute", "sweep", "validate", "limits")
AXIS_NAMES = ("v", "a_nm", "T_K", "z")
V_MAX = 0.9999

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class Axis:
    name: str
    lo: float
    hi: float
    n: int
    spacing: str = "linear"

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise UsageError(f"unknown axis {self.name!r}; choose from {', '.join(AXIS_NAMES)}")
        if self.n < 1:
            raise UsageError("axis needs n >= 1")
        if self.spacing not in ("linear", "log"):
            raise UsageError("axis spacing must be 'linear' or 'log'")
        if self.spacing == "log" and not (self.lo > 0 and self.hi > 0):
            raise UsageError("log axis needs positive bounds")

    @classmethod
    def parse(cls, text: str) -> "Axis":
        """NAME=LO:HI:N[:log|linear]"""
        try:
            name, rng = text.split("=", 1)
            parts = rng.split(":")
            if len(parts) not in (3, 4):
                raise ValueError
            spacing = parts[3] if len(parts) == 4 else "linear"
            return cls(name.strip(), float(parts[0]), float(parts[1]), int(parts[2]), spacing)
        except ValueError as exc:
            if isinstance(exc, UsageError):
                raise
            raise UsageError(f"bad axis {text!r}; expected NAME=LO:HI:N[:log]") from None

    def values(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.lo, self.hi, self.n)
        return np.linspace(self.lo, self.hi, self.n)


@dataclass
class RunConfig:
    mode: str = "compute"
    atom: str | None = None
    alpha_A3: float | None = None
    alpha_xx_A3: float | None = None
    alpha_yy_A3: float | None = None
    alpha_zz_A3: float | None = None
    v: float | None = None
    a_nm: float | None = None
    T_K: float | None = None
    z: float | None = None
    channels: list[str] = field(default_factory=lambda: [c.value for c in CHANNELS])
    axes: list[Axis] = field(default_factory=list)
    rel_tol: float = 1e-8
    format: str | None = None
    output: str | None = None
    suite: str = "quick"

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        d = dict(d)
        if "axes" in d:
            d["axes"] = [a if isinstance(a, Axis) else Axis.parse(a) if isinstance(a, str) else Axis(**a) for a in d["axes"]]
        return cls(**d)

    def validate(self):
        if self.mode not in MODES:
            raise UsageError(f"mode must be one of {', '.join(MODES)}")
        if self.v is not None and not 0 <= self.v <= V_MAX:
            raise UsageError(f"v must lie in [0, {V_MAX}]")
        try:
            chans = [Channel(c.upper()) for c in self.channels]
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        if not chans:
            raise UsageError("at least one channel is required")
        if self.format not in (None, "csv", "json"):
            raise UsageError("format must be csv or json")
        if not self.rel_tol > 0:
            raise UsageError("rel-tol must be positive")
        if self.mode == "sweep" and not self.axes:
            raise UsageError("sweep needs at least one --axis")
        for ax in self.axes:
            if ax.name == "v" and not (0 <= min(ax.lo, ax.hi) and max(ax.lo, ax.hi) <= V_MAX):
                raise UsageError(f"v axis must stay within [0, {V_MAX}]")
        return chans

    def atom_spec(self):
        """(AtomPolarizability, preset or None) from the atom fields."""
        per_axis = (self.alpha_xx_A3, self.alpha_yy_A3, self.alpha_zz_A3)
        given = sum(x is not None for x in (self.atom, self.alpha_A3)) + any(a is not None for a in per_axis)
        if given > 1:
            raise UsageError("give exactly one of --atom, --alpha-A3 or the per-axis alphas")
        if self.atom is not None:
            if self.atom not in PRESETS:
                raise UsageError(f"unknown atom {self.atom!r}; known: {', '.join(PRESETS)}")
            p = PRESETS[self.atom]
            return p.polarizability, p
        if self.alpha_A3 is not None:
            return AtomPolarizability.isotropic(self.alpha_A3), None
        if any(a is not None for a in per_axis):
            if any(a is None for a in per_axis):
                raise UsageError("per-axis polarizability needs all of xx, yy and zz")
            return AtomPolarizability.from_A3(*per_axis), None
        raise UsageError("an atom is required: --atom, --alpha-A3 or --alpha-{xx,yy,zz}-A3")

    def echo(self) -> dict:
        d = {
            "mode": self.mode,
            "atom": self.atom,
            "alpha_A3": self.alpha_A3,
            "alpha_xx_A3": self.alpha_xx_A3,
            "alpha_yy_A3": self.alpha_yy_A3,
            "alpha_zz_A3": self.alpha_zz_A3,
            "v": self.v,
            "a_nm": self.a_nm,
            "T_K": self.T_K,
            "z": self.z,
            "channels": list(self.channels),
            "rel_tol": self.rel_tol,
        }
        return {k: val for k, val in d.items() if val is not None}


# -- formatting ---------------------------------------------------------------


def _fmt(x) -> str:
    x = float(x)
    return "nan" if math.isnan(x) else f"{x:.9e}"


def _csv_row(b) -> str:
    d = b.as_dict()
    return ",".join(_fmt(d[k]) for k in _CSV_FIELDS)


def _json_safe(d: dict) -> dict:
    return {
        k: (None if isinstance(val, float) and math.isnan(val) else val)
        for k, val in d.items()
    }


def _breakdown_json(b) -> dict:
    d = _json_safe(b.as_dict())
    d["z"] = b.z
    return d


def _emit(text: str, path: str | None):
    if path:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- commands -----------------------------------------------------------------


def _require(cfg: RunConfig, *names):
    missing = [n for n in names if getattr(cfg, n) is None]
    if missing:
        raise UsageError("missing required value(s): " + ", ".join("--" + n.replace("_", "-") for n in missing))


def _geometry(cfg: RunConfig) -> tuple[float, float]:
    """(a in meters, T in kelvin) from a_nm and T_K, or from one of them and z."""
    if cfg.z is not None:
        if cfg.a_nm is not None and cfg.T_K is None:
            a = cfg.a_nm * 1e-9
            return a, HBAR_C_OVER_KB / (2 * a * cfg.z)
        if cfg.T_K is not None and cfg.a_nm is None:
            return HBAR_C_OVER_KB / (2 * cfg.T_K * cfg.z), cfg.T_K
        raise UsageError("with --z give exactly one of --a-nm and --T-K")
    _require(cfg, "a_nm", "T_K")
    if not (cfg.a_nm > 0 and cfg.T_K > 0):
        raise UsageError("--a-nm and --T-K must be positive")
    return cfg.a_nm * 1e-9, cfg.T_K


def cmd_compute(cfg: RunConfig) -> int:
    chans = cfg.validate()
    atom, preset = cfg.atom_spec()
    _require(cfg, "v")
    a, T = _geometry(cfg)
    qcfg = QuadratureConfig(rel_tol=cfg.rel_tol)
    try:
        b = force_si(atom, Kinematics(cfg.v), ThermalGeometry(a, T), chans, qcfg, preset)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if (cfg.format or "json") == "csv":
        _emit(CSV_HEADER + "\n" + _csv_row(b) + "\n", cfg.output)
    else:
        out = {"inputs": cfg.echo(), **_breakdown_json(b)}
        _emit(json.dumps(out, indent=2) + "\n", cfg.output)
    return EXIT_OK


def sweep_grid(cfg: RunConfig) -> list[tuple[float, float, float]]:
    """(v, a [m], T [K]) points: Cartesian product of the axes in the given order.

    When z is set (as a scalar or an axis), exactly one of a_nm and T_K must
    also be set and the other one follows from z.
    """
    names = [ax.name for ax in cfg.axes]
    if len(set(names)) != len(names):
        raise UsageError("each axis may be given once")
    base = {"v": cfg.v, "a_nm": cfg.a_nm, "T_K": cfg.T_K, "z": cfg.z}
    if base["v"] is None and "v" not in names:
        raise UsageError("sweep needs --v or a v axis")
    grid = []
    for combo in itertools.product(*(ax.values() for ax in cfg.axes)):
        point = dict(base)
        point.update(zip(names, (float(c) for c in combo)))
        sub = RunConfig(a_nm=point["a_nm"], T_K=point["T_K"], z=point["z"])
        a, T = _geometry(sub)
        grid.append((point["v"], a, T))
    return grid


def cmd_sweep(cfg: RunConfig) -> int:
    chans = cfg.validate()
    atom, preset = cfg.atom_spec()
    if Channel.ISO in chans and not atom.is_isotropic:
        raise UsageError("ISO channel requires an isotropic atom")
    grid = sweep_grid(cfg)
    rows = sweep(grid, atom, chans, QuadratureConfig(rel_tol=cfg.rel_tol), preset)
    for r in rows:
        if not r.ok:
            print(f"warning: v={r.v:g} a={r.a_m:g} T={r.T_K:g}: {r.error}", file=sys.stderr)
    if (cfg.format or "csv") == "json":
        text = json.dumps([_breakdown_json(r) for r in rows], indent=2) + "\n"
    else:
        text = CSV_HEADER + "\n" + "".join(_csv_row(r) + "\n" for r in rows)
    _emit(text, cfg.output)
    return EXIT_OK


def cmd_limits(cfg: RunConfig) -> int:
    chans = [c for c in cfg.validate() if c is not Channel.ISO]
    _require(cfg, "v")
    if cfg.v == 0 or cfg.v > V_MAX:
        raise UsageError("limits need 0 < v < 1")
    z = cfg.z if cfg.z is not None and cfg.a_nm is None and cfg.T_K is None else z_of(*_geometry(cfg))
    out = {"v": cfg.v, "z": z, "channels": {}}
    for ch in chans:
        entry = {"small_z": asy.f_small_z(ch, cfg.v, z), "large_z": asy.f_large_z(ch, cfg.v, z)}
        if ch is Channel.XZ:
            entry["nonrelativistic"] = asy.f_xz_nr(cfg.v, z)
        out["channels"][ch.value] = entry
    out["note"] = "both regimes are reported; none is selected automatically"
    _emit(json.dumps(out, indent=2) + "\n", cfg.output)
    return EXIT_OK


def cmd_validate(cfg: RunConfig) -> int:
    if cfg.suite not in ("quick", "full"):
        raise UsageError("suite must be quick or full")

    def progress(res):
        flag = "PASS" if res.passed else "FAIL"
        print(f"[{flag}] {res.name}: {res.detail} ({res.seconds:.1f} s)", file=sys.stderr)

    report = run_suite(cfg.suite, cfg=QuadratureConfig(rel_tol=cfg.rel_tol), progress=progress)
    _emit(json.dumps(report.as_dict(), indent=2, default=float) + "\n", cfg.output)
    return EXIT_OK if report.passed else EXIT_FAIL


COMMANDS = {"compute": cmd_compute, "sweep": cmd_sweep, "limits": cmd_limits, "validate": cmd_validate}


# -- argument parsing ---------------------------------------------------------


def _common_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", metavar="PATH", help="JSON object with RunConfig fields; flags override it")
    p.add_argument("--atom", help="atom preset (%s)" % ", ".join(PRESETS))
    p.add_argument("--alpha-A3", type=float, dest="alpha_A3", help="isotropic static polarizability in cubic angstrom")
    p.add_argument("--alpha-xx-A3", type=float, dest="alpha_xx_A3")
    p.add_argument("--alpha-yy-A3", type=float, dest="alpha_yy_A3")
    p.add_argument("--alpha-zz-A3", type=float, dest="alpha_zz_A3")
    p.add_argument("--v", type=float, help="velocity in units of c")
    p.add_argument("--a-nm", type=float, dest="a_nm", help="atom-plate distance in nm")
    p.add_argument("--T-K", type=float, dest="T_K", help="temperature in kelvin")
    p.add_argument("--z", type=float, help="dimensionless inverse temperature (with one of --a-nm, --T-K)")
    p.add_argument("--channels", help="comma-separated subset of XX,YY,ZZ,XZ,ISO")
    p.add_argument("--rel-tol", type=float, dest="rel_tol")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--output", metavar="PATH")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(prog="qfpc", description="Thermal friction on an atom moving over a perfectly conducting plate.")
    sub = parser.add_subparsers(dest="mode", metavar="MODE")
    sub.add_parser("compute", parents=[common], help="forces at one (v, a, T) point")
    sp = sub.add_parser("sweep", parents=[common], help="CSV over a grid of points")
    sp.add_argument("--axis", action="append", dest="axes", metavar="NAME=LO:HI:N[:log]",
                    help="sweep axis over one of v, a_nm, T_K, z; repeatable")
    sub.add_parser("limits", parents=[common], help="small-z, large-z and nonrelativistic closed forms")
    vp = sub.add_parser("validate", parents=[common], help="run the self-check suite")
    vp.add_argument("--suite", choices=("quick", "full"))
    return parser


def resolve_config(ns: argparse.Namespace) -> RunConfig:
    data = {}
    if getattr(ns, "config", None):
        try:
            with open(ns.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {ns.config}: {exc}") from None
        if not isinstance(data, dict):
            raise UsageError("config file must hold a JSON object")
    overrides = {k: val for k, val in vars(ns).items() if val is not None and k != "config"}
    if "channels" in overrides:
        overrides["channels"] = [c.strip().upper() for c in overrides["channels"].split(",") if c.strip()]
    if "axes" in overrides:
        overrides["axes"] = [Axis.parse(a) for a in overrides["axes"]]
    if ns.mode is None and "mode" not in data:
        raise UsageError("a mode is required: " + ", ".join(MODES))
    merged = {**data, **overrides}
    return RunConfig.from_dict(merged)


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = resolve_config(ns)
        cfg.validate()
        return COMMANDS[cfg.mode](cfg)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"qfpc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ArithmeticError, RuntimeError, QuadratureError) as exc:
        print(f"qfpc: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
