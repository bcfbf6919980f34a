"""Fixed-panel Gauss-Legendre integration with a certified exponential tail.

The x-integrals of the friction kernels oscillate with period 2 pi and are
damped by a Bose factor, so they are summed over fixed panels of width pi
(narrower when the damping is fast) until an analytic bound on the remaining tail drops below tail_epsilon times
the accumulated value.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, NamedTuple

import numpy as np

from .kernels import Kinematics

__all__ = [
    "QuadratureConfig",
    "QuadratureError",
    "NonConvergenceError",
    "XIntegral",
    "gauss_legendre",
    "gl_nodes",
    "integrate_u",
    "integrate_xu",
    "u_order",
    "integrate_x",
    "tail_bound",
]

MAX_PANELS = 1_000_000
_BATCH = 16
_DECAYS_PER_PANEL = 4.0


class QuadratureError(ArithmeticError):
    """A sampled integrand value was not finite."""


class NonConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-8
    abs_tol: float = 1e-300
    gl_order_u: int = 64
    gl_order_panel: int = 32
    panel_width: float = math.pi
    tail_epsilon: float = 1e-16

    def __post_init__(self):
        if min(self.rel_tol, self.abs_tol, self.tail_epsilon, self.panel_width) <= 0:
            raise ValueError("tolerances and panel width must be positive")
        if self.gl_order_u < 2 or self.gl_order_panel < 2:
            raise ValueError("Gauss-Legendre orders must be >= 2")


_EIG_MAX_ORDER = 128


def _legendre_p(n: int, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # P_{n-1}(t), P_n(t) by the three-term recurrence
    p0 = np.ones_like(t)
    p1 = t.copy()
    for k in range(2, n + 1):
        p0, p1 = p1, ((2 * k - 1) * t * p1 - (k - 1) * p0) / k
    return p0, p1


def _legendre_newton(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre rule on [-1, 1] by Newton iteration on P_n.

    O(n^2) work, against the O(n^3) eigenvalue route, which matters once the
    u-rule grows to thousands of nodes.
    """
    n = order
    t = np.cos(np.pi * (np.arange(1, n + 1) - 0.25) / (n + 0.5))
    for _ in range(50):
        p0, p1 = _legendre_p(n, t)
        dp = n * (t * p1 - p0) / (t * t - 1.0)
        step = p1 / dp
        t = t - step
        if np.max(np.abs(step)) < 1e-15:
            break
    p0, p1 = _legendre_p(n, t)
    dp = n * (t * p1 - p0) / (t * t - 1.0)
    w = 2.0 / ((1.0 - t * t) * dp * dp)
    return t[::-1].copy(), w[::-1].copy()


@lru_cache(maxsize=None)
def gl_nodes(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [0, 1]."""
    if order <= _EIG_MAX_ORDER:
        t, w = np.polynomial.legendre.leggauss(order)
    else:
        t, w = _legendre_newton(order)
    nodes = 0.5 * (t + 1.0)
    weights = 0.5 * w
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return nodes, weights


def _check_finite(vals, nodes):
    bad = ~np.isfinite(vals)
    if np.any(bad):
        idx = np.argwhere(bad)[0]
        node = nodes[tuple(idx)] if np.ndim(nodes) == np.ndim(vals) else nodes.flat[idx[-1]]
        raise QuadratureError(f"non-finite integrand value at node {float(node)!r}")


def gauss_legendre(order: int, f: Callable, lo: float, hi: float) -> float:
    """order-point Gauss-Legendre rule for a vectorized f on [lo, hi]."""
    if not lo < hi:
        raise ValueError("need lo < hi")
    t, w = gl_nodes(order)
    x = lo + (hi - lo) * t
    vals = np.asarray(f(x), dtype=float)
    _check_finite(vals, x)
    return float((hi - lo) * (vals @ w))


def integrate_u(f: Callable, cfg: QuadratureConfig = QuadratureConfig()):
    """Integrate over u in [0, 1] with the fixed gl_order_u rule.

    ``f`` receives the node array (shape (n,)) and may return an array whose
    last axis runs over the nodes; the result has that axis contracted.
    """
    u, w = gl_nodes(cfg.gl_order_u)
    vals = np.asarray(f(u), dtype=float)
    _check_finite(vals, np.broadcast_to(u, vals.shape))
    out = vals @ w
    return float(out) if np.ndim(out) == 0 else out


def u_order(x, base: int, span=1.0):
    """u-rule order for frequency x over a u-interval where sqrt(1 - u^2)
    changes by ``span``: base, doubled until it exceeds x span + 32.

    The Bessel factors oscillate about x span / pi times there, so the node
    count has to grow linearly in x. The requirement does not depend on base,
    which only sets the floor and the power-of-two ladder.
    """
    need = np.asarray(x, dtype=float) * span + 32.0
    k = np.maximum(0, np.ceil(np.log2(need / base))).astype(int)
    return base * 2**k


def integrate_xu(f: Callable, x, cfg: QuadratureConfig = QuadratureConfig(), u_lo=None) -> np.ndarray:
    """int_{u_lo}^1 f(x, u) du for each x, with an x-dependent Gauss-Legendre order.

    ``f(x, u)`` is called with arrays of shapes (k, 1) and (k, n) and
    returns (k, n), or (m, k, n) for m components at once; the result then
    has shape (k,) or (m, k). ``u_lo`` (per x, default 0) lets the caller
    drop a part of [0, 1] where the integrand is negligible.
    """
    x = np.asarray(x, dtype=float)
    lo = np.zeros_like(x) if u_lo is None else np.broadcast_to(np.asarray(u_lo, dtype=float), x.shape)
    span = np.sqrt((1.0 - lo) * (1.0 + lo))
    out = None
    orders = u_order(x, cfg.gl_order_u, span)
    for order in np.unique(orders):
        sel = orders == order
        t, w = gl_nodes(int(order))
        width = (1.0 - lo[sel])[:, None]
        u = lo[sel][:, None] + width * t[None, :]
        vals = np.asarray(f(x[sel][:, None], u), dtype=float)
        _check_finite(vals, np.broadcast_to(u, vals.shape))
        if out is None:
            out = np.empty(vals.shape[:-2] + x.shape)
        out[..., sel] = np.sum(vals * (width * w[None, :]), axis=-1)
    return out


class XIntegral(NamedTuple):
    """Result of integrate_x; value and tail_bound are arrays for vector f."""

    value: float | np.ndarray
    tail_bound: float | np.ndarray
    panels: int
    x_max: float


def tail_bound(c: float, rate: float, x_max: float, power: int = 7) -> float:
    """Bound on int_{x_max}^inf c x^power e^{-rate x} dx (upper incomplete Gamma)."""
    if c == 0.0:
        return 0.0
    y = rate * x_max
    # Gamma(p+1, y) = p! e^{-y} sum_{k<=p} y^k / k!
    s = sum(y**k / math.factorial(k) for k in range(power + 1))
    log_val = math.log(c) + math.lgamma(power + 1) - y + math.log(s) - (power + 1) * math.log(rate)
    return math.exp(log_val) if log_val < 700 else math.inf


def integrate_x(
    f: Callable,
    kin: Kinematics | None = None,
    z: float | None = None,
    cfg: QuadratureConfig = QuadratureConfig(),
    *,
    rate: float | None = None,
    power: int = 7,
) -> XIntegral:
    """Integrate f over (0, inf) panel by panel.

    f must be vectorized and bounded by C x^power e^{-rate x} at large x. By
    default rate = gamma (1 - v) z, the slowest Bose decay of the friction
    kernels. The constant C is re-estimated on every panel from its largest
    |f| / (x^power e^{-rate x}), and summation stops once the tail bound falls
    below max(tail_epsilon |value|, abs_tol).
    """
    if rate is None:
        if kin is None or z is None:
            raise ValueError("either rate or (kin, z) is required")
        rate = kin.gamma * (1.0 - kin.v) * z
    if not rate > 0:
        raise ValueError("decay rate must be positive")
    t, w = gl_nodes(cfg.gl_order_panel)
    # a panel never spans more than a few e-foldings of the Bose decay
    width = min(cfg.panel_width, _DECAYS_PER_PANEL / rate)
    # past the maximum of x^power e^{-rate x} before the bound is trusted
    x_min_stop = (power + 1.0) / rate

    probe = None
    total = comp = 0.0
    panel = 0
    while panel < MAX_PANELS:
        starts = (panel + np.arange(_BATCH)) * width
        xs = starts[:, None] + width * t[None, :]
        raw = np.asarray(f(xs.ravel()), dtype=float)
        if probe is None:
            # scalar integrands are handled as a single component
            probe = raw.ndim == 1
            total = comp = np.zeros(1 if probe else raw.shape[0])
        vals = raw.reshape((-1,) + xs.shape)
        _check_finite(vals, np.broadcast_to(xs, vals.shape))
        sums = width * (vals @ w)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore", under="ignore"):
            log_env = power * np.log(xs) - rate * xs
            ratio = np.abs(vals) * np.exp(-log_env)
        ratio = np.where(np.isfinite(ratio), ratio, 0.0)
        for i in range(_BATCH):
            # Kahan summation keeps the fixed-order reduction exact to rounding
            y = sums[:, i] - comp
            s = total + y
            comp = (s - total) - y
            total = s
            panel += 1
            x_end = starts[i] + width
            if x_end < x_min_stop:
                continue
            c = ratio[:, i].max(axis=-1)
            bound = np.array([tail_bound(float(cj), rate, x_end, power) for cj in c])
            if np.all(bound <= np.maximum(cfg.tail_epsilon * np.abs(total), cfg.abs_tol)):
                if probe:
                    return XIntegral(float(total[0]), float(bound[0]), panel, float(x_end))
                return XIntegral(total.copy(), bound, panel, float(x_end))
    where = f"v={kin.v:g}, z={z:g}, " if kin is not None and z is not None else ""
    raise NonConvergenceError(
        f"tail criterion not met within {MAX_PANELS} panels ({where}rate={rate:g})"
    )
