"""Special functions used by the friction kernels and the asymptotic series.

Cylindrical Bessel functions of order 0 and 1, half-integer order Bessel
functions, and the handful of Gamma/zeta values that appear in the closed-form
limits. Everything here is vectorized over numpy arrays and stateless.
"""
from __future__ import annotations

import math

import numpy as np

__all__ = [
    "bessel_j",
    "bessel_j01",
    "j0m1_j1x",
    "j0_minus_one",
    "j1_over_x",
    "bessel_half",
    "gamma_int",
    "zeta_even",
]

# crossovers for the J0/J1 evaluation scheme
_SERIES_MAX = 8.0
_HANKEL_MIN = 25.0
_MILLER_START = 56  # even, comfortably above _HANKEL_MIN + 30

_SERIES_TERMS = 40
_HANKEL_TERMS = 40


def _as_checked_array(x) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("Bessel argument must be finite")
    return arr


def _series(order: int, x: np.ndarray) -> np.ndarray:
    # sum_k (-1)^k (x/2)^(2k+order) / (k! (k+order)!)
    h2 = 0.25 * x * x
    term = np.ones_like(x) if order == 0 else 0.5 * x
    total = term.copy()
    for k in range(1, _SERIES_TERMS):
        term = -term * h2 / (k * (k + order))
        total += term
    return total


def _miller(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """J0 and J1 by backward recurrence, normalized with J0 + 2*sum J_2k = 1."""
    upper = np.zeros_like(x)
    cur = np.full_like(x, 1e-30)
    j0 = np.zeros_like(x)
    j1 = np.zeros_like(x)
    norm = np.zeros_like(x)
    for n in range(_MILLER_START, 0, -1):
        # cur = J_n, upper = J_{n+1}; produce J_{n-1}
        lower = (2.0 * n / x) * cur - upper
        upper, cur = cur, lower
        m = n - 1
        if m % 2 == 0 and m > 0:
            norm += 2.0 * cur
        if m == 1:
            j1 = cur.copy()
        big = np.abs(cur) > 1e200
        if np.any(big):
            scale = np.where(big, 1e-200, 1.0)
            upper *= scale
            cur *= scale
            norm *= scale
            j1 *= scale
    j0 = cur
    norm += j0
    return j0 / norm, j1 / norm


def _hankel_pq(order: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # asymptotic P and Q; summed until the smallest-x term drops below 1e-17
    mu = 4.0 * order * order
    p = np.ones_like(x)
    q = np.zeros_like(x)
    coef = 1.0
    inv = 1.0 / x
    inv_x_min = float(np.max(inv))
    ipow = np.ones_like(x)
    for k in range(1, _HANKEL_TERMS):
        coef *= (mu - (2 * k - 1) ** 2) / (8.0 * k)
        ipow *= inv
        # (-1)^(k//2) sign pattern for P (even k) and Q (odd k)
        c = -coef if (k // 2) % 2 else coef
        if k % 2 == 0:
            p += c * ipow
        else:
            q += c * ipow
        if abs(coef) * inv_x_min**k < 1e-17:
            break
    return p, q


# argument bands for the Hankel sums, so large arguments stop after few terms
_HANKEL_BANDS = (_HANKEL_MIN, 50.0, 100.0, 200.0, 1000.0, math.inf)


def _hankel_both(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """J0 and J1 from the Hankel expansion, sharing sin, cos and the envelope."""
    p0, q0, p1, q1 = (np.empty_like(x) for _ in range(4))
    for lo, hi in zip(_HANKEL_BANDS[:-1], _HANKEL_BANDS[1:]):
        sel = (x >= lo) & (x < hi)
        if np.any(sel):
            xs = x[sel]
            p0[sel], q0[sel] = _hankel_pq(0, xs)
            p1[sel], q1[sel] = _hankel_pq(1, xs)
    s, c = np.sin(x), np.cos(x)
    env = np.sqrt(1.0 / (math.pi * x))
    j0 = env * (p0 * (c + s) - q0 * (s - c))
    j1 = env * (p1 * (s - c) + q1 * (s + c))
    return j0, j1


def _hankel(order: int, x: np.ndarray) -> np.ndarray:
    return _hankel_both(x)[order]


def bessel_j01(x) -> tuple[np.ndarray, np.ndarray]:
    """J0(x) and J1(x) together for x >= 0, same scheme as bessel_j."""
    arr = _as_checked_array(x)
    if np.any(arr < 0):
        raise ValueError("Bessel argument must be nonnegative")
    arr = np.atleast_1d(arr)
    j0 = np.empty_like(arr)
    j1 = np.empty_like(arr)
    small = arr < _SERIES_MAX
    large = arr >= _HANKEL_MIN
    mid = ~(small | large)
    if np.any(small):
        j0[small] = _series(0, arr[small])
        j1[small] = _series(1, arr[small])
    if np.any(mid):
        j0[mid], j1[mid] = _miller(arr[mid])
    if np.any(large):
        j0[large], j1[large] = _hankel_both(arr[large])
    return j0, j1


def bessel_j(order: int, x):
    """Cylindrical Bessel function J_order(x) for order 0 or 1 and x >= 0.

    Power series below x = 8, Miller backward recurrence on [8, 25) and the
    Hankel asymptotic expansion beyond. Absolute error stays below ~1e-15
    (relative to the envelope sqrt(2/(pi x)) for large x).
    """
    if order not in (0, 1):
        raise ValueError("order must be 0 or 1")
    arr = _as_checked_array(x)
    if np.any(arr < 0):
        raise ValueError("Bessel argument must be nonnegative")
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    out = np.empty_like(arr)

    small = arr < _SERIES_MAX
    large = arr >= _HANKEL_MIN
    mid = ~(small | large)
    if np.any(small):
        out[small] = _series(order, arr[small])
    if np.any(mid):
        j0, j1 = _miller(arr[mid])
        out[mid] = j0 if order == 0 else j1
    if np.any(large):
        out[large] = _hankel(order, arr[large])
    return out[0] if scalar else out


def j0_minus_one(x):
    """J0(x) - 1 without cancellation at small x."""
    arr = np.atleast_1d(_as_checked_array(x))
    out = np.empty_like(arr)
    small = arr < 1.0
    xs = arr[small]
    h2 = 0.25 * xs * xs
    term = -h2
    total = term.copy()
    for k in range(2, 16):
        term = -term * h2 / (k * k)
        total += term
    out[small] = total
    out[~small] = bessel_j(0, arr[~small]) - 1.0
    return out[0] if np.ndim(x) == 0 else out


def j1_over_x(x):
    """J1(x)/x, continuous through x = 0 where it equals 1/2."""
    arr = np.atleast_1d(_as_checked_array(x))
    out = np.empty_like(arr)
    small = arr < 1.0
    xs = arr[small]
    h2 = 0.25 * xs * xs
    term = np.full_like(xs, 0.5)
    total = term.copy()
    for k in range(1, 16):
        term = -term * h2 / (k * (k + 1))
        total += term
    out[small] = total
    out[~small] = bessel_j(1, arr[~small]) / arr[~small]
    return out[0] if np.ndim(x) == 0 else out


def j0m1_j1x(x) -> tuple[np.ndarray, np.ndarray]:
    """(J0(x) - 1, J1(x)/x) from one Bessel evaluation; arrays of x's shape."""
    arr = np.atleast_1d(_as_checked_array(x))
    shape = arr.shape
    arr = arr.ravel()
    j0m1 = np.empty_like(arr)
    j1x = np.empty_like(arr)
    small = arr < 1.0
    if np.any(small):
        j0m1[small] = j0_minus_one(arr[small])
        j1x[small] = j1_over_x(arr[small])
    big = ~small
    if np.any(big):
        xb = arr[big]
        j0, j1 = bessel_j01(xb)
        j0m1[big] = j0 - 1.0
        j1x[big] = j1 / xb
    return j0m1.reshape(shape), j1x.reshape(shape)


# -- half-integer order -------------------------------------------------------


def _half_power_series(n: int, x: np.ndarray) -> np.ndarray:
    nu = n + 0.5
    h = 0.5 * x
    term = np.exp(nu * np.log(h) - math.lgamma(nu + 1.0))
    total = term.copy()
    for k in range(1, 40):
        term = -term * h * h / (k * (k + nu))
        total += term
    return total


def _half_finite_series(n: int, x: np.ndarray) -> np.ndarray:
    """Closed finite form of J_{n+1/2}, Kahan-compensated over the k sums."""

    def kahan(terms):
        total = np.zeros_like(x)
        comp = np.zeros_like(x)
        for t in terms:
            y = t - comp
            s = total + y
            comp = (s - total) - y
            total = s
        return total

    inv2x = 1.0 / (2.0 * x)
    sin_terms = []
    for k in range(n // 2 + 1):
        c = (-1) ** k * math.factorial(n + 2 * k) / (
            math.factorial(2 * k) * math.factorial(n - 2 * k)
        )
        sin_terms.append(c * inv2x ** (2 * k))
    cos_terms = []
    for k in range((n - 1) // 2 + 1 if n >= 1 else 0):
        c = (-1) ** k * math.factorial(n + 2 * k + 1) / (
            math.factorial(2 * k + 1) * math.factorial(n - 2 * k - 1)
        )
        cos_terms.append(c * inv2x ** (2 * k + 1))
    # sin/cos of x - n*pi/2 by exact quarter-turn rotation
    s, c = np.sin(x), np.cos(x)
    shift = n % 4
    sin_phase = (s, -c, -s, c)[shift]
    cos_phase = (c, s, -c, -s)[shift]
    return np.sqrt(2.0 / (math.pi * x)) * (
        sin_phase * kahan(sin_terms) + cos_phase * kahan(cos_terms)
    )


def _half_miller(n: int, x: np.ndarray) -> np.ndarray:
    """Backward recurrence down to orders 1/2 and -1/2, normalized to the
    elementary forms of J_{1/2} and J_{-1/2}."""
    top = n + int(np.max(x)) + 40
    upper = np.zeros_like(x)
    cur = np.full_like(x, 1e-30)
    wanted = np.zeros_like(x)
    # cur holds J_{m+1/2}; recurrence J_{nu-1} = (2 nu / x) J_nu - J_{nu+1}
    for m in range(top, -1, -1):
        if m == n:
            wanted = cur.copy()
        nu = m + 0.5
        lower = (2.0 * nu / x) * cur - upper
        upper, cur = cur, lower
        big = np.abs(cur) > 1e200
        if np.any(big):
            scale = np.where(big, 1e-200, 1.0)
            upper *= scale
            cur *= scale
            wanted *= scale
    # upper = J_{1/2} (unnormalized), cur = J_{-1/2} (unnormalized)
    pref = np.sqrt(2.0 / (math.pi * x))
    true_half = pref * np.sin(x)
    true_mhalf = pref * np.cos(x)
    scale = (true_half * upper + true_mhalf * cur) / (upper * upper + cur * cur)
    return wanted * scale


def bessel_half(n: int, x):
    """J_{n+1/2}(x) for integer n >= 0 and x > 0.

    The finite trigonometric series is used where its terms do not cancel
    (x >= max(2, n^2)); the ascending power series below x = 2; Miller
    backward recurrence in between.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    arr = _as_checked_array(x)
    if np.any(arr <= 0):
        raise ValueError("half-integer Bessel argument must be positive")
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    out = np.empty_like(arr)

    if n == 0:
        out[:] = _half_finite_series(0, arr)
    else:
        fs_min = max(2.0, float(n * n))
        low = arr < 2.0
        high = arr >= fs_min
        mid = ~(low | high)
        if np.any(low):
            out[low] = _half_power_series(n, arr[low])
        if np.any(high):
            out[high] = _half_finite_series(n, arr[high])
        if np.any(mid):
            out[mid] = _half_miller(n, arr[mid])
    return out[0] if scalar else out


# -- Gamma and zeta ------------------------------------------------------------

_ZETA_EVEN = {
    2: math.pi**2 / 6,
    4: math.pi**4 / 90,
    6: math.pi**6 / 945,
    8: math.pi**8 / 9450,
    10: math.pi**10 / 93555,
    12: 691 * math.pi**12 / 638512875,
}


def gamma_int(n: int) -> float:
    """Gamma(n) = (n-1)! for positive integer n."""
    if int(n) != n or n < 1:
        raise ValueError("gamma_int requires a positive integer")
    return float(math.factorial(int(n) - 1))


def zeta_even(s: int) -> float:
    """Riemann zeta at the even integers 2..12 from the Bernoulli closed forms."""
    try:
        return _ZETA_EVEN[s]
    except KeyError:
        raise ValueError(f"zeta_even supports s in {sorted(_ZETA_EVEN)}, got {s}") from None
