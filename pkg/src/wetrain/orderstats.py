"""Expected maximum of i.i.d. Erlang variates.

``G(n1, m)`` is the mean of the largest of ``n1`` independent squared norms
of ``m``-dimensional standard complex Gaussian vectors, i.e. the maximum of
``n1`` i.i.d. Erlang(m, rate 1) variables. Two independent routes:

* an exact alternating binomial series over multinomial compositions,
  accumulated in rationals (small ``n1`` only, the cancellation is severe);
* adaptive quadrature of the survival function of the maximum, with an
  analytic bound on the truncated tail.
"""
from __future__ import annotations

import enum
import functools
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import integrate

from .errors import ConvergenceFailure, LimitExceeded

SERIES_LIMIT = 12
DEFAULT_TOL = 1e-9


class GMethod(str, enum.Enum):
    EXACT_SERIES = "exact_series"
    QUADRATURE = "quadrature"


@dataclass(frozen=True)
class GValue:
    value: float
    method: GMethod
    abs_error_bound: float = 0.0

    def __float__(self):
        return self.value


def _check_query(n1, m):
    if int(n1) != n1 or n1 < 1:
        raise ValueError(f"n1 must be a positive integer, got {n1}")
    if int(m) != m or m < 1:
        raise ValueError(f"m must be a positive integer, got {m}")
    return int(n1), int(m)


# ---------------------------------------------------------------------------
# Erlang survival function
# ---------------------------------------------------------------------------

def log_erlang_survival(v: float, m: int) -> float:
    """log P(V > v) for V ~ Erlang(m, 1), accumulated in the log domain."""
    if v < 0:
        raise ValueError("v must be nonnegative")
    if v == 0:
        return 0.0
    logv = math.log(v)
    # terms k*log(v) - log(k!) peak at k = min(m-1, floor(v))
    k_peak = min(m - 1, int(v))
    peak = k_peak * logv - math.lgamma(k_peak + 1)
    acc = math.fsum(math.exp(k * logv - math.lgamma(k + 1) - peak) for k in range(m))
    return peak + math.log(acc) - v


def erlang_survival(v: float, m: int) -> float:
    """sum_{k<m} e^{-v} v^k / k!  (unit rate)."""
    return math.exp(log_erlang_survival(v, m))


def _log_erlang_cdf(v, m):
    """log P(V <= v), accurate both for tiny CDF values and CDF near one."""
    if v == 0:
        return -math.inf
    if v >= m:
        return math.log1p(-erlang_survival(v, m))
    # complementary series e^{-v} sum_{k>=m} v^k/k!, terms decrease since v < m
    logv = math.log(v)
    lead = m * logv - math.lgamma(m + 1)
    acc, term, k = 1.0, 1.0, m
    while term > 1e-17 * acc:
        k += 1
        term *= v / k
        acc += term
    return lead + math.log(acc) - v


def _tail_bound(v, n1, m):
    """Upper bound on the integral of P(max > t) over t > v.

    P(max > t) <= n1 S_m(t), and the integral of S_m over (v, inf) equals
    sum_{j=1..m} S_j(v).
    """
    return n1 * math.fsum(erlang_survival(v, j) for j in range(1, m + 1))


# ---------------------------------------------------------------------------
# Exact series
# ---------------------------------------------------------------------------

def _compositions(n, parts):
    """All tuples of ``parts`` nonnegative ints summing to ``n``."""
    if parts == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in _compositions(n - first, parts - 1):
            yield (first,) + rest


@functools.lru_cache(maxsize=None)
def _series_coefficient(n: int, m: int) -> Fraction:
    """c_n as an exact rational.

    For each composition k_0 + ... + k_{m-1} = n with s = sum_j j*k_j:
        n!/prod(k_j!) * s!/prod((j!)^k_j) / n^(1+s)
    Both factored parts are integers, so terms are grouped by s and only the
    final division is rational.
    """
    fact = [math.factorial(i) for i in range(max(n, (m - 1) * n) + 1)]
    by_power: dict[int, int] = {}
    for ks in _compositions(n, m):
        s = 0
        multinom = fact[n]
        shape = 1
        for j, kj in enumerate(ks):
            s += j * kj
            multinom //= fact[kj]
            shape *= fact[j] ** kj
        by_power[s] = by_power.get(s, 0) + multinom * (fact[s] // shape)
    return sum((Fraction(num, n ** (1 + s)) for s, num in by_power.items()), Fraction(0))


def g_exact_series_fraction(n1: int, m: int, series_limit: int = SERIES_LIMIT) -> Fraction:
    n1, m = _check_query(n1, m)
    if n1 > series_limit:
        raise LimitExceeded(f"n1={n1} exceeds series limit {series_limit}; use quadrature")
    total = Fraction(0)
    for n in range(1, n1 + 1):
        sign = 1 if n % 2 else -1
        total += sign * math.comb(n1, n) * _series_coefficient(n, m)
    return total


def g_exact_series(n1: int, m: int, series_limit: int = SERIES_LIMIT) -> GValue:
    """Exact alternating-sum evaluation, converted to float at the very end."""
    value = g_exact_series_fraction(n1, m, series_limit)
    return GValue(float(value), GMethod.EXACT_SERIES, 0.0)


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------

def _max_quantile(prob, n1, m):
    """v with P(max <= v) = prob, by bisection on the log-CDF."""
    target = math.log(prob) / n1
    lo, hi = 0.0, float(m)
    while _log_erlang_cdf(hi, m) < target:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _log_erlang_cdf(mid, m) < target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-12 * hi:
            break
    return hi


def g_quadrature(n1: int, m: int, tol: float = DEFAULT_TOL, limit: int = 500) -> GValue:
    """Integrate P(max > v) = 1 - F(v)^n1 over [0, v_max] plus a tail bound.

    ``v_max`` is grown until the analytic tail bound falls below a tenth of
    the absolute budget ``tol * m`` (G >= m, so this is relative accuracy).
    """
    n1, m = _check_query(n1, m)
    if not tol > 0:
        raise ValueError("tol must be positive")
    budget = tol * m

    def survival_of_max(v):
        log_cdf = _log_erlang_cdf(v, m)
        return -math.expm1(n1 * log_cdf)

    v_max = _max_quantile(0.5, n1, m)
    while _tail_bound(v_max, n1, m) >= budget / 10:
        v_max *= 1.25
    tail = _tail_bound(v_max, n1, m)

    breaks = sorted({_max_quantile(pr, n1, m) for pr in (1e-6, 0.01, 0.5, 0.99)})
    breaks = [b for b in breaks if 0 < b < v_max]

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        value, abserr, info, *rest = integrate.quad(
            survival_of_max, 0.0, v_max, points=breaks or None,
            epsabs=budget / 4, epsrel=tol / 4, limit=limit, full_output=1,
        )
    ier = rest[0] if rest and isinstance(rest[0], str) else None
    bound = abserr + tail
    if not math.isfinite(value) or bound > max(budget, tol * value):
        raise ConvergenceFailure(
            f"G({n1},{m}) quadrature reached error bound {bound:.3g} > {budget:.3g}"
            + (f": {ier}" if ier else "")
        )
    return GValue(value, GMethod.QUADRATURE, bound)


# ---------------------------------------------------------------------------
# Dispatch
# ---------------------------------------------------------------------------

@functools.lru_cache(maxsize=4096)
def g(n1: int, m: int) -> GValue:
    """G(n1, m): exact series for n1 <= SERIES_LIMIT, quadrature beyond."""
    n1, m = _check_query(n1, m)
    if n1 == 1:
        return GValue(float(m), GMethod.EXACT_SERIES, 0.0)
    if n1 <= SERIES_LIMIT:
        return g_exact_series(n1, m)
    return g_quadrature(n1, m, DEFAULT_TOL)


def g_value(n1: int, m: int) -> float:
    return g(n1, m).value


def sample_max_erlang(n1: int, m: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """Draws of max of ``n1`` Erlang(m, 1) variates (Monte Carlo oracle)."""
    out = np.empty(size)
    chunk = max(1, 2_000_000 // n1)
    for start in range(0, size, chunk):
        stop = min(size, start + chunk)
        out[start:stop] = rng.gamma(m, 1.0, size=(stop - start, n1)).max(axis=1)
    return out
