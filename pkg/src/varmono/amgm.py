"""Variance bounds on the gap between weighted arithmetic and geometric means.

Three bound families are evaluated side by side:

* ``thm4``: ``Var(X^(r/2))^(1/r) / (1 - alpha_min) <= gap <= Var(X^(s/2))^(1/s) / alpha_min``
  for ``r`` in (0, 1] and ``s >= 1``;
* ``cf`` (Cartwright-Field): ``Var(X) / (2 X_max) <= gap <= Var(X) / (2 X_min)``,
  only when ``X_min > 0``;
* ``a2``: ``Var(X^(1/2)) <= gap``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np

from .core import (
    _TINY_TOP,
    WeightedSample,
    _pow2_exponent,
    geometric_mean_w,
    mean_w,
    require_nonnegative,
    variance_w,
)
from .errors import ExponentRange, NonpositiveValue, TooFewPoints
from .power_variance import log_variance_of_powers

# Taylor coefficients 1/k! for k = 2..21 of exp(d) - 1 - d
_PHI_COEFFS = [1.0 / math.factorial(k) for k in range(2, 22)]


def _phi(d: np.ndarray) -> np.ndarray:
    """``exp(d) - 1 - d`` without cancellation for small ``|d|``."""
    small = np.abs(d) < 0.5
    ds = np.where(small, d, 0.0)
    acc = np.zeros_like(ds)
    for c in reversed(_PHI_COEFFS):
        acc = acc * ds + c
    series = acc * ds * ds
    with np.errstate(over="ignore"):
        direct = np.expm1(d) - d
    return np.where(small, series, direct)


def _require_pair(sample: WeightedSample) -> None:
    if sample.n < 2:
        raise TooFewPoints("need at least 2 points")


def amgm_gap(sample: WeightedSample) -> float:
    """``E X - Pi X`` for nonnegative ``X``, computed as ``G * sum alpha_i phi(ln(x_i / G))``.

    Every term is nonnegative so the result keeps full relative accuracy even
    when the two means agree to many digits.
    """
    require_nonnegative(sample)
    _require_pair(sample)
    x, w = sample.values, sample.weights
    if sample.x_min == sample.x_max:
        return 0.0
    if np.any(x == 0):
        return mean_w(sample)
    if sample.x_max < _TINY_TOP:
        # homogeneous of degree one; lift out of the subnormal range exactly
        k = _pow2_exponent(sample.x_max)
        return math.ldexp(amgm_gap(WeightedSample._trusted(np.ldexp(x, k), w)), -k)
    g = geometric_mean_w(sample)
    m = mean_w(sample)
    if m - g >= 0.5 * m:
        # no cancellation to fear, and exp of large log-ratios would cost accuracy
        return m - g
    ratio = x / g
    near = np.abs(ratio - 1.0) <= 0.5
    # log(x) - log(g) away from 1: x / g may underflow for subnormal x
    d = np.where(near, np.log1p(np.where(near, (x - g) / g, 0.0)), np.log(x) - math.log(g))
    # re-centre: the exact geometric mean satisfies sum alpha_i d_i = 0
    shift = math.fsum(w * d)
    d = d - shift
    g = g * math.exp(shift)
    gap = g * math.fsum(w * _phi(d))
    if not math.isfinite(gap):
        gap = m - g
    return max(gap, 0.0)


class Bounds(NamedTuple):
    lower: float
    upper: float


def thm4_bounds(sample: WeightedSample, r: float = 1.0, s: float = 1.0) -> Bounds:
    if not (0 < r <= 1):
        raise ExponentRange(f"r must lie in (0, 1], got {r!r}")
    if not (s >= 1 and math.isfinite(s)):
        raise ExponentRange(f"s must lie in [1, inf), got {s!r}")
    require_nonnegative(sample)
    _require_pair(sample)
    log_var = log_variance_of_powers(sample, [r / 2, s / 2])
    lower = math.exp(log_var[0] / r) / (1.0 - sample.alpha_min)
    upper = math.exp(log_var[1] / s) / sample.alpha_min
    return Bounds(lower, upper)


def cartwright_field_bounds(sample: WeightedSample) -> Bounds:
    if np.any(sample.values <= 0):
        raise NonpositiveValue("Cartwright-Field bounds require every value > 0")
    _require_pair(sample)
    # degree-one homogeneous: evaluate with x_max in [0.5, 1) so Var neither
    # underflows nor overflows, then undo the exact power-of-two scaling
    k = _pow2_exponent(sample.x_max)
    scaled = WeightedSample._trusted(np.ldexp(sample.values, k), sample.weights)
    lower = math.ldexp(variance_w(scaled) / (2 * scaled.x_max), -k)
    return Bounds(lower, lower * (sample.x_max / sample.x_min))


def a2_lower_bound(sample: WeightedSample) -> float:
    """``Var(X^(1/2))``, a lower bound for the gap."""
    require_nonnegative(sample)
    _require_pair(sample)
    return math.exp(log_variance_of_powers(sample, [0.5])[0])


@dataclass(frozen=True)
class AmGmGapReport:
    gap: float
    lower_thm4: float
    upper_thm4: float
    r: float
    s: float
    lower_cf: float | None
    upper_cf: float | None
    lower_a2: float
    alpha_min: float
    x_min: float
    x_max: float
    n: int
    tightest_lower: str
    tightest_upper: str

    def to_dict(self) -> dict:
        return asdict(self)


def _tightest(candidates: list[tuple[str, float | None]], pick) -> str:
    # candidates are listed in tie-break order; strict improvement wins
    best_name, best = None, None
    for name, value in candidates:
        if value is None:
            continue
        if best is None or pick(value, best):
            best_name, best = name, value
    return best_name


def full_report(sample: WeightedSample, r: float = 1.0, s: float = 1.0) -> AmGmGapReport:
    thm4 = thm4_bounds(sample, r, s)
    cf = cartwright_field_bounds(sample) if sample.x_min > 0 else None
    a2 = a2_lower_bound(sample)
    lower_cf = cf.lower if cf else None
    upper_cf = cf.upper if cf else None
    return AmGmGapReport(
        gap=amgm_gap(sample),
        lower_thm4=thm4.lower,
        upper_thm4=thm4.upper,
        r=float(r),
        s=float(s),
        lower_cf=lower_cf,
        upper_cf=upper_cf,
        lower_a2=a2,
        alpha_min=sample.alpha_min,
        x_min=sample.x_min,
        x_max=sample.x_max,
        n=sample.n,
        tightest_lower=_tightest(
            [("thm4", thm4.lower), ("cf", lower_cf), ("a2", a2)], lambda a, b: a > b
        ),
        tightest_upper=_tightest([("thm4", thm4.upper), ("cf", upper_cf)], lambda a, b: a < b),
    )
