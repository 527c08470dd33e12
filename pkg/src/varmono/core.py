"""Weighted statistics on finite samples.

A :class:`WeightedSample` is a finite random variable: values ``x_i`` taken
with probabilities ``alpha_i``.  All statistics here are population
statistics under those probabilities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidSample, NegativeValue, NonpositiveExponent


@dataclass(frozen=True)
class Tolerance:
    """Comparison tolerance: ``rel`` scales with the compared magnitude, ``abs`` is a floor."""

    rel: float = 1e-9
    abs: float = 1e-12

    def __post_init__(self):
        if not (self.rel > 0 and math.isfinite(self.rel)):
            raise ValueError(f"rel must be positive, got {self.rel}")
        if not (self.abs >= 0 and math.isfinite(self.abs)):
            raise ValueError(f"abs must be nonnegative, got {self.abs}")

    def threshold(self, scale: float) -> float:
        return self.rel * abs(scale) + self.abs


@dataclass(frozen=True, eq=False)
class WeightedSample:
    """Finite real values with strictly positive weights normalized to sum 1.

    ``weights=None`` means uniform weights.  Raw weights are divided by their
    sum at construction; any nonpositive or nonfinite weight is rejected.
    """

    values: np.ndarray
    weights: np.ndarray

    def __init__(self, values: Sequence[float], weights: Sequence[float] | None = None):
        x = np.array(values, dtype=np.float64).ravel()
        if x.size == 0:
            raise InvalidSample("sample needs at least one value")
        if not np.all(np.isfinite(x)):
            raise InvalidSample("values must be finite")
        if weights is None:
            w = np.full(x.size, 1.0 / x.size)
        else:
            w = np.array(weights, dtype=np.float64).ravel()
            if w.size != x.size:
                raise InvalidSample(f"got {x.size} values but {w.size} weights")
            if not np.all(np.isfinite(w)) or np.any(w <= 0):
                raise InvalidSample("weights must be finite and strictly positive")
            total = math.fsum(w)
            if not (total > 0 and math.isfinite(total)):
                raise InvalidSample("weights must have a positive finite sum")
            w = w / total
        x.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "values", x)
        object.__setattr__(self, "weights", w)

    @classmethod
    def _trusted(cls, values: np.ndarray, weights: np.ndarray) -> "WeightedSample":
        # weights already normalized by a previous construction; skip re-division
        obj = object.__new__(cls)
        x = np.array(values, dtype=np.float64)
        if not np.all(np.isfinite(x)):
            raise InvalidSample("values must be finite")
        x.setflags(write=False)
        object.__setattr__(obj, "values", x)
        object.__setattr__(obj, "weights", weights)
        return obj

    @property
    def n(self) -> int:
        return int(self.values.size)

    @property
    def alpha_min(self) -> float:
        return float(self.weights.min())

    @property
    def x_min(self) -> float:
        return float(self.values.min())

    @property
    def x_max(self) -> float:
        return float(self.values.max())

    def is_nonnegative(self) -> bool:
        return bool(np.all(self.values >= 0))

    def scaled(self, t: float) -> "WeightedSample":
        return WeightedSample._trusted(self.values * t, self.weights)

    def __eq__(self, other):
        if not isinstance(other, WeightedSample):
            return NotImplemented
        return np.array_equal(self.values, other.values) and np.array_equal(
            self.weights, other.weights
        )

    def __repr__(self):
        return f"WeightedSample(values={self.values.tolist()}, weights={self.weights.tolist()})"

    def to_dict(self) -> dict:
        return {"values": self.values.tolist(), "weights": self.weights.tolist()}


def require_nonnegative(sample: WeightedSample) -> None:
    if not sample.is_nonnegative():
        raise NegativeValue(f"values must be >= 0, found {sample.x_min!r}")


def require_positive_exponent(q: float, name: str = "exponent") -> None:
    if not (q > 0 and math.isfinite(q)):
        raise NonpositiveExponent(f"{name} must be positive and finite, got {q!r}")


_TINY_TOP = 2.0**-500


def _pow2_exponent(top: float) -> int:
    """Exponent k with 2**k * top in [0.5, 1); scaling by it is exact."""
    return -math.frexp(top)[1]


def mean_w(sample: WeightedSample) -> float:
    top = max(abs(sample.x_min), abs(sample.x_max))
    if 0 < top < _TINY_TOP:
        # products alpha_i * x_i would lose bits to underflow
        k = _pow2_exponent(top)
        return math.ldexp(float(np.dot(sample.weights, np.ldexp(sample.values, k))), -k)
    return float(np.dot(sample.weights, sample.values))


def variance_w(sample: WeightedSample) -> float:
    """Two-pass centered variance ``sum alpha_i (x_i - E x)^2``.

    The second pass subtracts ``(sum alpha_i d_i)^2``, which removes the
    first-order effect of rounding in the computed mean.
    """
    if sample.x_min == sample.x_max:
        return 0.0
    dev = sample.values - mean_w(sample)
    w = sample.weights
    resid = float(np.dot(w, dev))
    return max(float(np.dot(w, dev * dev)) - resid * resid, 0.0)


def geometric_mean_w(sample: WeightedSample) -> float:
    require_nonnegative(sample)
    if np.any(sample.values == 0):
        return 0.0
    return math.exp(float(np.dot(sample.weights, np.log(sample.values))))


def power_transform(sample: WeightedSample, s: float) -> WeightedSample:
    require_positive_exponent(s, "s")
    require_nonnegative(sample)
    if s == 1:
        return sample
    return WeightedSample._trusted(np.power(sample.values, s), sample.weights)


def lp_norm_w(sample: WeightedSample, q: float) -> float:
    """Weighted ``L^q`` norm ``(sum alpha_i x_i^q)^(1/q)``.

    The maximum is factored out before powering so large ``q`` or large
    values do not overflow.
    """
    require_positive_exponent(q, "q")
    require_nonnegative(sample)
    top = sample.x_max
    if top == 0:
        return 0.0
    inner = float(np.dot(sample.weights, np.power(sample.values / top, q)))
    return top * inner ** (1.0 / q)
