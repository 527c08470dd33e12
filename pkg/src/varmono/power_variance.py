"""The power variance ``V(s) = Var(X^s)^(1/s)`` and its monotonicity in ``s``.

``V`` is homogeneous of order 2 and nondecreasing in ``s`` for nonnegative
``X``.  Every comparison is done on ``log V`` because ``V`` underflows
quickly as ``s`` shrinks; a zero variance maps to ``-inf``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .core import (
    Tolerance,
    WeightedSample,
    lp_norm_w,
    require_nonnegative,
    require_positive_exponent,
)
from .errors import ExponentOrder, NonpositiveExponent, ZeroSample

NEG_INF = float("-inf")


def default_grid() -> np.ndarray:
    """34 log-spaced exponents from 0.05 to 1, endpoints included."""
    return np.geomspace(0.05, 1.0, 34)


def extended_grid(s_max: float, points_above_one: int = 12) -> np.ndarray:
    """The default grid continued log-spaced from 1 up to ``s_max``."""
    if s_max <= 1:
        return default_grid()
    upper = np.geomspace(1.0, s_max, points_above_one + 1)[1:]
    return np.concatenate([default_grid(), upper])


def _log_ratios_to_max(values: np.ndarray, top: float) -> np.ndarray:
    # log(x/top) with full relative accuracy near 0; -inf for x == 0
    with np.errstate(divide="ignore"):
        ratio = values / top
        near = ratio >= 0.5
        d = np.where(near, np.log1p((values - top) / top), np.log(ratio))
        lost = (ratio == 0) & (values > 0)
        if np.any(lost):
            d = np.where(lost, np.log(values) - math.log(top), d)
    return d


def log_variance_of_powers(sample: WeightedSample, exponents) -> np.ndarray:
    """``ln Var(X^s)`` for every ``s`` in ``exponents`` (``-inf`` for zero variance).

    Uses ``X^s = top^s * (1 + u)`` with ``u = expm1(s * ln(X / top))`` and
    ``top = max X``, so ``u`` lies in ``[-1, 0]``: nothing overflows for large
    ``s`` and near-constant samples keep their relative spread.
    """
    require_nonnegative(sample)
    s = np.atleast_1d(np.asarray(exponents, dtype=np.float64))
    if np.any(~(s > 0)) or not np.all(np.isfinite(s)):
        raise NonpositiveExponent(f"exponents must be positive and finite, got {s.tolist()}")
    top = sample.x_max
    if top == 0:
        return np.full(s.shape, NEG_INF)
    d = _log_ratios_to_max(sample.values, top)
    w = sample.weights
    u = np.expm1(np.multiply.outer(s, d))
    dev = u - (u @ w)[:, None]
    var_u = (dev * dev) @ w
    with np.errstate(divide="ignore"):
        out = 2.0 * s * math.log(top) + np.log(var_u)
    return np.where(var_u > 0, out, NEG_INF)


def log_power_variance(sample: WeightedSample, s: float) -> float:
    require_positive_exponent(s, "s")
    return float(log_variance_of_powers(sample, [s])[0] / s)


def power_variance(sample: WeightedSample, s: float) -> float:
    lv = log_power_variance(sample, s)
    return 0.0 if lv == NEG_INF else math.exp(lv)


@dataclass(frozen=True, eq=False)
class PowerVarianceCurve:
    grid: np.ndarray
    log_v: np.ndarray

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=np.float64)
        log_v = np.asarray(self.log_v, dtype=np.float64)
        if grid.ndim != 1 or grid.size == 0:
            raise ValueError("grid must be a nonempty 1-d sequence")
        if np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
            raise ValueError("grid must be positive and strictly ascending")
        if log_v.shape != grid.shape:
            raise ValueError("log_v and grid lengths differ")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "log_v", log_v)

    def v(self) -> np.ndarray:
        """``V(s)`` itself; underflows to 0 where ``log V`` is very negative."""
        return np.exp(self.log_v)


def curve(sample: WeightedSample, grid: Sequence[float] | None = None) -> PowerVarianceCurve:
    g = default_grid() if grid is None else np.asarray(grid, dtype=np.float64)
    if g.size == 0 or np.any(~(g > 0)) or np.any(np.diff(g) <= 0):
        raise ValueError("grid must be nonempty, positive and strictly ascending")
    return PowerVarianceCurve(g, log_variance_of_powers(sample, g) / g)


@dataclass(frozen=True)
class MonotoneVerdict:
    monotone: bool
    worst_gap: float
    worst_index: int | None


def check_monotone(pvc: PowerVarianceCurve, tol: Tolerance = Tolerance()) -> MonotoneVerdict:
    """Check ``log V`` is nondecreasing along the grid.

    A pair fails when ``log_v[j] > log_v[j+1] + tol.rel * max(1, |log_v[j+1]|)``.
    ``worst_gap`` is the largest ``log_v[j] - log_v[j+1]`` seen (0 if none is
    positive) and ``worst_index`` the ``j`` where it occurs.
    """
    a, b = pvc.log_v[:-1], pvc.log_v[1:]
    with np.errstate(invalid="ignore"):
        drop = np.where(np.isneginf(a), 0.0, a - b)
        allowance = tol.rel * np.maximum(1.0, np.where(np.isneginf(b), 1.0, np.abs(b)))
    bad = drop > allowance
    if drop.size == 0 or not np.any(drop > 0):
        return MonotoneVerdict(True, 0.0, None)
    j = int(np.argmax(drop))
    return MonotoneVerdict(not bool(np.any(bad)), float(drop[j]), j)


def interpolation_t(r: float, s: float, p: float) -> float:
    """Solve ``1/s = (1-t)/r + t/p`` for ``t``."""
    return (1.0 / r - 1.0 / s) / (1.0 / r - 1.0 / p)


@dataclass(frozen=True)
class InterpolationWitness:
    r: float
    s: float
    p: float
    t: float
    lhs: float
    rhs: float

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    def holds(self, tol: Tolerance = Tolerance()) -> bool:
        return self.lhs <= self.rhs * (1 + tol.rel) + tol.abs


def interpolated_norm_bound(sample: WeightedSample, r: float, s: float, p: float) -> InterpolationWitness:
    """Compare ``||X||_s`` against ``||X||_r^(1-t) ||X||_p^t``."""
    for name, q in (("r", r), ("s", s), ("p", p)):
        if not math.isfinite(q):
            raise ExponentOrder(f"{name} must be finite, got {q!r}")
    if not (0 < r < s < p):
        raise ExponentOrder(f"need 0 < r < s < p, got r={r}, s={s}, p={p}")
    require_nonnegative(sample)
    if sample.x_max == 0:
        raise ZeroSample("interpolation bound needs a sample that is not identically zero")
    t = interpolation_t(r, s, p)
    lhs = lp_norm_w(sample, s)
    rhs = lp_norm_w(sample, r) ** (1.0 - t) * lp_norm_w(sample, p) ** t
    return InterpolationWitness(r, s, p, t, lhs, rhs)


class HolderSteps(NamedTuple):
    """Both interpolation inequalities for ``Y = X / ||X||_2`` at exponent ``s``.

    ``e_y2s <= bound_y2s`` and ``e_y <= bound_y`` must hold for ``s`` in (0, 1).
    """

    e_y2s: float
    bound_y2s: float
    e_y: float
    bound_y: float


def holder_steps(sample: WeightedSample, s: float) -> HolderSteps:
    if not (0 < s < 1):
        raise ExponentOrder(f"need 0 < s < 1, got {s}")
    require_nonnegative(sample)
    norm2 = lp_norm_w(sample, 2.0)
    if norm2 == 0:
        raise ZeroSample("cannot normalize an identically zero sample")
    y = sample.values / norm2
    w = sample.weights
    e_ys = float(np.dot(w, np.power(y, s)))
    return HolderSteps(
        e_y2s=float(np.dot(w, np.power(y, 2 * s))),
        bound_y2s=e_ys ** ((2 - 2 * s) / (2 - s)),
        e_y=float(np.dot(w, y)),
        bound_y=e_ys ** (1 / (2 - s)),
    )
