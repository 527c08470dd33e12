"""Positive/negative-part decomposition of a real-valued sample.

For ``X = X+ - X-`` the chain

    Var(X+) + Var(X-) <= Var(X)
        <= Var(X+) + Var(X-) + Var(E(X+|B)) + Var(E(X-|B))
        <= 2 (Var(X+) + Var(X-))

holds when ``B`` is generated by the sign atoms ``{X>0}, {X=0}, {X<0}``
(algebra ``"B"``), or by the coarser pairs ``{X>=0}, {X<0}`` (``"B1"``) and
``{X>0}, {X<=0}`` (``"B2"``).  Atoms are classified by exact comparison
with zero.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np

from .core import Tolerance, WeightedSample, mean_w, variance_w
from .errors import ExponentRange
from .power_variance import log_variance_of_powers

ALGEBRAS = ("B", "B1", "B2")


def normalize_algebra(name: str) -> str:
    key = name.strip().upper()
    if key not in ALGEBRAS:
        raise ValueError(f"unknown algebra {name!r}; expected one of {', '.join(ALGEBRAS)}")
    return key


def split_parts(sample: WeightedSample) -> tuple[WeightedSample, WeightedSample]:
    x = sample.values
    pos = np.maximum(x, 0.0)
    neg = -np.minimum(x, 0.0)
    # -min(0, 0) is -0.0; keep the parts free of signed zeros
    neg[neg == 0] = 0.0
    return WeightedSample._trusted(pos, sample.weights), WeightedSample._trusted(neg, sample.weights)


@dataclass(frozen=True)
class SignAtoms:
    p_pos: float
    p_zero: float
    p_neg: float
    mean_pos: float | None
    mean_neg: float | None


def sign_atoms(sample: WeightedSample) -> SignAtoms:
    x, w = sample.values, sample.weights
    pos, neg = x > 0, x < 0
    p_pos = math.fsum(w[pos])
    p_neg = math.fsum(w[neg])
    p_zero = math.fsum(w[x == 0])
    mean_pos = _atom_mean(x[pos], w[pos], p_pos) if p_pos > 0 else None
    mean_neg = -_atom_mean(x[neg], w[neg], p_neg) if p_neg > 0 else None
    return SignAtoms(p_pos, p_zero, p_neg, mean_pos, mean_neg)


def atom_masks(sample: WeightedSample, algebra: str = "B") -> list[np.ndarray]:
    """Boolean masks of the nonempty atoms of ``algebra``."""
    x = sample.values
    algebra = normalize_algebra(algebra)
    if algebra == "B":
        masks = [x > 0, x == 0, x < 0]
    elif algebra == "B1":
        masks = [x >= 0, x < 0]
    else:
        masks = [x > 0, x <= 0]
    return [m for m in masks if m.any()]


def _atom_mean(values: np.ndarray, weights: np.ndarray, mass: float) -> float:
    # a constant atom has its value as exact mean; avoids ulp residue in the within part
    if values.min() == values.max():
        return float(values[0])
    return math.fsum(weights * values) / mass


class ConditionalSplit(NamedTuple):
    """``Var(E(Y|A))`` and ``E(Var(Y|A))`` for one variable ``Y``."""

    between: float
    within: float


def conditional_split(values: np.ndarray, weights: np.ndarray, masks: list[np.ndarray]) -> ConditionalSplit:
    probs = np.array([math.fsum(weights[m]) for m in masks])
    means = np.array([_atom_mean(values[m], weights[m], p) for m, p in zip(masks, probs)])
    if len(masks) == 1:
        between = 0.0
    else:
        dev = means - float(np.dot(probs, means))
        resid = float(np.dot(probs, dev))
        between = max(float(np.dot(probs, dev * dev)) - resid * resid, 0.0)
    within = 0.0
    for m, mu in zip(masks, means):
        dev = values[m] - mu
        within += float(np.dot(weights[m], dev * dev))
    return ConditionalSplit(between, within)


def conditional_expectation(sample: WeightedSample, algebra: str = "B") -> np.ndarray:
    """``E(X|algebra)`` evaluated at each sample point."""
    x, w = sample.values, sample.weights
    out = np.empty_like(x)
    for m in atom_masks(sample, algebra):
        out[m] = _atom_mean(x[m], w[m], math.fsum(w[m]))
    return out


@dataclass(frozen=True)
class DecompositionReport:
    var_x: float
    var_pos: float
    var_neg: float
    var_cond_pos: float
    var_cond_neg: float
    algebra: str
    eq_first: bool
    eq_middle: bool
    eq_third: bool
    mean_pos_part: float
    mean_neg_part: float
    slack_first: float
    slack_middle: float
    slack_third: float

    @property
    def scale(self) -> float:
        return max(1.0, self.var_x)

    def chain(self) -> tuple[float, float, float, float]:
        parts = self.var_pos + self.var_neg
        return (parts, self.var_x, parts + self.var_cond_pos + self.var_cond_neg, 2 * parts)

    def to_dict(self) -> dict:
        return asdict(self)


class _Parts(NamedTuple):
    pos: WeightedSample
    neg: WeightedSample
    var_x: float
    var_pos: float
    var_neg: float
    e_pos: float
    e_neg: float


def _parts(sample: WeightedSample) -> _Parts:
    pos, neg = split_parts(sample)
    return _Parts(pos, neg, variance_w(sample), variance_w(pos), variance_w(neg), mean_w(pos), mean_w(neg))


def _report(sample: WeightedSample, parts: _Parts, algebra: str, tol: Tolerance) -> DecompositionReport:
    masks = atom_masks(sample, algebra)
    split_pos = conditional_split(parts.pos.values, parts.pos.weights, masks)
    split_neg = conditional_split(parts.neg.values, parts.neg.weights, masks)
    cross = 2.0 * parts.e_pos * parts.e_neg
    slack_first = cross
    slack_middle = split_pos.between + split_neg.between - cross
    slack_third = split_pos.within + split_neg.within
    threshold = tol.threshold(max(1.0, parts.var_x))
    return DecompositionReport(
        var_x=parts.var_x,
        var_pos=parts.var_pos,
        var_neg=parts.var_neg,
        var_cond_pos=split_pos.between,
        var_cond_neg=split_neg.between,
        algebra=algebra,
        eq_first=slack_first <= threshold,
        eq_middle=slack_middle <= threshold,
        eq_third=slack_third <= threshold,
        mean_pos_part=parts.e_pos,
        mean_neg_part=parts.e_neg,
        slack_first=slack_first,
        slack_middle=slack_middle,
        slack_third=slack_third,
    )


def decomposition_report(
    sample: WeightedSample, algebra: str = "B", tol: Tolerance = Tolerance()
) -> DecompositionReport:
    """All variances of the chain plus equality flags.

    Slacks are computed from their structural forms rather than as
    differences of the chain totals:

    * first: ``2 E(X+) E(X-)``
    * middle: ``Var(E(X+|A)) + Var(E(X-|A)) - 2 E(X+) E(X-)``
    * third: ``E(Var(X+|A)) + E(Var(X-|A))``

    A flag is set when its slack is at most ``tol`` relative to
    ``max(1, Var(X))``.
    """
    return _report(sample, _parts(sample), normalize_algebra(algebra), tol)


def decomposition_reports(
    sample: WeightedSample, algebras=ALGEBRAS, tol: Tolerance = Tolerance()
) -> list[DecompositionReport]:
    """:func:`decomposition_report` for several algebras, sharing the part statistics."""
    parts = _parts(sample)
    return [_report(sample, parts, normalize_algebra(a), tol) for a in algebras]


def total_variance_identity(sample: WeightedSample, algebra: str = "B") -> tuple[float, float]:
    """``(Var(X), Var(E(X|A)) + E(Var(X|A)))``; the two agree up to rounding."""
    split = conditional_split(sample.values, sample.weights, atom_masks(sample, algebra))
    return variance_w(sample), split.between + split.within


class PowerBounds(NamedTuple):
    lower: float
    var_x: float
    upper: float


def _check_pair(r: float, s: float) -> None:
    if not (0 < r <= 2):
        raise ExponentRange(f"r must lie in (0, 2], got {r!r}")
    if not (s >= 2 and math.isfinite(s)):
        raise ExponentRange(f"s must lie in [2, inf), got {s!r}")


def _part_power_variances(part: WeightedSample, exps: list[float]) -> dict[float, float]:
    # exponent 1 is the plain variance, computed exactly as in decomposition_report
    out = {q: variance_w(part) for q in exps if q == 1}
    rest = sorted({q for q in exps if q != 1})
    if rest:
        lv = log_variance_of_powers(part, rest)
        out.update((q, math.exp(v / q)) for q, v in zip(rest, lv))
    return out


def power_decomposition_table(sample: WeightedSample, pairs) -> list[PowerBounds]:
    """:func:`power_decomposition_bounds` for every ``(r, s)`` in ``pairs``."""
    pairs = [(float(r), float(s)) for r, s in pairs]
    for r, s in pairs:
        _check_pair(r, s)
    exps = [q for r, s in pairs for q in (r / 2, s / 2)]
    pos, neg = split_parts(sample)
    vp, vn = _part_power_variances(pos, exps), _part_power_variances(neg, exps)
    var_x = variance_w(sample)
    return [
        PowerBounds(vp[r / 2] + vn[r / 2], var_x, 2.0 * (vp[s / 2] + vn[s / 2]))
        for r, s in pairs
    ]


def power_decomposition_bounds(sample: WeightedSample, r: float = 2.0, s: float = 2.0) -> PowerBounds:
    """``sum Var(X±^(r/2))^(2/r) <= Var(X) <= 2 sum Var(X±^(s/2))^(2/s)`` for ``0 < r <= 2 <= s``."""
    return power_decomposition_table(sample, [(r, s)])[0]
