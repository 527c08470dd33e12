"""Seeded randomized falsification and tightness search.

Each trial draws one :class:`WeightedSample` from a Philox4x64-10 stream
keyed by ``(seed, trial_index)`` with the counter starting at zero, so any
trial can be regenerated on its own and trials may run in any order.  Every
inequality of the package is evaluated on the sample; violations (expected:
none) and near-equalities become :class:`StressFinding` records.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable

import numpy as np

from .amgm import a2_lower_bound, amgm_gap, cartwright_field_bounds
from .core import Tolerance, WeightedSample
from .errors import InvalidStart, VarmonoError
from .power_variance import (
    check_monotone,
    curve,
    default_grid,
    extended_grid,
    holder_steps,
    interpolated_norm_bound,
    log_variance_of_powers,
)
from .sign import ALGEBRAS, decomposition_reports, power_decomposition_table

VALUE_MODELS = ("uniform01", "heavytail", "dyadic", "signed-mixture")
WEIGHT_MODELS = ("uniform", "random-simplex")

DEFAULT_THM4_PAIRS = (
    (1.0, 1.0),
    (0.5, 1.0),
    (0.25, 1.5),
    (0.1, 2.0),
    (1.0, 3.0),
    (0.75, 4.0),
    (0.05, 8.0),
    (1.0, 16.0),
)
DEFAULT_DECOMPOSITION_PAIRS = ((2.0, 2.0), (1.0, 4.0), (0.5, 2.0))

# target name -> inequality ids it evaluates
TARGETS = {
    "monotonicity": ("monotonicity",),
    "corollary": ("monotonicity_extended",),
    "interpolation": ("interp1", "interp2", "interp_remark"),
    "thm4": ("thm4_lower", "thm4_upper"),
    "cf": ("cf_lower", "cf_upper"),
    "a2": ("a2_lower", "a2_dominance"),
    "decomposition": ("posneg_first", "posneg_middle", "posneg_third"),
    "power-decomposition": ("corollary_lower", "corollary_upper"),
}
TARGETS["amgm"] = TARGETS["thm4"] + TARGETS["cf"] + TARGETS["a2"]
TARGETS["all"] = tuple(i for k in list(TARGETS) if k != "amgm" for i in TARGETS[k])

_U53 = 2.0**-53


@dataclass(frozen=True)
class StressConfig:
    """Campaign settings.

    ``value_models`` and ``weight_models`` are cycled by trial index: trial
    ``i`` uses ``value_models[i % V]`` and
    ``weight_models[(i // V) % W]``.  Nonnegative-only inequalities see the
    absolute value of signed-mixture samples.
    """

    seed: int = 0
    trials: int = 1000
    n_range: tuple[int, int] = (2, 64)
    value_models: tuple[str, ...] = VALUE_MODELS
    weight_models: tuple[str, ...] = WEIGHT_MODELS
    kappa: float = 2.0
    dyadic_k: int = 4
    targets: tuple[str, ...] = ("all",)
    grid: tuple[float, ...] = tuple(default_grid())
    corollary_s_max: float = 8.0
    thm4_pairs: tuple[tuple[float, float], ...] = DEFAULT_THM4_PAIRS
    decomposition_pairs: tuple[tuple[float, float], ...] = DEFAULT_DECOMPOSITION_PAIRS
    algebras: tuple[str, ...] = ALGEBRAS
    tol: Tolerance = field(default_factory=Tolerance)
    near_tol: float = 1e-6
    max_near_findings: int = 5

    def __post_init__(self):
        if isinstance(self.value_models, str):
            object.__setattr__(self, "value_models", (self.value_models,))
        if isinstance(self.weight_models, str):
            object.__setattr__(self, "weight_models", (self.weight_models,))
        if isinstance(self.targets, str):
            object.__setattr__(self, "targets", (self.targets,))
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        lo, hi = self.n_range
        if lo < 2 or hi < lo:
            raise ValueError(f"n_range must satisfy 2 <= min <= max, got {self.n_range}")
        for m in self.value_models:
            if m not in VALUE_MODELS:
                raise ValueError(f"unknown value model {m!r}")
        for m in self.weight_models:
            if m not in WEIGHT_MODELS:
                raise ValueError(f"unknown weight model {m!r}")
        if not self.value_models or not self.weight_models:
            raise ValueError("need at least one value model and one weight model")
        if not self.kappa > 0:
            raise ValueError("kappa must be > 0")
        for t in self.targets:
            if t not in TARGETS:
                raise ValueError(f"unknown target {t!r}; choose from {', '.join(sorted(TARGETS))}")
        if not self.near_tol >= 0:
            raise ValueError("near_tol must be >= 0")

    def inequality_ids(self) -> tuple[str, ...]:
        ids: list[str] = []
        for t in self.targets:
            ids.extend(i for i in TARGETS[t] if i not in ids)
        return tuple(ids)


# --------------------------------------------------------------------------
# sample generation


def _open_unit(rng: np.random.Generator, n: int) -> np.ndarray:
    # uniform on the open interval (0, 1): midpoints of a 2^-53 lattice
    return (rng.integers(0, 2**53, size=n, dtype=np.int64) + 0.5) * _U53


def _magnitudes(rng: np.random.Generator, model: str, n: int, config: StressConfig) -> np.ndarray:
    if model == "uniform01":
        return _open_unit(rng, n)
    if model == "heavytail":
        return _open_unit(rng, n) ** (-config.kappa)
    if model == "dyadic":
        k = config.dyadic_k
        e = rng.integers(-k - 1, k + 1, size=n)
        return np.where(e == -k - 1, 0.0, np.ldexp(1.0, np.maximum(e, -k)))
    raise ValueError(model)


_MASK64 = 0xFFFFFFFFFFFFFFFF


def philox(seed: int, stream: int) -> np.random.Generator:
    """Philox4x64-10 keyed by the two 64-bit words ``(seed, stream)``, counter 0."""
    key = np.array([seed & _MASK64, stream & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def trial_rng(config: StressConfig, trial_index: int) -> np.random.Generator:
    return philox(config.seed, trial_index)


def _draw(config: StressConfig, trial_index: int) -> tuple[WeightedSample, np.random.Generator, str]:
    rng = trial_rng(config, trial_index)
    lo, hi = config.n_range
    n = int(rng.integers(lo, hi + 1))
    nv = len(config.value_models)
    model = config.value_models[trial_index % nv]
    wmodel = config.weight_models[(trial_index // nv) % len(config.weight_models)]
    if model == "signed-mixture":
        base = VALUE_MODELS[int(rng.integers(0, 3))]
        values = _magnitudes(rng, base, n, config)
        values = np.where(rng.random(n) < 0.5, -values, values)
        values[values == 0] = 0.0
    else:
        values = _magnitudes(rng, model, n, config)
    if wmodel == "uniform":
        weights = None
    else:
        weights = -np.log(_open_unit(rng, n))
    return WeightedSample(values, weights), rng, model


def generate(config: StressConfig, trial_index: int) -> WeightedSample:
    """The sample of trial ``trial_index``; a pure function of ``(config, trial_index)``."""
    return _draw(config, trial_index)[0]


# --------------------------------------------------------------------------
# inequality checks


@dataclass(frozen=True)
class Check:
    """One evaluated inequality ``lhs <= rhs``.

    ``slack`` is in the inequality's natural units (log units for
    monotonicity), ``scale`` sets both the violation threshold and the
    near-equality band, ``rel_slack`` is the scale-free slack used to rank
    tightness.
    """

    inequality_id: str
    parameters: dict
    lhs: float
    rhs: float
    slack: float
    scale: float
    threshold: float
    rel_slack: float


def _ratio(slack: float, lhs: float, rhs: float) -> float:
    denom = max(abs(lhs), abs(rhs))
    return slack / denom if denom > 0 else 0.0


def _variance_check(iid: str, params: dict, lhs: float, rhs: float, tol: Tolerance, slack=None) -> Check:
    slack = rhs - lhs if slack is None else slack
    scale = max(abs(lhs), abs(rhs))
    return Check(iid, params, lhs, rhs, slack, scale, tol.threshold(scale), _ratio(slack, lhs, rhs))


def _monotone_check(iid: str, grid, sample: WeightedSample, tol: Tolerance) -> Check:
    pvc = curve(sample, grid)
    a, b = pvc.log_v[:-1], pvc.log_v[1:]
    with np.errstate(invalid="ignore"):
        rise = np.where(np.isneginf(a), 0.0, b - a)
    j = int(np.argmin(rise))
    scale = max(1.0, abs(b[j])) if np.isfinite(b[j]) else 1.0
    verdict = check_monotone(pvc, tol)
    slack = float(rise[j])
    if not verdict.monotone:
        slack = min(slack, -verdict.worst_gap)
    return Check(iid, {"s_lo": float(pvc.grid[j]), "s_hi": float(pvc.grid[j + 1])},
                 float(a[j]), float(b[j]), slack, scale, tol.rel * scale, slack)


def _nonneg(sample: WeightedSample) -> WeightedSample:
    if sample.is_nonnegative():
        return sample
    return WeightedSample._trusted(np.abs(sample.values), sample.weights)


def _amgm_checks(x: WeightedSample, ids: set, config: StressConfig) -> list[Check]:
    tol = config.tol
    out = []
    gap = amgm_gap(x)
    if ids & {"thm4_lower", "thm4_upper"}:
        pairs = config.thm4_pairs
        exps = [p for r, s in pairs for p in (r / 2, s / 2)]
        lv = log_variance_of_powers(x, exps)
        for k, (r, s) in enumerate(pairs):
            lower = math.exp(lv[2 * k] / r) / (1.0 - x.alpha_min)
            upper = math.exp(lv[2 * k + 1] / s) / x.alpha_min
            params = {"r": r, "s": s}
            if "thm4_lower" in ids:
                out.append(_variance_check("thm4_lower", params, lower, gap, tol))
            if "thm4_upper" in ids:
                out.append(_variance_check("thm4_upper", params, gap, upper, tol))
    if ids & {"cf_lower", "cf_upper"} and x.x_min > 0:
        cf = cartwright_field_bounds(x)
        if "cf_lower" in ids:
            out.append(_variance_check("cf_lower", {}, cf.lower, gap, tol))
        if "cf_upper" in ids:
            out.append(_variance_check("cf_upper", {}, gap, cf.upper, tol))
    if ids & {"a2_lower", "a2_dominance"}:
        a2 = a2_lower_bound(x)
        if "a2_lower" in ids:
            out.append(_variance_check("a2_lower", {}, a2, gap, tol))
        if "a2_dominance" in ids:
            thm4_lower = a2 / (1.0 - x.alpha_min)
            out.append(_variance_check("a2_dominance", {"r": 1.0}, a2, thm4_lower, tol))
    return out


def _interp_checks(x: WeightedSample, rng: np.random.Generator, ids: set, tol: Tolerance) -> list[Check]:
    out = []
    if x.x_max == 0:
        return out
    x = x.scaled(1.0 / x.x_max)
    if ids & {"interp1", "interp2"}:
        s = float(0.02 + 0.96 * rng.random())
        steps = holder_steps(x, s)
        if "interp1" in ids:
            out.append(_variance_check("interp1", {"s": s}, steps.e_y2s, steps.bound_y2s, tol))
        if "interp2" in ids:
            out.append(_variance_check("interp2", {"s": s}, steps.e_y, steps.bound_y, tol))
    if "interp_remark" in ids:
        r, s, p = np.sort(np.exp(rng.uniform(math.log(0.05), math.log(16.0), 3)))
        if r < s < p:
            wit = interpolated_norm_bound(x, float(r), float(s), float(p))
            out.append(_variance_check("interp_remark", {"r": wit.r, "s": wit.s, "p": wit.p},
                                       wit.lhs, wit.rhs, tol))
    return out


def _sign_checks(x: WeightedSample, ids: set, config: StressConfig) -> list[Check]:
    tol = config.tol
    out = []
    if ids & {"posneg_first", "posneg_middle", "posneg_third"}:
        for rep in decomposition_reports(x, config.algebras, tol):
            lo, vx, mid, hi = rep.chain()
            scale = rep.scale
            thr = tol.threshold(scale)
            params = {"algebra": rep.algebra}
            rows = (
                ("posneg_first", lo, vx, rep.slack_first),
                ("posneg_middle", vx, mid, rep.slack_middle),
                ("posneg_third", mid, hi, rep.slack_third),
            )
            for iid, lhs, rhs, slack in rows:
                if iid in ids:
                    out.append(Check(iid, params, lhs, rhs, slack, scale, thr, _ratio(slack, lhs, rhs)))
    if ids & {"corollary_lower", "corollary_upper"}:
        table = power_decomposition_table(x, config.decomposition_pairs)
        for (r, s), b in zip(config.decomposition_pairs, table):
            params = {"r": r, "s": s}
            if "corollary_lower" in ids:
                out.append(_variance_check("corollary_lower", params, b.lower, b.var_x, tol))
            if "corollary_upper" in ids:
                out.append(_variance_check("corollary_upper", params, b.var_x, b.upper, tol))
    return out


def evaluate(sample: WeightedSample, config: StressConfig, rng: np.random.Generator | None = None,
             ids: Iterable[str] | None = None) -> list[Check]:
    """Evaluate the configured inequalities on one sample."""
    ids = set(config.inequality_ids() if ids is None else ids)
    rng = rng if rng is not None else philox(config.seed, 0)
    out: list[Check] = []
    x = _nonneg(sample)
    if "monotonicity" in ids:
        out.append(_monotone_check("monotonicity", config.grid, x, config.tol))
    if "monotonicity_extended" in ids:
        out.append(_monotone_check("monotonicity_extended", extended_grid(config.corollary_s_max),
                                   x, config.tol))
    if ids & set(TARGETS["interpolation"]):
        out.extend(_interp_checks(x, rng, ids, config.tol))
    if ids & set(TARGETS["amgm"]):
        out.extend(_amgm_checks(x, ids, config))
    if ids & set(TARGETS["decomposition"] + TARGETS["power-decomposition"]):
        out.extend(_sign_checks(sample, ids, config))
    return out


# --------------------------------------------------------------------------
# findings and campaign


@dataclass(frozen=True)
class StressFinding:
    kind: str  # "violation", "near_equality" or "local_minimum"
    inequality_id: str
    sample: WeightedSample
    parameters: dict
    slack: float
    rel_slack: float
    trial_index: int

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "inequality_id": self.inequality_id,
            "trial_index": self.trial_index,
            "parameters": self.parameters,
            "slack": self.slack,
            "rel_slack": self.rel_slack,
            "sample": self.sample.to_dict(),
        }


def classify(check: Check, near_tol: float) -> str | None:
    if check.slack < -check.threshold:
        return "violation"
    if check.slack <= near_tol * check.scale:
        return "near_equality"
    return None


def _finding(kind: str, check: Check, sample: WeightedSample, trial_index: int) -> StressFinding:
    slack, rel = check.slack, check.rel_slack
    if kind == "near_equality":
        # rounding-level negatives inside the tolerance band are recorded as exact ties
        slack, rel = max(slack, 0.0), max(rel, 0.0)
    return StressFinding(kind, check.inequality_id, sample, dict(check.parameters), slack, rel, trial_index)


@dataclass
class _Tally:
    checks: int = 0
    violations: int = 0
    near_equalities: int = 0
    best: tuple | None = None  # (rel_slack, trial_index, slack, parameters, sample)

    def merge(self, other: "_Tally") -> None:
        self.checks += other.checks
        self.violations += other.violations
        self.near_equalities += other.near_equalities
        if other.best is not None and (self.best is None or other.best[:2] < self.best[:2]):
            self.best = other.best


def _run_chunk(config: StressConfig, start: int, stop: int):
    ids = set(config.inequality_ids())
    violations: list[StressFinding] = []
    near: dict[str, list[StressFinding]] = {}
    tallies: dict[str, _Tally] = {}
    for i in range(start, stop):
        sample, rng, _ = _draw(config, i)
        for chk in evaluate(sample, config, rng, ids):
            tally = tallies.setdefault(chk.inequality_id, _Tally())
            tally.checks += 1
            key = (chk.rel_slack, i)
            if tally.best is None or key < tally.best[:2]:
                tally.best = (chk.rel_slack, i, chk.slack, dict(chk.parameters), sample)
            kind = classify(chk, config.near_tol)
            if kind == "violation":
                tally.violations += 1
                violations.append(_finding(kind, chk, sample, i))
            elif kind == "near_equality":
                tally.near_equalities += 1
                bucket = near.setdefault(chk.inequality_id, [])
                if len(bucket) < config.max_near_findings:
                    bucket.append(_finding(kind, chk, sample, i))
    return violations, near, tallies


@dataclass
class StressResult:
    findings: list[StressFinding]
    summary: dict

    @property
    def violations(self) -> list[StressFinding]:
        return [f for f in self.findings if f.kind == "violation"]

    def to_json(self) -> str:
        doc = {"summary": self.summary, "findings": [f.to_dict() for f in self.findings]}
        return json.dumps(_finite(doc), indent=2, sort_keys=True)


def _finite(obj):
    # JSON has no infinities; encode them as null
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    return obj


def run(config: StressConfig, workers: int = 1, chunk_size: int = 2000) -> StressResult:
    """Run every trial and collect findings in trial-index order.

    Violations are all kept; near-equalities are capped at
    ``config.max_near_findings`` per inequality (the earliest trials win).
    Output does not depend on ``workers`` or ``chunk_size``.
    """
    bounds = [(a, min(a + chunk_size, config.trials)) for a in range(0, config.trials, chunk_size)]
    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda b: _run_chunk(config, *b), bounds))
    else:
        parts = [_run_chunk(config, *b) for b in bounds]

    violations: list[StressFinding] = []
    near: dict[str, list[StressFinding]] = {}
    tallies: dict[str, _Tally] = {}
    for v, nr, tl in parts:
        violations.extend(v)
        for iid, bucket in nr.items():
            merged = near.setdefault(iid, [])
            merged.extend(bucket[: config.max_near_findings - len(merged)])
        for iid, t in tl.items():
            tallies.setdefault(iid, _Tally()).merge(t)

    findings = violations + [f for iid in sorted(near) for f in near[iid]]
    findings.sort(key=lambda f: (f.trial_index, f.kind != "violation", f.inequality_id))
    per_ineq = {}
    for iid in config.inequality_ids():
        t = tallies.get(iid)
        if t is None:
            continue
        entry = {"checks": t.checks, "violations": t.violations, "near_equalities": t.near_equalities}
        if t.best is not None:
            rel, idx, slack, params, sample = t.best
            entry.update(min_rel_slack=rel, min_slack=slack, witness_trial=idx,
                         witness_parameters=params, witness_sample=sample.to_dict())
        per_ineq[iid] = entry
    summary = {
        "seed": config.seed,
        "trials": config.trials,
        "targets": list(config.targets),
        "violations": len(violations),
        "inequalities": per_ineq,
    }
    return StressResult(findings, summary)


# --------------------------------------------------------------------------
# local search for extremal configurations

TIGHTEN_STEPS = (0.1, -0.1, 0.01, -0.01, 0.001, -0.001)


def _objective(inequality_id: str, config: StressConfig, params: dict) -> Callable[[WeightedSample], Check]:
    cfg = replace(config, thm4_pairs=((params.get("r", 1.0), params.get("s", 1.0)),),
                  algebras=(params.get("algebra", "B"),),
                  decomposition_pairs=((params.get("r", 2.0), params.get("s", 2.0)),))
    def score(sample: WeightedSample) -> Check:
        rng = philox(config.seed, 0)
        checks = evaluate(sample, cfg, rng, {inequality_id})
        if not checks:
            raise InvalidStart(f"{inequality_id} is not defined for this sample")
        return min(checks, key=lambda c: c.rel_slack)

    return score


_NONNEG_IDS = set(TARGETS["monotonicity"] + TARGETS["corollary"] + TARGETS["interpolation"] + TARGETS["amgm"])


def tighten(config: StressConfig, inequality_id: str, start: WeightedSample,
            params: dict | None = None, max_steps: int = 1000) -> StressFinding:
    """Multiplicative coordinate hill-climb on the scale-free slack.

    Each move multiplies one value or one weight by ``1 + delta`` for
    ``delta`` in ``TIGHTEN_STEPS`` (weights are renormalized) and is kept when
    the slack strictly decreases.  Coordinates are visited in an order
    shuffled from ``config.seed``; the search stops after a sweep with no
    improvement or after ``max_steps`` accepted moves.
    """
    params = dict(params or {})
    known = {i for ids in TARGETS.values() for i in ids}
    if inequality_id not in known:
        raise InvalidStart(f"unknown inequality {inequality_id!r}")
    if inequality_id in _NONNEG_IDS and not start.is_nonnegative():
        raise InvalidStart(f"{inequality_id} needs a nonnegative start sample")
    if inequality_id.startswith(("thm4", "cf", "a2")) and start.n < 2:
        raise InvalidStart("AM-GM bounds need at least 2 points")
    score = _objective(inequality_id, config, params)
    try:
        current = score(start)
    except VarmonoError as exc:
        raise InvalidStart(str(exc)) from exc

    rng = philox(config.seed, 2**63)
    x = start.values.copy()
    w = start.weights.copy()
    sample = start
    steps = 0
    improved = True
    while improved and steps < max_steps and current.rel_slack > 0:
        improved = False
        for coord in rng.permutation(2 * x.size):
            for delta in TIGHTEN_STEPS:
                cx, cw = x.copy(), w.copy()
                if coord < x.size:
                    cx[coord] *= 1 + delta
                else:
                    cw[coord - x.size] *= 1 + delta
                try:
                    cand = WeightedSample(cx, cw)
                    chk = score(cand)
                except VarmonoError:
                    continue
                if chk.rel_slack < current.rel_slack:
                    x, w, sample, current = cx, cand.weights.copy(), cand, chk
                    steps += 1
                    improved = True
                    break
            if steps >= max_steps:
                break

    kind = classify(current, config.near_tol) or "local_minimum"
    return _finding(kind, current, sample, -1)
