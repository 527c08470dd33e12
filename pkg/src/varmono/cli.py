"""Command-line front end.

Exit codes: 0 success, 2 bad input or flags, 3 a monotonicity violation
in ``curve``, 4 violations in ``stress``.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import __version__
from .amgm import full_report
from .core import Tolerance, WeightedSample
from .errors import NegativeValue, TooFewPoints, VarmonoError
from .inputs import InputError, load_sample, parse_list
from .power_variance import check_monotone, curve, default_grid
from .schemas import SCHEMAS
from .sign import decomposition_report, normalize_algebra
from .stress import TARGETS, VALUE_MODELS, WEIGHT_MODELS, StressConfig, run

EXIT_OK, EXIT_INPUT, EXIT_MONOTONE, EXIT_VIOLATION = 0, 2, 3, 4

ALGEBRA_SYMBOL = {"B": "ℬ", "B1": "ℬ₁", "B2": "ℬ₂"}


class UsageError(Exception):
    pass


def _fmt(x: float | None) -> str:
    if x is None:
        return "n/a"
    return f"{x:.10g}"


def _dump(doc: dict) -> str:
    return json.dumps(doc, indent=2, allow_nan=False)


def _sample_block(x: WeightedSample) -> dict:
    return {"n": x.n, "alpha_min": x.alpha_min, "x_min": x.x_min, "x_max": x.x_max}


def _read_sample(args) -> WeightedSample:
    if args.input and args.values:
        raise UsageError("give either --input or --values, not both")
    if args.input:
        return load_sample(args.input)
    if args.values:
        weights = parse_list(args.weights, "--weights") if args.weights else None
        return WeightedSample(parse_list(args.values, "--values"), weights)
    raise UsageError("no input: pass --input PATH (CSV or JSON) or --values a,b,...")


def _tol(args) -> Tolerance:
    return Tolerance(rel=args.tol)


# --------------------------------------------------------------------------


def cmd_report(args) -> int:
    x = _read_sample(args)
    if not x.is_nonnegative():
        raise NegativeValue(f"report needs nonnegative values, found {x.x_min:g}")
    if x.n < 2:
        raise TooFewPoints("need at least 2 points")
    rep = full_report(x, args.r, args.s)
    if args.format == "json":
        cf = None if rep.lower_cf is None else {"lower": rep.lower_cf, "upper": rep.upper_cf}
        print(_dump({
            "gap": rep.gap,
            "bounds": {
                "thm4": {"lower": rep.lower_thm4, "upper": rep.upper_thm4, "r": rep.r, "s": rep.s},
                "cartwright_field": cf,
                "a2_lower": rep.lower_a2,
            },
            "sample": _sample_block(x),
        }))
        return EXIT_OK

    def mark(side, name):
        return f"   <- tightest {side}" if getattr(rep, f"tightest_{side}") == name else ""

    lines = [
        f"n = {rep.n}   alpha_min = {_fmt(rep.alpha_min)}   X_min = {_fmt(rep.x_min)}   X_max = {_fmt(rep.x_max)}",
        f"AM-GM gap  E X - Pi X          = {_fmt(rep.gap)}",
        "",
        "lower bounds",
        f"  thm4   Var(X^(r/2))^(1/r)/(1-alpha_min), r={_fmt(rep.r)}  {_fmt(rep.lower_thm4)}{mark('lower', 'thm4')}",
    ]
    if rep.lower_cf is None:
        lines.append("  cf     Var(X)/(2 X_max)                       n/a (requires X_min > 0)")
    else:
        lines.append(f"  cf     Var(X)/(2 X_max)                       {_fmt(rep.lower_cf)}{mark('lower', 'cf')}")
    lines += [
        f"  a2     Var(X^(1/2))                           {_fmt(rep.lower_a2)}{mark('lower', 'a2')}",
        "upper bounds",
        f"  thm4   Var(X^(s/2))^(1/s)/alpha_min, s={_fmt(rep.s)}      {_fmt(rep.upper_thm4)}{mark('upper', 'thm4')}",
    ]
    if rep.upper_cf is None:
        lines.append("  cf     Var(X)/(2 X_min)                       n/a (requires X_min > 0)")
    else:
        lines.append(f"  cf     Var(X)/(2 X_min)                       {_fmt(rep.upper_cf)}{mark('upper', 'cf')}")
    print("\n".join(lines))
    return EXIT_OK


def cmd_curve(args) -> int:
    x = _read_sample(args)
    if not x.is_nonnegative():
        raise NegativeValue(f"curve needs nonnegative values, found {x.x_min:g}")
    grid = parse_list(args.grid, "--grid") if args.grid else list(default_grid())
    pvc = curve(x, grid)
    verdict = check_monotone(pvc, _tol(args))
    if args.format == "json":
        log_v = [None if math.isinf(v) else float(v) for v in pvc.log_v]
        print(_dump({
            "curve": {"grid": pvc.grid.tolist(), "log_v": log_v, "monotone": verdict.monotone},
            "sample": _sample_block(x),
        }))
    else:
        print(f"{'s':>12}  {'log V(s)':>16}  {'V(s)':>14}")
        for s, lv in zip(pvc.grid, pvc.log_v):
            v = 0.0 if math.isinf(lv) else math.exp(lv)
            v_text = "underflow" if v == 0.0 and not math.isinf(lv) else f"{v:.6g}"
            lv_text = "-inf" if math.isinf(lv) else f"{lv:.10g}"
            print(f"{s:>12.6g}  {lv_text:>16}  {v_text:>14}")
        if verdict.monotone:
            print("verdict: monotone (V(s) = Var(X^s)^(1/s) nondecreasing in s)")
        else:
            j = verdict.worst_index
            print(f"verdict: VIOLATION between s={pvc.grid[j]:.6g} and s={pvc.grid[j + 1]:.6g}, "
                  f"log-drop {verdict.worst_gap:.6g}")
    return EXIT_OK if verdict.monotone else EXIT_MONOTONE


def _equality_notes(rep, algebra: str) -> list[str]:
    sym = ALGEBRA_SYMBOL[algebra]
    notes = []
    if rep.eq_first:
        notes.append("first  = : X >= 0 or X <= 0 (E X+ * E X- = 0)")
    if rep.eq_middle:
        if algebra == "B":
            notes.append("middle = : X > 0, or X < 0, or P(X=0) = 0 and E(X+|X>0) = E(X-|X<0)")
        else:
            notes.append(f"middle = : Var(E(X+|{sym})) + Var(E(X-|{sym})) = 2 E X+ E X-")
    if rep.eq_third:
        notes.append(f"third  = : X is {sym}-measurable (X = E(X|{sym}))")
    return notes


def cmd_decompose(args) -> int:
    x = _read_sample(args)
    algebra = normalize_algebra(args.algebra)
    rep = decomposition_report(x, algebra, _tol(args))
    if args.format == "json":
        d = rep.to_dict()
        keys = ("var_x", "var_pos", "var_neg", "var_cond_pos", "var_cond_neg",
                "eq_first", "eq_middle", "eq_third", "algebra")
        print(_dump({"decomposition": {k: d[k] for k in keys}, "sample": _sample_block(x)}))
        return EXIT_OK
    sym = ALGEBRA_SYMBOL[algebra]
    lo, vx, mid, hi = rep.chain()
    lines = [
        f"algebra {sym}   n = {x.n}",
        f"Var(X)            = {_fmt(rep.var_x)}",
        f"Var(X+)           = {_fmt(rep.var_pos)}",
        f"Var(X-)           = {_fmt(rep.var_neg)}",
        f"Var(E(X+|{sym})) = {_fmt(rep.var_cond_pos)}",
        f"Var(E(X-|{sym})) = {_fmt(rep.var_cond_neg)}",
        f"chain: {_fmt(lo)} <= {_fmt(vx)} <= {_fmt(mid)} <= {_fmt(hi)}",
        f"slacks: first {_fmt(rep.slack_first)}, middle {_fmt(rep.slack_middle)}, third {_fmt(rep.slack_third)}",
        f"equality: first={rep.eq_first} middle={rep.eq_middle} third={rep.eq_third}",
    ]
    lines += ["  " + n for n in _equality_notes(rep, algebra)]
    print("\n".join(lines))
    return EXIT_OK


def _stress_config(args) -> StressConfig:
    if args.n is not None and args.n_range is not None:
        raise UsageError("give either --n or --n-range")
    if args.n is not None:
        n_range = (args.n, args.n)
    elif args.n_range is not None:
        parts = args.n_range.split(",")
        if len(parts) != 2:
            raise UsageError("--n-range takes 'min,max'")
        try:
            n_range = (int(parts[0]), int(parts[1]))
        except ValueError:
            raise UsageError("--n-range takes two integers") from None
    else:
        n_range = (2, 64)
    targets = tuple(t for spec in (args.target or ["all"]) for t in spec.split(",") if t)
    return StressConfig(
        seed=args.seed,
        trials=args.trials,
        n_range=n_range,
        value_models=tuple(args.value_model.split(",")) if args.value_model else VALUE_MODELS,
        weight_models=tuple(args.weight_model.split(",")) if args.weight_model else WEIGHT_MODELS,
        kappa=args.kappa,
        targets=targets,
        tol=Tolerance(rel=args.tol),
    )


def cmd_stress(args) -> int:
    config = _stress_config(args)
    if args.workers < 1:
        raise UsageError("--workers must be >= 1")
    result = run(config, workers=args.workers)
    full = result.to_json()
    if args.output:
        Path(args.output).write_text(full + "\n", encoding="utf-8")
    if args.format == "json":
        print(full)
    else:
        s = result.summary
        print(f"seed {s['seed']}  trials {s['trials']}  targets {','.join(s['targets'])}")
        print(f"{'inequality':<24}{'checks':>9}{'viol':>6}{'near':>8}  {'min rel slack':>16}{'trial':>8}")
        for iid, e in s["inequalities"].items():
            rel = e.get("min_rel_slack")
            print(f"{iid:<24}{e['checks']:>9}{e['violations']:>6}{e['near_equalities']:>8}"
                  f"  {_fmt(rel):>16}{e.get('witness_trial', -1):>8}")
        for f in result.violations:
            print(f"VIOLATION {f.inequality_id} trial {f.trial_index} slack {f.slack:.6g} "
                  f"params {json.dumps(f.parameters, sort_keys=True)} sample {json.dumps(f.sample.to_dict())}")
        print(f"violations: {s['violations']}")
    return EXIT_OK if not result.violations else EXIT_VIOLATION


def cmd_schema(args) -> int:
    print(_dump(SCHEMAS[args.command_name]))
    return EXIT_OK


# --------------------------------------------------------------------------


def _add_input(p):
    p.add_argument("--input", metavar="PATH", help="CSV (value[,weight]) or JSON ({values, weights}); '-' for stdin")
    p.add_argument("--values", metavar="A,B,...", help="inline values instead of --input")
    p.add_argument("--weights", metavar="A,B,...", help="inline weights for --values (default uniform)")


def _add_common(p):
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--tol", type=float, default=1e-9, help="relative tolerance (default 1e-9)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="varmono", description="Variance inequalities on weighted samples.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("report", help="AM-GM gap with its variance bounds")
    _add_input(p)
    _add_common(p)
    p.add_argument("--r", type=float, default=1.0, help="lower-bound exponent in (0, 1] (default 1)")
    p.add_argument("--s", type=float, default=1.0, help="upper-bound exponent >= 1 (default 1)")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("curve", help="log Var(X^s)^(1/s) over a grid, with monotonicity verdict")
    _add_input(p)
    _add_common(p)
    p.add_argument("--grid", metavar="A,B,...", help="ascending exponents (default: 34 log-spaced in [0.05, 1])")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("decompose", help="positive/negative-part variance chain")
    _add_input(p)
    _add_common(p)
    p.add_argument("--algebra", default="b", type=str.lower, choices=("b", "b1", "b2"))
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("stress", help="seeded randomized falsification campaign")
    _add_common(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--target", action="append", metavar="NAME",
                   help=f"inequality family, repeatable or comma list: {', '.join(sorted(TARGETS))}")
    p.add_argument("--n", type=int, help="fixed sample size")
    p.add_argument("--n-range", metavar="MIN,MAX", help="sample size range (default 2,64)")
    p.add_argument("--value-model", metavar="M[,M...]", help=f"subset of {', '.join(VALUE_MODELS)}")
    p.add_argument("--weight-model", metavar="M[,M...]", help=f"subset of {', '.join(WEIGHT_MODELS)}")
    p.add_argument("--kappa", type=float, default=2.0, help="heavytail exponent: values U^-kappa")
    p.add_argument("--workers", type=int, default=1, help="threads evaluating trial chunks")
    p.add_argument("--output", metavar="PATH", help="write the full findings JSON here")
    p.set_defaults(func=cmd_stress)

    p = sub.add_parser("schema", help="print the JSON Schema of a command's --format json output")
    p.add_argument("command_name", choices=sorted(SCHEMAS))
    p.set_defaults(func=cmd_schema)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, InputError, VarmonoError, ValueError) as exc:
        print(f"varmono {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
