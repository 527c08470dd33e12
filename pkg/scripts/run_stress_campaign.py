"""Run a seeded falsification campaign and print a per-inequality table.

    python scripts/run_stress_campaign.py --trials 20000 --target all --out campaign.json
"""

import argparse
import time
from pathlib import Path

from varmono.stress import TARGETS, StressConfig, run


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--trials", type=int, default=10_000)
    ap.add_argument("--target", action="append", choices=sorted(TARGETS))
    ap.add_argument("--workers", type=int, default=4)
    ap.add_argument("--out", type=Path)
    args = ap.parse_args()

    cfg = StressConfig(seed=args.seed, trials=args.trials, targets=tuple(args.target or ["all"]))
    t0 = time.perf_counter()
    res = run(cfg, workers=args.workers)
    dt = time.perf_counter() - t0

    print(f"{'inequality':24s} {'checks':>9s} {'viol':>5s} {'near':>7s} {'min rel slack':>14s}")
    for iid, e in res.summary["inequalities"].items():
        print(f"{iid:24s} {e['checks']:9d} {e['violations']:5d} {e['near_equalities']:7d} "
              f"{e.get('min_rel_slack', float('nan')):14.3e}")
    print(f"\n{args.trials} trials in {dt:.1f}s, {res.summary['violations']} violations")
    if args.out:
        args.out.write_text(res.to_json() + "\n")
        print(f"findings written to {args.out}")


if __name__ == "__main__":
    main()
