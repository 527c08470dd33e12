"""Tabulate V(s) = Var(X^s)^(1/s) on the default grid for a few samples.

Includes samples spread over many decades, where V itself underflows but the
log-domain curve stays finite and nondecreasing.
"""

import numpy as np

from varmono.core import WeightedSample
from varmono.power_variance import check_monotone, curve

SAMPLES = {
    "(1, 4)": WeightedSample([1, 4]),
    "indicator p=0.3": WeightedSample([0, 1], [0.7, 0.3]),
    "1..10": WeightedSample(np.arange(1, 11)),
    "1e-300, 1e300": WeightedSample([1e-300, 1e300]),
    "near-constant": WeightedSample([1, 1 + 1e-9, 1 - 1e-9]),
}


def main():
    curves = {name: curve(x) for name, x in SAMPLES.items()}
    grid = next(iter(curves.values())).grid
    names = list(curves)
    print(f"{'s':>7s} " + " ".join(f"{n:>17s}" for n in names))
    for j, s in enumerate(grid):
        if j % 3 and j != len(grid) - 1:
            continue
        print(f"{s:7.4f} " + " ".join(f"{curves[n].log_v[j]:17.6f}" for n in names))
    print("\nlog V shown; verdicts:")
    for n in names:
        v = check_monotone(curves[n])
        print(f"  {n:17s} monotone={v.monotone} worst drop={v.worst_gap:.2e}")


if __name__ == "__main__":
    main()
