"""Compare Monte Carlo estimates with exact values over a (k, n) grid.

    python scripts/mc_grid.py --trials 1000000 --seed 1 --method exponential
"""

import argparse

from brokenstick import exact
from brokenstick.sim import estimate_probability

GRID = [(3, 3), (3, 4), (3, 7), (4, 6), (5, 5), (4, 9), (6, 12), (3, 20)]
EVENTS = {
    "none": exact.prob_none_exact,
    "not_all": exact.prob_not_all_exact,
    "all": exact.prob_all_exact,
    "random_subset": exact.prob_random_subset,
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=10**6)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--streams", type=int, default=4)
    ap.add_argument("--method", choices=("uniform", "exponential"), default="uniform")
    args = ap.parse_args()

    print(f"{'event':>14} {'k':>3} {'n':>3} {'exact':>12} {'estimate':>12} {'z':>6}")
    for k, n in GRID:
        for event, fn in EVENTS.items():
            value = float(fn(k, n))
            est = estimate_probability(event, k, n, args.trials, args.seed, args.streams, args.method, workers=args.streams)
            z = abs(est.p_hat - value) / est.std_err if est.std_err else float("nan")
            print(f"{event:>14} {k:>3} {n:>3} {value:12.6g} {est.p_hat:12.6g} {z:6.2f}")


if __name__ == "__main__":
    main()
