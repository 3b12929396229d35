"""Random k-subset failure rate for growing n; it should stay at k / 2^(k-1)."""

import argparse

from brokenstick.sim import estimate_probability


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("-k", type=int, default=4)
    ap.add_argument("--trials", type=int, default=10**6)
    ap.add_argument("--seed", type=int, default=3)
    args = ap.parse_args()

    k = args.k
    target = k / 2 ** (k - 1)
    print(f"k = {k}, k/2^(k-1) = {target:.6f}")
    for n in (k, k + 1, k + 3, k + 10, k + 30, k + 100):
        est = estimate_probability("random_subset", k, n, args.trials, args.seed, streams=4, workers=4)
        print(f"n = {n:4d}  p_hat = {est.p_hat:.6f}  95% CI [{est.ci_low:.6f}, {est.ci_high:.6f}]"
              f"  z = {abs(est.p_hat - target) / est.std_err:.2f}")


if __name__ == "__main__":
    main()
