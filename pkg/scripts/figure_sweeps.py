"""Quota-sweep curves behind the two figures, as CSV.

powers_of_two.csv: n=10, w_i = 2**(i-1), every half-integer quota.
uniform_n30.csv:   one uniform balls-and-bins sample (n=30, m=10**4), agents
                   1, 10, 20, 30 on a grid of step m/(10n).
"""

import argparse
from fractions import Fraction
from pathlib import Path

from quotapower.ballsbins import BallsBinsConfig, sample_weights
from quotapower.experiments import quota_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--m", type=int, default=10**4)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    pow2 = tuple(2 ** (i - 1) for i in range(1, 11))
    (out / "powers_of_two.csv").write_text(quota_sweep(pow2, "half").to_csv())

    n = 30
    w = sample_weights(BallsBinsConfig.uniform(n, args.m, args.seed)).sorted
    step = Fraction(args.m, 10 * n)
    grid = [k * step for k in range(1, 10 * n + 1)]
    curve = quota_sweep(w, grid, agents=[1, 10, 20, 30])
    (out / "uniform_n30.csv").write_text(curve.to_csv())
    print(f"wrote {out}/powers_of_two.csv and {out}/uniform_n30.csv (weights digest {curve.digest})")


if __name__ == "__main__":
    main()
