"""Values of the infinite sequence w_i = d**-i over a quota grid, as CSV."""

import argparse
import csv
import sys
from fractions import Fraction

from quotapower.superincreasing import LimitSpec, limit_shapley


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--base", type=int, default=2)
    ap.add_argument("--depth", type=int, default=24)
    ap.add_argument("--points", type=int, default=400)
    ap.add_argument("--agents", default="1,2,3")
    args = ap.parse_args()
    agents = [int(a) for a in args.agents.split(",")]
    top = Fraction(1, args.base - 1)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["quota", "agent", "value", "error_bound"])
    for k in range(1, args.points):
        q = top * Fraction(k, args.points)
        spec = LimitSpec(args.base, args.depth, q)
        for i in agents:
            value, bound = limit_shapley(spec, i)
            writer.writerow([format(float(q), ".10g"), i, format(float(value), ".10g"), format(float(bound), ".3g")])


if __name__ == "__main__":
    main()
