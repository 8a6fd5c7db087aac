"""Run the desk-scale Monte Carlo checks and write one JSON report per run.

    python scripts/monte_carlo_checks.py --out results/ --seed 1
    python scripts/monte_carlo_checks.py --only min-shapley --trials 20
"""

import argparse
import logging
import time
from fractions import Fraction
from pathlib import Path

from quotapower.experiments import run_equal_power, run_exponential_match, run_min_shapley

log = logging.getLogger("monte_carlo_checks")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results")
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--trials", type=int, help="override every trial count")
    ap.add_argument("--only", choices=["equal-power", "min-shapley", "exponential"])
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    def trials(default):
        return args.trials or default

    runs = {
        "equal-power": lambda: [("equal_power_n15", run_equal_power(15, 3 * 15**3 * 40, trials=trials(20), seed=args.seed))],
        "min-shapley": lambda: [
            (f"min_shapley_ell{ell}", run_min_shapley(20, 2 * 10**5, ell, trials=trials(100), seed=args.seed))
            for ell in (1, 10)
        ],
        "exponential": lambda: [(
            "exponential_n6",
            run_exponential_match(6, Fraction(2, 5), 10**6, trials=trials(50), seed=args.seed),
        )],
    }
    for name, make in runs.items():
        if args.only and name != args.only:
            continue
        t0 = time.perf_counter()
        for stem, report in make():
            (out / f"{stem}.json").write_text(report.to_json())
            (out / f"{stem}.csv").write_text(report.records_csv())
            log.info("%s: mean %.6g, success %.3f, %d trials", stem, report.mean,
                     report.success_fraction, report.trials)
        log.info("%s done in %.1fs", name, time.perf_counter() - t0)


if __name__ == "__main__":
    main()
