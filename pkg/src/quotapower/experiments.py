"""Seeded Monte Carlo checks of the balls-and-bins results, and quota sweeps.

Each ``run_*`` function returns an ``ExperimentReport``. Per-trial Shapley
values are exact; only the aggregates are floats. Trial ``t`` uses seed
``derive_seed(seed, t)`` and results are folded in trial order, so a report
does not depend on how many worker threads ran it.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
import random
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .ballsbins import (
    BallsBinsConfig,
    derive_seed,
    exponential_probs,
    sample_weights,
    si_sample_threshold,
)
from .game import CoalitionCountTable, Game, PowerVector, ShapleyEvaluator, as_fraction
from .superincreasing import (
    SIWeights,
    breakpoints,
    closed_form,
    find_pset,
    is_super_increasing,
    si_interval,
    to_increasing,
)

__all__ = [
    "ExperimentReport",
    "SweepCurve",
    "run_equal_power",
    "run_min_shapley",
    "run_exponential_match",
    "quota_sweep",
    "parse_grid",
    "weights_digest",
    "worker_count",
]


def worker_count() -> int:
    raw = os.environ.get("QUOTAPOWER_THREADS", "0")
    try:
        k = int(raw)
    except ValueError:
        raise ValueError(f"QUOTAPOWER_THREADS must be an integer, got {raw!r}")
    return k if k > 0 else (os.cpu_count() or 1)


def _map_trials(fn: Callable[[int], dict], trials: int) -> list[dict]:
    workers = min(worker_count(), max(trials, 1))
    if workers == 1:
        return [fn(t) for t in range(trials)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(trials)))


def weights_digest(weights: Sequence[int]) -> str:
    return hashlib.sha256(",".join(map(str, weights)).encode()).hexdigest()[:16]


def _frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


@dataclass
class ExperimentReport:
    tag: str
    config: dict
    records: list[dict]
    mean: float
    std: float
    trials: int
    success_fraction: float
    extra: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    @classmethod
    def aggregate(cls, tag, config, records, extra=None, notes=None) -> "ExperimentReport":
        values = [r["value"] for r in records]
        return cls(
            tag=tag,
            config=config,
            records=records,
            mean=statistics.fmean(values) if values else float("nan"),
            std=statistics.stdev(values) if len(values) > 1 else 0.0,
            trials=len(records),
            success_fraction=(
                sum(bool(r["success"]) for r in records) / len(records) if records else 0.0
            ),
            extra=extra or {},
            notes=notes or [],
        )

    @property
    def confidence_radius(self) -> float:
        """Normal-approximation 95% radius of the mean."""
        return 1.96 * self.std / math.sqrt(self.trials) if self.trials else float("nan")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["confidence_radius"] = self.confidence_radius
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def records_csv(self) -> str:
        buf = io.StringIO()
        keys = ["trial", "seed", "digest", "value", "exact", "success", "reason"]
        writer = csv.DictWriter(buf, fieldnames=keys, extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        for r in self.records:
            writer.writerow({k: r.get(k, "") for k in keys})
        return buf.getvalue()


def _uniform_weights(n: int, m: int, seed: int) -> tuple[int, ...]:
    return sample_weights(BallsBinsConfig.uniform(n, m, seed)).sorted


def run_equal_power(
    n: int,
    m: int,
    offsets: Sequence = (Fraction(1, 2),),
    trials: int = 20,
    seed: int = 0,
    ells: Sequence[int] | None = None,
) -> ExperimentReport:
    """All-equal-power check at quotas ``(ell + offset) * m/n``.

    A trial succeeds when every requested quota yields the uniform vector.
    Offsets closer to a multiple of m/n than ``m/n / sqrt(m/(3n^3))`` are
    refused.
    """
    if m < 3 * n**3:
        raise ValueError(f"need m >= 3n^3 = {3 * n**3}, got m={m}")
    unit = Fraction(m, n)
    radius = 1 / math.sqrt(m / (3 * n**3))
    ells = list(range(n)) if ells is None else list(ells)
    quotas = []
    for off in offsets:
        off = as_fraction(off)
        dist = min(off - math.floor(off), math.ceil(off) - off)
        if dist <= radius:
            raise ValueError(
                f"offset {off} is within {radius:.6g} (in units of m/n) of a multiple "
                "of m/n; the equal-power regime needs a larger distance"
            )
        for ell in ells:
            q = (ell + off) * unit
            if 0 < q <= m:
                quotas.append(q)
    if not quotas:
        raise ValueError("no quota of the requested form lies in (0, m]")
    quotas.sort()
    uniform = Fraction(1, n)
    thresholds = sorted({math.ceil(q) for q in quotas})

    def trial(t: int) -> dict:
        s = derive_seed(seed, t)
        w = _uniform_weights(n, m, s)
        ev = ShapleyEvaluator(w, cap=max(thresholds))
        vals = ev.pivot_values(thresholds)
        bad = [
            th for k, th in enumerate(thresholds)
            if any(vals[a][k] != uniform for a in vals)
        ]
        return {
            "trial": t,
            "seed": s,
            "digest": weights_digest(w),
            "value": float(len(thresholds) - len(bad)) / len(thresholds),
            "success": not bad,
            "reason": "" if not bad else f"unequal at thresholds {bad[:5]}",
        }

    records = _map_trials(trial, trials)
    config = {
        "n": n, "m": m, "offsets": [str(as_fraction(o)) for o in offsets],
        "ells": ells, "trials": trials, "seed": seed, "distance_bound": radius,
    }
    return ExperimentReport.aggregate("equal-power", config, records)


def run_min_shapley(
    n: int, m: int, ell: int, trials: int = 100, seed: int = 0
) -> ExperimentReport:
    """Distribution of the weakest agent's value at ``q = ell * m/n``.

    ``extra`` carries two regime diagnostics computed from the same counting
    table: the mean over trials of Pr[w(A) + w_1 >= q] for random
    (ell-1)-subsets A of the other agents, and the fraction of trials in which
    every p_k with k outside {ell-1, ell} is at most 1/n^2.
    """
    if not 1 <= ell <= n - 1:
        raise ValueError(f"ell must lie in 1..{n - 1}, got {ell}")
    if m % n:
        raise ValueError(f"experiments require n | m (n={n}, m={m})")
    q = ell * m // n
    fact = [math.factorial(k) for k in range(n)]

    def trial(t: int) -> dict:
        s = derive_seed(seed, t)
        w = _uniform_weights(n, m, s)
        w1 = w[0]
        table = CoalitionCountTable.build(w[1:], cap=q)
        counts = table.window(q - w1, q)
        phi = Fraction(
            sum(c * fact[k] * fact[n - 1 - k] for k, c in enumerate(counts)),
            math.factorial(n),
        )
        pk = [Fraction(c, math.comb(n - 1, k)) for k, c in enumerate(counts)]
        small = all(p <= Fraction(1, n * n) for k, p in enumerate(pk) if k not in (ell - 1, ell))
        below = table.window(0, q - w1)[ell - 1]
        reach = 1 - Fraction(below, math.comb(n - 1, ell - 1))
        return {
            "trial": t,
            "seed": s,
            "digest": weights_digest(w),
            "value": float(phi),
            "exact": _frac_str(phi),
            "success": True,
            "reason": "",
            "w1": w1,
            "pk_small": small,
            "reach_prob": float(reach),
        }

    records = _map_trials(trial, trials)
    extra = {
        "reach_prob_mean": statistics.fmean(r["reach_prob"] for r in records),
        "pk_small_fraction": sum(r["pk_small"] for r in records) / len(records),
        "reference_1_over_2n": 1 / (2 * n),
        "reference_1_over_n": 1 / n,
    }
    notes = [
        "finite-n tolerance bands for the asymptotic statements are calibration "
        "choices, not derived constants"
    ]
    config = {"n": n, "m": m, "ell": ell, "quota": q, "trials": trials, "seed": seed}
    return ExperimentReport.aggregate("min-shapley", config, records, extra, notes)


def exponential_game(n: int, rho) -> tuple[SIWeights, int]:
    """Decreasing integer SI weights proportional to the exponential probabilities.

    Returns the weights and the scale ``L`` with ``weights = L * reversed(p)``.
    """
    probs = exponential_probs(n, rho)
    scale = math.lcm(*(p.denominator for p in probs))
    return SIWeights(tuple(int(p * scale) for p in reversed(probs))), scale


def select_interval_midpoints(
    n: int, rho, m: int, count: int, seed: int
) -> list[Fraction]:
    """Midpoints of ``count`` random intervals that clear the sampling margin."""
    si, scale = exponential_game(n, rho)
    margin = math.sqrt(math.log(n * m) / m)
    ok = []
    for iv in breakpoints(si):
        lo, hi = iv.lower / scale, iv.upper / scale
        if (hi - lo) / 2 >= margin:
            ok.append((lo + hi) / 2)
    if len(ok) < count:
        raise ValueError(
            f"only {len(ok)} intervals are wide enough for margin {margin:.6g}"
        )
    return sorted(random.Random(seed).sample(ok, count))


def run_exponential_match(
    n: int,
    rho,
    m: int,
    T_values: Sequence | None = None,
    trials: int = 50,
    seed: int = 0,
    intervals: int = 10,
    si_constant: float = 8,
) -> ExperimentReport:
    """Compare phi^w(mT) on sampled weights with phi^p(T) on the probabilities.

    A trial matches when the sampled vector is super-increasing and all
    requested T agree exactly. ``T_values=None`` picks midpoints of
    ``intervals`` random admissible intervals.
    """
    rho = as_fraction(rho)
    need = si_sample_threshold(n, rho, si_constant)
    if m < need:
        raise ValueError(f"m={m} is below the super-increasing threshold {need}")
    si, scale = exponential_game(n, rho)
    margin = math.sqrt(math.log(n * m) / m)
    if T_values is None:
        T_values = select_interval_midpoints(n, rho, m, intervals, seed)
    targets = []
    for T in T_values:
        T = as_fraction(T)
        if not 0 < T <= 1:
            raise ValueError(f"T must lie in (0, 1], got {T}")
        iv = si_interval(si, find_pset(si, T * scale))
        lo, hi = iv.lower / scale, iv.upper / scale
        # the top of the last interval is w(N)/m = 1 for every sample
        if T - lo < margin or (hi - T < margin and T != 1):
            edge = lo if T - lo < margin else hi
            raise ValueError(
                f"T={T} is within {margin:.6g} of the breakpoint {edge} "
                f"(distance {float(min(T - lo, hi - T)):.6g})"
            )
        phi_p = to_increasing([closed_form(iv.pset.members, i) for i in range(1, n + 1)])
        targets.append((T, phi_p))
    quota_list = [T * m for T, _ in targets]
    thresholds = [math.ceil(q) for q in quota_list]

    def trial(t: int) -> dict:
        s = derive_seed(seed, t)
        w = sample_weights(BallsBinsConfig.exponential(n, m, rho, s)).sorted
        base = {"trial": t, "seed": s, "digest": weights_digest(w)}
        if not is_super_increasing(w, order="increasing"):
            return {**base, "value": 0.0, "success": False, "reason": "not-SI", "si": False}
        ev = ShapleyEvaluator(w)
        vals = ev.pivot_values(sorted(set(thresholds)))
        index = {th: k for k, th in enumerate(sorted(set(thresholds)))}
        misses = [
            str(T) for (T, phi_p), th in zip(targets, thresholds)
            if [vals[a][index[th]] for a in range(1, n + 1)] != phi_p
        ]
        return {
            **base,
            "value": 1.0 - len(misses) / len(targets),
            "success": not misses,
            "reason": "" if not misses else "mismatch at T=" + ";".join(misses),
            "si": True,
        }

    records = _map_trials(trial, trials)
    extra = {"si_fraction": sum(r["si"] for r in records) / len(records), "margin": margin}
    config = {
        "n": n, "rho": str(rho), "m": m, "T_values": [str(T) for T, _ in targets],
        "trials": trials, "seed": seed, "si_threshold": need,
    }
    return ExperimentReport.aggregate("exponential-match", config, records, extra)


@dataclass
class SweepCurve:
    quotas: list[Fraction]
    agents: list[int]
    values: list[list[Fraction]]  # values[k][j]: agent agents[j] at quotas[k]
    digest: str

    def rows(self):
        for q, row in zip(self.quotas, self.values):
            for a, v in zip(self.agents, row):
                yield q, a, v

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["quota_num", "quota_den", "agent", "phi_num", "phi_den", "phi_float"])
        for q, a, v in self.rows():
            writer.writerow(
                [q.numerator, q.denominator, a, v.numerator, v.denominator, format(float(v), ".17g")]
            )
        return buf.getvalue()


def parse_grid(spec: str, weights: Sequence[int]) -> list[Fraction]:
    """Quota grids.

    ``integers`` (1..w(N)), ``half`` (integers and half-integers),
    ``breakpoints`` (all subset sums, needs n <= 20), ``midpoints`` (centres
    between multiples of w(N)/n), ``lo:hi:step`` (rationals, inclusive) or a
    comma-separated list.
    """
    total = sum(weights)
    n = len(weights)
    spec = spec.strip()
    if spec == "integers":
        grid = [Fraction(k) for k in range(1, total + 1)]
    elif spec == "half":
        grid = [Fraction(k, 2) for k in range(1, 2 * total + 1)]
    elif spec == "breakpoints":
        if n > 20:
            raise ValueError("breakpoint grids are limited to n <= 20")
        sums = {0}
        for w in weights:
            sums |= {s + w for s in sums}
        grid = [Fraction(s) for s in sorted(sums) if s > 0]
    elif spec == "midpoints":
        unit = Fraction(total, n)
        grid = [(ell + Fraction(1, 2)) * unit for ell in range(n)]
    elif ":" in spec:
        lo, hi, step = (Fraction(x) for x in spec.split(":"))
        if step <= 0:
            raise ValueError("grid step must be positive")
        grid = []
        q = lo
        while q <= hi:
            grid.append(q)
            q += step
    else:
        grid = [Fraction(x) for x in spec.split(",") if x.strip()]
    return grid


def quota_sweep(
    game_or_weights, grid: Sequence | str, agents: Sequence[int] | None = None
) -> SweepCurve:
    """Exact values at every quota of ``grid``; optionally only some agents."""
    weights = game_or_weights.weights if isinstance(game_or_weights, Game) else tuple(game_or_weights)
    if isinstance(grid, str):
        grid = parse_grid(grid, weights)
    quotas = sorted({as_fraction(q) for q in grid})
    if not quotas:
        raise ValueError("empty quota grid")
    total = sum(weights)
    for q in quotas:
        if not 0 < q <= total:
            raise ValueError(f"grid quota {q} outside (0, {total}]")
    agents = list(range(1, len(weights) + 1)) if agents is None else sorted(agents)
    thresholds = sorted({math.ceil(q) for q in quotas})
    ev = ShapleyEvaluator(weights, cap=max(thresholds))
    vals = ev.pivot_values(thresholds, agents)
    index = {th: k for k, th in enumerate(thresholds)}
    values = [[vals[a][index[math.ceil(q)]] for a in agents] for q in quotas]
    return SweepCurve(quotas, agents, values, weights_digest(weights))


def sweep_power_vectors(curve: SweepCurve) -> list[PowerVector]:
    """Full vectors per quota; only meaningful when every agent was swept."""
    return [PowerVector(row) for row in curve.values]
