"""Exact Shapley-Shubik values for integer-weight voting games.

Agents are labelled ``1..n`` in every public function (this matches the CSV
output and the usual notation); ``PowerVector`` itself is an ordinary
0-indexed sequence.

Values are computed from subset-sum counting tables: for an agent ``i`` with
weight ``w_i`` and integer threshold ``t = ceil(q)``, the number of pivotal
orderings is

    sum_s  #{S subset of N \\ {i} : |S| = s, t - w_i <= w(S) < t} * s! (n-1-s)!

and dividing by ``n!`` gives the value. Everything stays in exact integers
until the final ``Fraction``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Game",
    "PowerVector",
    "CoalitionCountTable",
    "ShapleyEvaluator",
    "shapley_exact",
    "shapley_all",
    "shapley_oracle",
    "shapley_oracle_all",
    "shapley_diff",
    "all_equal_criterion",
    "exact_pk",
    "ORACLE_MAX_AGENTS",
]

ORACLE_MAX_AGENTS = 10

# Counts never exceed C(n, s) <= 2**n, so int64 is exact up to 62 agents.
_INT64_MAX_POOL = 62


def as_fraction(value) -> Fraction:
    """Exact conversion; strings may be ``"a/b"`` or decimals."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        # floats are exact binary rationals; go through repr to get the
        # decimal the user meant
        return Fraction(repr(value))
    return Fraction(value)


@dataclass(frozen=True)
class Game:
    """Weighted voting game: non-negative integer weights and a rational quota.

    Zero weights are allowed (empty bins); such agents are never pivotal.
    """

    weights: tuple[int, ...]
    quota: Fraction

    def __post_init__(self):
        weights = tuple(int(w) for w in self.weights)
        if any(int(w) != w for w in self.weights):
            raise ValueError("weights must be integers")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "quota", as_fraction(self.quota))
        if len(weights) < 1:
            raise ValueError("a game needs at least one agent")
        if any(w < 0 for w in weights):
            raise ValueError("weights must be non-negative")
        if not 0 < self.quota <= self.total:
            raise ValueError(
                f"quota must lie in (0, w(N)] = (0, {self.total}], got {self.quota}"
            )

    @property
    def n(self) -> int:
        return len(self.weights)

    @property
    def total(self) -> int:
        return sum(self.weights)

    @property
    def threshold(self) -> int:
        """Integer threshold: for integer sums, w(S) >= q iff w(S) >= ceil(q)."""
        return math.ceil(self.quota)

    @property
    def ordering(self) -> str:
        w = self.weights
        up = all(a <= b for a, b in zip(w, w[1:]))
        down = all(a >= b for a, b in zip(w, w[1:]))
        if up and down:
            return "constant"
        if up:
            return "non-decreasing"
        if down:
            return "non-increasing"
        return "unsorted"

    def with_quota(self, quota) -> "Game":
        return Game(self.weights, quota)

    def check_agent(self, i: int) -> int:
        if not 1 <= i <= self.n:
            raise IndexError(f"agent index {i} outside 1..{self.n}")
        return i - 1


class PowerVector(tuple):
    """Exact Shapley values, one ``Fraction`` per agent (0-indexed)."""

    def __new__(cls, values: Iterable[Fraction]):
        return super().__new__(cls, (Fraction(v) for v in values))

    def agent(self, i: int) -> Fraction:
        """Value of agent ``i`` (1-based)."""
        return self[i - 1]

    def total(self) -> Fraction:
        return sum(self, Fraction(0))

    def as_floats(self) -> list[float]:
        return [float(v) for v in self]


class CoalitionCountTable:
    """``counts[s, v]`` = number of subsets of ``pool`` with size ``s`` and sum ``v``.

    Columns are truncated at ``cap`` (exclusive) when only small sums matter;
    ``cap=None`` keeps every sum up to the pool total.
    """

    def __init__(self, pool: Sequence[int], counts: np.ndarray):
        self.pool = tuple(pool)
        self.counts = counts

    @property
    def cap(self) -> int:
        return self.counts.shape[1]

    @property
    def complete(self) -> bool:
        return self.cap > sum(self.pool)

    @staticmethod
    def _dtype(size: int):
        return np.int64 if size <= _INT64_MAX_POOL else object

    @classmethod
    def build(cls, pool: Sequence[int], cap: int | None = None) -> "CoalitionCountTable":
        pool = tuple(int(w) for w in pool)
        if cap is None:
            cap = sum(pool) + 1
        cap = max(int(cap), 0)
        counts = np.zeros((len(pool) + 1, cap), dtype=cls._dtype(len(pool)))
        if cap:
            counts[0, 0] = 1
        for k, w in enumerate(pool):
            if w >= cap:
                continue
            for s in range(k + 1, 0, -1):
                if w == 0:
                    counts[s] += counts[s - 1]
                else:
                    counts[s, w:] += counts[s - 1, : cap - w]
        return cls(pool, counts)

    def without(self, index: int) -> "CoalitionCountTable":
        """Table for the pool minus ``pool[index]``, by inverting one DP step."""
        w = self.pool[index]
        pool = self.pool[:index] + self.pool[index + 1 :]
        cap = self.cap
        src = self.counts
        out = np.zeros((len(pool) + 1, cap), dtype=self._dtype(len(pool)))
        if cap:
            out[0] = src[0]
        for s in range(1, len(pool) + 1):
            row = src[s].copy()
            if w == 0:
                row -= out[s - 1]
            elif w < cap:
                row[w:] -= out[s - 1, : cap - w]
            out[s] = row
        return CoalitionCountTable(pool, out)

    def window(self, lo: int, hi: int) -> list[int]:
        """Per size ``s``: number of subsets with ``lo <= sum < hi``."""
        lo = max(lo, 0)
        hi = min(hi, self.cap)
        if hi <= lo:
            return [0] * self.counts.shape[0]
        return [int(x) for x in self.counts[:, lo:hi].sum(axis=1)]


def _ordering_weight(pool_size: int) -> list[int]:
    """``s! (pool_size - s)!`` for every size ``s``."""
    f = [math.factorial(k) for k in range(pool_size + 1)]
    return [f[s] * f[pool_size - s] for s in range(pool_size + 1)]


def _value_from_counts(counts: Sequence[int], n: int) -> Fraction:
    weights = _ordering_weight(n - 1)
    pivotal = sum(c * wt for c, wt in zip(counts, weights))
    return Fraction(pivotal, math.factorial(n))


class ShapleyEvaluator:
    """Shapley values of one weight vector at many thresholds.

    Builds the counting table for all agents once, then peels off each agent
    with ``CoalitionCountTable.without``; agents with equal weights share the
    work.
    """

    def __init__(self, weights: Sequence[int], cap: int | None = None):
        self.weights = tuple(int(w) for w in weights)
        total = sum(self.weights)
        self.cap = total + 1 if cap is None else min(int(cap), total + 1)
        self._full = CoalitionCountTable.build(self.weights, self.cap)

    @property
    def n(self) -> int:
        return len(self.weights)

    def _agent_cumsums(self, index: int) -> np.ndarray:
        table = self._full.without(index).counts
        cum = np.zeros((table.shape[0], table.shape[1] + 1), dtype=table.dtype)
        cum[:, 1:] = np.cumsum(table, axis=1)
        return cum

    def pivot_values(
        self, thresholds: Sequence[int], agents: Sequence[int] | None = None
    ) -> dict[int, list[Fraction]]:
        """``{agent: [value at each threshold]}`` with 1-based agent labels."""
        thresholds = [int(t) for t in thresholds]
        if any(t > self.cap for t in thresholds):
            raise ValueError("threshold beyond the evaluator's column cap")
        agents = list(range(1, self.n + 1)) if agents is None else list(agents)
        by_weight: dict[int, list[Fraction]] = {}
        out: dict[int, list[Fraction]] = {}
        for a in agents:
            w = self.weights[a - 1]
            if w not in by_weight:
                cum = self._agent_cumsums(a - 1)
                vals = []
                for t in thresholds:
                    lo, hi = max(t - w, 0), max(t, 0)
                    if hi <= lo:
                        vals.append(Fraction(0))
                        continue
                    counts = [int(x) for x in cum[:, hi] - cum[:, lo]]
                    vals.append(_value_from_counts(counts, self.n))
                by_weight[w] = vals
            out[a] = by_weight[w]
        return out

    def power_vector(self, threshold: int) -> PowerVector:
        vals = self.pivot_values([threshold])
        return PowerVector(vals[a][0] for a in range(1, self.n + 1))


def shapley_exact(game: Game, i: int) -> Fraction:
    """Value of agent ``i`` from a counting table built over the other agents."""
    idx = game.check_agent(i)
    t = game.threshold
    w = game.weights[idx]
    others = game.weights[:idx] + game.weights[idx + 1 :]
    table = CoalitionCountTable.build(others, cap=t)
    return _value_from_counts(table.window(t - w, t), game.n)


def shapley_all(game: Game) -> PowerVector:
    return ShapleyEvaluator(game.weights, cap=game.threshold).power_vector(game.threshold)


def shapley_oracle_all(game: Game) -> PowerVector:
    """Brute force over all ``n!`` orderings.

    In each ordering exactly one agent is pivotal: the one whose arrival first
    brings the running sum to the quota.
    """
    n = game.n
    if n > ORACLE_MAX_AGENTS:
        raise ValueError(
            f"permutation oracle refuses n={n} (limit {ORACLE_MAX_AGENTS})"
        )
    w = game.weights
    q = game.quota
    hits = [0] * n
    for order in itertools.permutations(range(n)):
        running = 0
        for a in order:
            running += w[a]
            if running >= q:
                hits[a] += 1
                break
    total = math.factorial(n)
    return PowerVector(Fraction(h, total) for h in hits)


def shapley_oracle(game: Game, i: int) -> Fraction:
    idx = game.check_agent(i)
    return shapley_oracle_all(game)[idx]


def shapley_diff(game: Game, i: int, j: int) -> Fraction:
    """``|phi_j - phi_i|`` from the pairwise window sum over ``N \\ {i, j}``."""
    ii, jj = game.check_agent(i), game.check_agent(j)
    if ii == jj:
        raise ValueError("shapley_diff needs two distinct agents")
    n, t = game.n, game.threshold
    wi, wj = game.weights[ii], game.weights[jj]
    lo_w, hi_w = min(wi, wj), max(wi, wj)
    pool = [w for k, w in enumerate(game.weights) if k not in (ii, jj)]
    table = CoalitionCountTable.build(pool, cap=max(t - lo_w, 0))
    counts = table.window(t - hi_w, t - lo_w)
    # (1/(n-1)) * count / C(n-2, l)  ==  count * l! (n-2-l)! / (n-1)!
    weights = _ordering_weight(n - 2)
    return Fraction(sum(c * k for c, k in zip(counts, weights)), math.factorial(n - 1))


def _reachable(pool: Iterable[int]) -> int:
    """Bitset of achievable subset sums (bit v set iff some subset sums to v)."""
    reach = 1
    for w in pool:
        reach |= reach << w
    return reach


def all_equal_criterion(game: Game) -> bool:
    """True iff no pair i, j and S in N \\ {i, j} has q in (w(S+i), w(S+j)].

    With integer sums the condition is ``t - w_j <= w(S) < t - w_i``, checked
    by subset-sum reachability for each pair of distinct weights.
    """
    t = game.threshold
    w = game.weights
    seen: set[tuple[int, int]] = set()
    for a, b in itertools.combinations(range(game.n), 2):
        wa, wb = w[a], w[b]
        if wa == wb:
            continue
        key = (min(wa, wb), max(wa, wb))
        if key in seen:
            continue
        seen.add(key)
        small, big = key
        lo, hi = max(t - big, 0), t - small
        if hi <= lo:
            continue
        reach = _reachable(x for k, x in enumerate(w) if k not in (a, b))
        if (reach >> lo) & ((1 << (hi - lo)) - 1):
            return False
    return True


def exact_pk(game: Game, i: int, k: int) -> Fraction:
    """Pr over size-``k`` subsets A of N \\ {i} that ``q - w_i <= w(A) < q``."""
    idx = game.check_agent(i)
    if not 0 <= k <= game.n - 1:
        raise ValueError(f"subset size k={k} outside 0..{game.n - 1}")
    t = game.threshold
    w = game.weights[idx]
    others = game.weights[:idx] + game.weights[idx + 1 :]
    table = CoalitionCountTable.build(others, cap=t)
    return Fraction(table.window(t - w, t)[k], math.comb(game.n - 1, k))
