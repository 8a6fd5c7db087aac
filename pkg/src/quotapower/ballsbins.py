"""Seeded balls-and-bins weight generators and weight-level concentration checks.

Randomness: every stream is ``numpy.random.Generator(PCG64(seed))`` with a
64-bit seed. Per-trial seeds come from ``derive_seed`` (one splitmix64 step
applied to ``seed ^ trial``), so trials can run in any order or in parallel
and still produce identical draws.

Multinomial draws use sequential binomial conditioning: bin ``i`` receives
``Binomial(remaining, p_i / (p_i + ... + p_n))`` balls.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .game import as_fraction

__all__ = [
    "BallsBinsConfig",
    "SampledWeights",
    "derive_seed",
    "exponential_probs",
    "uniform_probs",
    "sample_weights",
    "min_weight_in_bounds",
    "si_sample_threshold",
    "DEFAULT_SI_CONSTANT",
    "read_probs",
]

MASK64 = (1 << 64) - 1
DEFAULT_SI_CONSTANT = 8


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def derive_seed(seed: int, trial: int) -> int:
    return splitmix64((seed ^ trial) & MASK64)


def uniform_probs(n: int) -> tuple[Fraction, ...]:
    if n < 1:
        raise ValueError("need at least one bin")
    return tuple(Fraction(1, n) for _ in range(n))


def exponential_probs(n: int, rho) -> tuple[Fraction, ...]:
    """``p_i`` proportional to ``rho**(n-i)``, normalized exactly (increasing)."""
    rho = as_fraction(rho)
    if not 0 < rho < Fraction(1, 2):
        raise ValueError(f"rho must lie in (0, 1/2), got {rho}")
    if n < 1:
        raise ValueError("need at least one bin")
    raw = [rho ** (n - i) for i in range(1, n + 1)]
    total = sum(raw)
    return tuple(r / total for r in raw)


@dataclass(frozen=True)
class BallsBinsConfig:
    n: int
    m: int
    probs: tuple = field(default=())
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one bin")
        if self.m < 0:
            raise ValueError("ball count must be non-negative")
        if not 0 <= self.seed <= MASK64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        probs = tuple(self.probs) if self.probs else uniform_probs(self.n)
        if len(probs) != self.n:
            raise ValueError(f"expected {self.n} probabilities, got {len(probs)}")
        if any(p < 0 for p in probs):
            raise ValueError("probabilities must be non-negative")
        total = sum(probs)
        exact = all(isinstance(p, (int, Fraction)) for p in probs)
        if (exact and total != 1) or (not exact and abs(float(total) - 1) > 1e-12):
            raise ValueError(f"probabilities must sum to 1, got {total}")
        object.__setattr__(self, "probs", probs)

    @classmethod
    def uniform(cls, n: int, m: int, seed: int = 0) -> "BallsBinsConfig":
        return cls(n, m, uniform_probs(n), seed)

    @classmethod
    def exponential(cls, n: int, m: int, rho, seed: int = 0) -> "BallsBinsConfig":
        return cls(n, m, exponential_probs(n, rho), seed)


@dataclass(frozen=True)
class SampledWeights:
    sorted: tuple[int, ...]
    raw: tuple[int, ...]
    seed: int

    @property
    def m(self) -> int:
        return sum(self.raw)

    @property
    def n(self) -> int:
        return len(self.raw)

    def to_json(self) -> dict:
        return {"weights": list(self.sorted), "m": self.m, "n": self.n, "seed": self.seed}


def _conditional_probs(probs: Sequence) -> list[float]:
    """``p_i / (p_i + ... + p_n)`` for each bin, suffix sums taken exactly."""
    exact = [p if isinstance(p, Fraction) else Fraction(p) for p in probs]
    out = []
    tail = sum(exact, Fraction(0))
    for p in exact:
        out.append(float(p / tail) if tail > 0 else 0.0)
        tail -= p
    return out


def sample_weights(config: BallsBinsConfig) -> SampledWeights:
    rng = np.random.Generator(np.random.PCG64(config.seed))
    cond = _conditional_probs(config.probs)
    remaining = config.m
    raw = []
    for p in cond[:-1]:
        x = int(rng.binomial(remaining, min(max(p, 0.0), 1.0))) if remaining else 0
        raw.append(x)
        remaining -= x
    raw.append(remaining)
    return SampledWeights(tuple(sorted(raw)), tuple(raw), config.seed)


def min_weight_in_bounds(n: int, m: int, w1: int) -> bool:
    """sqrt(m ln n / (3n)) <= m/n - w1 <= sqrt(4 m ln n / n), natural log."""
    gap = m / n - w1
    lo = math.sqrt(m * math.log(n) / (3 * n))
    hi = math.sqrt(4 * m * math.log(n) / n)
    return lo <= gap <= hi


def si_sample_threshold(n: int, rho, constant: float = DEFAULT_SI_CONSTANT) -> int:
    """Ball count above which exponential samples are super-increasing w.h.p."""
    rho = as_fraction(rho)
    if not 0 < rho < Fraction(1, 2):
        raise ValueError(f"rho must lie in (0, 1/2), got {rho}")
    r = float(rho)
    return math.ceil(constant * r ** (-n) * (1 - 2 * r) ** (-2) * math.log(n))


def read_probs(text: str) -> tuple[Fraction, ...]:
    """One rational (``a/b``) or decimal per non-blank line."""
    return tuple(
        Fraction(line.strip()) for line in text.splitlines() if line.strip()
    )
