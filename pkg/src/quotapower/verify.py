"""Invariant suites runnable from the command line."""

from __future__ import annotations

import random
from fractions import Fraction

from .game import Game, shapley_all, shapley_diff, shapley_exact, shapley_oracle_all
from .superincreasing import combinatorial_tail, identity_sides, _term


def check_identities(p_max: int = 40, k_max: int = 20) -> list[str]:
    """Return a description of every failing identity instance (empty = pass)."""
    failures = []
    for p in range(2, p_max + 1):
        for t in range(1, p):
            left, right = identity_sides(p, t)
            if left != right:
                failures.append(f"identity p={p} t={t}: {left} != {right}")
    for p in range(1, p_max + 1):
        for t in range(0, p):
            for k in range(0, k_max + 1):
                got = combinatorial_tail(p, t, k)
                want = _term(p + k, t + k)
                if got != want:
                    failures.append(f"tail p={p} t={t} k={k}: {got} != {want}")
    return failures


def random_game(rng: random.Random, n_min=2, n_max=8, w_max=20) -> Game:
    n = rng.randint(n_min, n_max)
    weights = tuple(rng.randint(0, w_max) for _ in range(n))
    if sum(weights) == 0:
        weights = (1,) + weights[1:]
    total = sum(weights)
    den = rng.randint(1, 6)
    num = rng.randint(1, total * den)
    return Game(weights, Fraction(num, den))


def check_oracle(games: int = 200, seed: int = 0, n_max: int = 8) -> list[str]:
    rng = random.Random(seed)
    failures = []
    for g in range(games):
        game = random_game(rng, n_max=n_max)
        oracle = shapley_oracle_all(game)
        fast = shapley_all(game)
        single = [shapley_exact(game, i) for i in range(1, game.n + 1)]
        if list(oracle) != list(fast) or list(oracle) != single:
            failures.append(f"game {g} {game}: oracle {oracle} vs dp {fast}")
            continue
        for i in range(1, game.n + 1):
            for j in range(i + 1, game.n + 1):
                d = shapley_diff(game, i, j)
                if d != abs(oracle[j - 1] - oracle[i - 1]):
                    failures.append(f"game {g} {game}: diff({i},{j}) = {d}")
    return failures
