import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from quotapower.game import Game


def brute_pk(game: Game, i: int, k: int) -> Fraction:
    """Pr over size-k subsets A of the others that q - w_i <= w(A) < q, by listing them."""
    others = [w for a, w in enumerate(game.weights, start=1) if a != i]
    wi = game.weights[i - 1]
    hits = sum(
        1 for A in itertools.combinations(others, k)
        if game.quota - wi <= sum(A) < game.quota
    )
    return Fraction(hits, math.comb(len(others), k))


@st.composite
def games(draw, n_max=7, w_max=20, allow_zero=True):
    n = draw(st.integers(1, n_max))
    lo = 0 if allow_zero else 1
    weights = draw(st.lists(st.integers(lo, w_max), min_size=n, max_size=n))
    if sum(weights) == 0:
        weights[0] = 1
    den = draw(st.integers(1, 5))
    num = draw(st.integers(1, sum(weights) * den))
    return Game(tuple(weights), Fraction(num, den))


@st.composite
def si_weights(draw, n_min=1, n_max=8, slack=6):
    """Decreasing super-increasing integer vectors."""
    from quotapower.superincreasing import SIWeights

    n = draw(st.integers(n_min, n_max))
    inc = []
    tail = 0
    for _ in range(n):
        w = tail + 1 + draw(st.integers(0, slack))
        inc.append(w)
        tail += w
    return SIWeights(tuple(reversed(inc)))


@pytest.fixture
def small_game():
    return Game((4, 2, 1), 3)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
