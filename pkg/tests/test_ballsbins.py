import math
import statistics
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from quotapower.ballsbins import (
    BallsBinsConfig,
    derive_seed,
    exponential_probs,
    min_weight_in_bounds,
    read_probs,
    sample_weights,
    si_sample_threshold,
    splitmix64,
    uniform_probs,
)
from quotapower.superincreasing import is_super_increasing


def test_exponential_probs_examples():
    assert exponential_probs(1, F(1, 3)) == (F(1),)
    assert exponential_probs(2, F(1, 3)) == (F(1, 4), F(3, 4))
    assert sum(exponential_probs(7, F(2, 5))) == 1
    with pytest.raises(ValueError):
        exponential_probs(3, F(1, 2))
    with pytest.raises(ValueError):
        exponential_probs(3, 0)


def test_config_validation():
    with pytest.raises(ValueError):
        BallsBinsConfig(2, 10, (F(1, 2), F(1, 3)))
    with pytest.raises(ValueError):
        BallsBinsConfig(2, 10, (0.5, 0.5 + 1e-9))
    with pytest.raises(ValueError):
        BallsBinsConfig(2, -1)
    with pytest.raises(ValueError):
        BallsBinsConfig(3, 10, (F(1, 2), F(1, 2)))
    BallsBinsConfig(2, 10, (0.25, 0.75))
    assert BallsBinsConfig(3, 5).probs == uniform_probs(3)


def test_sample_examples():
    assert sample_weights(BallsBinsConfig(1, 100, seed=3)).sorted == (100,)
    assert sample_weights(BallsBinsConfig.uniform(4, 0, seed=3)).sorted == (0, 0, 0, 0)
    a = sample_weights(BallsBinsConfig.uniform(10, 5000, seed=11))
    b = sample_weights(BallsBinsConfig.uniform(10, 5000, seed=11))
    assert a == b
    assert a != sample_weights(BallsBinsConfig.uniform(10, 5000, seed=12))
    assert a.to_json() == {"weights": list(a.sorted), "m": 5000, "n": 10, "seed": 11}


def test_splitmix_reference_value():
    # first output of splitmix64 seeded with 0
    assert splitmix64(0) == 0xE220A8397B1DCDAF
    assert derive_seed(5, 3) == splitmix64(5 ^ 3)


def test_zero_probability_bin_stays_empty():
    w = sample_weights(BallsBinsConfig(3, 1000, (F(1, 2), F(0), F(1, 2)), seed=1))
    assert w.raw[1] == 0


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 12), st.integers(0, 10**6), st.integers(0, 2**64 - 1))
def test_conservation_and_sorting(n, m, seed):
    w = sample_weights(BallsBinsConfig.uniform(n, m, seed))
    assert sum(w.sorted) == m
    assert list(w.sorted) == sorted(w.sorted)
    assert sorted(w.raw) == list(w.sorted)


def test_uniform_bin_means():
    n, m, trials = 8, 10_000, 400
    draws = [sample_weights(BallsBinsConfig.uniform(n, m, derive_seed(7, t))).raw for t in range(trials)]
    sigma = math.sqrt(m * (1 / n) * (1 - 1 / n))
    for i in range(n):
        mean = statistics.fmean(d[i] for d in draws)
        assert abs(mean - m / n) <= 3 * sigma / math.sqrt(trials)


def test_exponential_ratio_concentrates():
    n, rho = 5, F(3, 10)

    def median_error(m):
        errs = []
        for t in range(60):
            w = sample_weights(BallsBinsConfig.exponential(n, m, rho, derive_seed(21, t))).sorted
            errs.append(max(abs(w[i] / w[i + 1] - 0.3) for i in range(n - 1) if w[i + 1]))
        return statistics.median(errs)

    assert median_error(10**6) < median_error(10**4)


def test_min_weight_bounds_examples():
    assert not min_weight_in_bounds(30, 30_000, 1000)
    n, m = 30, 10**5
    w1 = math.floor(m / n - math.sqrt(m * math.log(n) / n))
    assert min_weight_in_bounds(n, m, w1)


def test_min_weight_bounds_empirical():
    n, m, trials = 30, 10**5, 500
    hits = sum(
        min_weight_in_bounds(n, m, sample_weights(BallsBinsConfig.uniform(n, m, derive_seed(9, t))).sorted[0])
        for t in range(trials)
    )
    assert hits / trials >= 1 - 2 / n - 0.05


def test_si_threshold_examples():
    expected = math.ceil(8 * 2.5**6 * 25 * math.log(6))
    assert si_sample_threshold(6, F(2, 5)) == expected
    assert si_sample_threshold(6, F(2, 5), constant=1) < expected
    assert si_sample_threshold(6, F(1, 5)) < si_sample_threshold(6, F(1, 10))
    with pytest.raises(ValueError):
        si_sample_threshold(6, F(1, 2))


def test_si_threshold_empirical():
    n, rho = 6, F(2, 5)
    m = si_sample_threshold(n, rho)
    hits = sum(
        is_super_increasing(sample_weights(BallsBinsConfig.exponential(n, m, rho, derive_seed(4, t))).sorted)
        for t in range(200)
    )
    assert hits / 200 >= 1 - 5 / n


def test_read_probs():
    assert read_probs("1/4\n\n0.75\n") == (F(1, 4), F(3, 4))
