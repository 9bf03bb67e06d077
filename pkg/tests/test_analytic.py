import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qperc import analytic as an
from qperc.errors import ConvergenceError


def _survival_oracle(delta):
    # plain bisection on f(g) = 1 - exp(-(1+delta) g) - g over (0, 1)
    lo, hi = 1e-300, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if 1 - math.exp(-(1 + delta) * mid) - mid > 0:
            lo = mid
        else:
            hi = mid
    return lo


def test_survival_values():
    assert an.survival_probability(0.0) == 0.0
    assert an.survival_probability(-0.3) == 0.0
    assert an.survival_probability(1.0) == pytest.approx(0.796812, abs=1e-6)
    assert an.survival_probability(0.5) == pytest.approx(0.5828, abs=1e-3)
    assert 0.9 <= an.survival_probability(0.01) / 0.02 <= 1.0


@given(st.floats(1e-3, 5.0))
def test_survival_matches_oracle(delta):
    g = an.survival_probability(an.SurvivalQuery(delta, 1e-13))
    assert abs(g - _survival_oracle(delta)) < 1e-10
    assert abs(g - (1 - math.exp(-(1 + delta) * g))) < 1e-10


def test_survival_bad_tol():
    with pytest.raises(ValueError):
        an.SurvivalQuery(0.5, tol=0.0)


def test_chernoff_examples():
    assert an.chernoff_deviation(100, 0.5, 25).value == pytest.approx(2 * math.exp(-3.125))
    assert an.chernoff_upper(100, 0.5, math.e).value == pytest.approx(1.0)
    with pytest.raises(ValueError):
        an.chernoff_deviation(100, 0.5, 26)
    with pytest.raises(ValueError):
        an.chernoff_upper(100, 0.5, 0)


def test_chernoff_log_space_no_underflow():
    r = an.chernoff_upper(10**6, 0.5, 50.0)
    assert r.value == 0.0 or r.value < 1e-300
    assert math.isfinite(r.log_value) and r.log_value < -1e5


def test_harper_examples():
    assert an.harper_bound(1, 9) == 9
    for k in range(0, 9):
        assert an.harper_bound(2 ** k, 9) == pytest.approx(2 ** k * (9 - k))
    with pytest.raises(ValueError):
        an.harper_bound(0, 5)


def test_entropy_examples():
    assert an.binary_entropy(0.5) == 1.0
    assert an.binary_entropy(0) == 0 and an.binary_entropy(1) == 0
    assert an.inverse_binary_entropy(0) == 0
    assert an.inverse_binary_entropy(1) == 0.5
    with pytest.raises(ValueError):
        an.binary_entropy(1.5)
    with pytest.raises(ValueError):
        an.inverse_binary_entropy(-0.1)


def test_entropy_roundtrip():
    ys = np.random.default_rng(0).random(1000)
    for y in ys:
        x = an.inverse_binary_entropy(y)
        assert 0 <= x <= 0.5
        assert abs(an.binary_entropy(x) - y) < 1e-10


def test_tree_count_examples():
    assert an.tree_count_bound(5, 1) == 1
    assert an.tree_count_bound(6, 2) >= 6


@given(st.integers(1, 30), st.integers(1, 40))
def test_tree_count_positive_and_monotone_in_degree(D, k):
    assert an.log_tree_count_bound(D, k) <= an.log_tree_count_bound(D + 1, k) + 1e-12
    assert an.tree_count_bound(D, k) >= 1


def test_b_of_s():
    assert an.b_of_s(1, 10) == 1
    assert an.b_of_s(2 ** 10, 10) == 0
    assert an.b_of_s(2 ** 5, 10) == 0.5
    with pytest.raises(ValueError):
        an.b_of_s(0.5, 10)
    assert an.piece_radius(1, 10, 1.0) == 20.0


def _growth_oracle(d, c7, c8, x, target):
    rounds, radius = 0, 0.0
    while x < target:
        b = 1 - math.log2(x) / d
        radius += 2 * d / (c8 * b) + 5
        x = x * (1 + c7 * b)
        rounds += 1
    return rounds, radius


def test_growth_schedule():
    assert an.growth_schedule(10, 1, 1, 8, 8) == (0, 0)
    rounds, radius = an.growth_schedule(20, 1, 1, 1, 2 ** 19)
    r2, rad2 = _growth_oracle(20, 1, 1, 1, 2 ** 19)
    assert rounds == r2 and radius == pytest.approx(rad2, rel=1e-12)
    with pytest.raises(ValueError):
        an.growth_schedule(10, 1, 1, 1, 2 ** 10)
    with pytest.raises(ConvergenceError):
        an.growth_schedule(20, 1e-9, 1, 1, 2 ** 19, max_rounds=10)


@given(st.integers(6, 24), st.floats(0.2, 3), st.floats(0.2, 3))
def test_growth_matches_oracle(d, c7, c8):
    target = 2 ** (d - 1)
    rounds, radius = an.growth_schedule(d, c7, c8, 1, target)
    r2, rad2 = _growth_oracle(d, c7, c8, 1, target)
    assert rounds == r2 and radius == pytest.approx(rad2, rel=1e-9)
