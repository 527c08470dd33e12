import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

import oracle
from conftest import sample_strategy
from varmono.amgm import (
    a2_lower_bound,
    amgm_gap,
    cartwright_field_bounds,
    full_report,
    thm4_bounds,
)
from varmono.core import WeightedSample
from varmono.errors import ExponentRange, NegativeValue, NonpositiveValue, TooFewPoints

ONE_FOUR = WeightedSample([1, 4])
ZERO_FOUR = WeightedSample([0, 4])
CONST = WeightedSample([2.5, 2.5, 2.5], [1, 2, 3])
R_GRID = [0.05, 0.2, 0.5, 0.8, 1.0]
S_GRID = [1.0, 1.5, 2.0, 4.0, 8.0]


def within(lo, x, hi, rel=1e-9):
    return lo <= x + rel * abs(x) + 1e-300 and x <= hi + rel * abs(hi) + 1e-300


class TestGap:
    def test_two_point(self):
        assert amgm_gap(ONE_FOUR) == 0.5

    def test_constant(self):
        assert amgm_gap(CONST) == 0.0

    def test_zero_value(self):
        assert amgm_gap(ZERO_FOUR) == 2.0

    def test_subnormal(self):
        # exact rescaling by 2**k commutes with the gap
        x = WeightedSample([3e-310, 1.2e-309], [0.3, 0.7])
        k = 1060
        assert amgm_gap(x) == math.ldexp(amgm_gap(WeightedSample(np.ldexp(x.values, k), x.weights)), -k)
        assert amgm_gap(WeightedSample([5e-324, 5e-324])) == 0.0

    def test_subnormal_point_among_normal(self):
        x = WeightedSample([5e-324, 2, 3, 6], [0.00065062, 0.33311646, 0.33311646, 0.33311646])
        want = oracle.amgm_gap(x.values, x.weights)
        assert oracle.rel_err(amgm_gap(x), want) < 1e-12

    def test_near_equal_values(self):
        v = [1.0, 1.0 + 1e-9, 1.0 - 3e-10]
        assert oracle.rel_err(amgm_gap(WeightedSample(v)), oracle.amgm_gap(v)) < 1e-12

    def test_negative(self):
        with pytest.raises(NegativeValue):
            amgm_gap(WeightedSample([-1, 4]))

    def test_single_point(self):
        with pytest.raises(TooFewPoints):
            amgm_gap(WeightedSample([3.0]))

    @given(sample_strategy(min_n=2, lo=1e-6, hi=1e6))
    def test_matches_oracle(self, x):
        want = oracle.amgm_gap(x.values, x.weights)
        # absolute allowance 1e-39 * x_max, far below the resolution of the mean
        assert oracle.rel_err(amgm_gap(x), want, 1e-28 * x.x_max) < 1e-11


class TestThm4:
    def test_two_point(self):
        assert thm4_bounds(ONE_FOUR) == pytest.approx((0.5, 0.5), rel=1e-14)

    def test_zero_value(self):
        assert thm4_bounds(ZERO_FOUR) == pytest.approx((2.0, 2.0), rel=1e-14)

    def test_constant(self):
        assert thm4_bounds(CONST) == (0.0, 0.0)

    @pytest.mark.parametrize("r,s", [(0, 1), (1.5, 1), (1, 0.5), (-1, 2), (1, math.inf)])
    def test_range(self, r, s):
        with pytest.raises(ExponentRange):
            thm4_bounds(ONE_FOUR, r, s)

    def test_single_point(self):
        with pytest.raises(TooFewPoints):
            thm4_bounds(WeightedSample([1.0]))

    @given(sample_strategy(min_n=2, hi=1e4), st.sampled_from(R_GRID), st.sampled_from(S_GRID))
    def test_sandwich(self, x, r, s):
        lower, upper = thm4_bounds(x, r, s)
        assert within(lower, amgm_gap(x), upper)

    @given(sample_strategy(min_n=2, hi=1e4))
    def test_monotone_tightening(self, x):
        best_lower, best_upper = thm4_bounds(x, 1, 1)
        for r in R_GRID:
            assert thm4_bounds(x, r, 1).lower <= best_lower * (1 + 1e-9)
        for s in S_GRID:
            assert best_upper <= thm4_bounds(x, 1, s).upper * (1 + 1e-9)

    @given(sample_strategy(min_n=2, hi=1e4))
    def test_dominates_a2(self, x):
        lower = thm4_bounds(x).lower
        a2 = a2_lower_bound(x)
        assert lower >= a2
        assert lower == pytest.approx(a2 / (1 - x.alpha_min), rel=1e-14)

    @given(st.floats(0, 1e8), st.floats(0, 1e8))
    def test_two_point_sharp(self, a, b):
        x = WeightedSample([a, b])
        gap = amgm_gap(x)
        lower, upper = thm4_bounds(x)
        assert abs(lower - gap) <= 1e-12 * max(1.0, gap)
        assert abs(upper - gap) <= 1e-12 * max(1.0, gap)
        root_sum = math.sqrt(a) + math.sqrt(b)
        if root_sum > 0:
            assert gap == pytest.approx(((a - b) / root_sum) ** 2 / 2, rel=1e-12, abs=1e-300)


class TestCartwrightField:
    def test_two_point(self):
        assert cartwright_field_bounds(ONE_FOUR) == (0.28125, 1.125)

    def test_weighted(self):
        lower, upper = cartwright_field_bounds(WeightedSample([2, 8], [0.75, 0.25]))
        assert (lower, upper) == (0.421875, 1.6875)
        gap = amgm_gap(WeightedSample([2, 8], [0.75, 0.25]))
        assert lower <= gap <= upper
        assert abs(gap - 0.67157) < 5e-6

    def test_constant(self):
        assert cartwright_field_bounds(CONST) == (0.0, 0.0)

    @pytest.mark.parametrize("scale", [1e-290, 1e-150, 1e150, 1e290])
    def test_extreme_scale(self, scale):
        # Var itself under- or overflows here, the bounds do not
        lower, upper = cartwright_field_bounds(WeightedSample([scale, 4 * scale]))
        assert lower == pytest.approx(0.28125 * scale, rel=1e-14)
        assert upper == pytest.approx(1.125 * scale, rel=1e-14)

    def test_requires_positive(self):
        with pytest.raises(NonpositiveValue):
            cartwright_field_bounds(ZERO_FOUR)

    @given(sample_strategy(min_n=2, lo=1e-3, hi=1e4, allow_zero=False))
    def test_sandwich(self, x):
        lower, upper = cartwright_field_bounds(x)
        assert within(lower, amgm_gap(x), upper)


class TestA2:
    def test_two_point(self):
        assert a2_lower_bound(ONE_FOUR) == pytest.approx(0.25, rel=1e-14)

    def test_zero_value(self):
        assert a2_lower_bound(ZERO_FOUR) == pytest.approx(1.0, rel=1e-14)

    def test_constant(self):
        assert a2_lower_bound(CONST) == 0.0

    @given(sample_strategy(min_n=2, hi=1e4))
    def test_lower_bound(self, x):
        assert a2_lower_bound(x) <= amgm_gap(x) * (1 + 1e-9) + 1e-300


class TestReport:
    def test_two_point(self):
        rep = full_report(ONE_FOUR)
        assert rep.gap == 0.5
        assert (rep.lower_thm4, rep.upper_thm4) == pytest.approx((0.5, 0.5), rel=1e-14)
        assert (rep.lower_cf, rep.upper_cf) == (0.28125, 1.125)
        assert rep.lower_a2 == pytest.approx(0.25, rel=1e-14)
        assert rep.tightest_lower == "thm4" and rep.tightest_upper == "thm4"

    def test_zero_value(self):
        rep = full_report(ZERO_FOUR)
        assert rep.lower_cf is None and rep.upper_cf is None
        assert (rep.gap, rep.lower_thm4, rep.upper_thm4) == pytest.approx((2, 2, 2), rel=1e-14)
        assert rep.lower_a2 == pytest.approx(1.0, rel=1e-14)

    def test_constant_ties_prefer_thm4(self):
        rep = full_report(CONST)
        assert (rep.gap, rep.lower_thm4, rep.upper_thm4, rep.lower_a2) == (0, 0, 0, 0)
        assert (rep.lower_cf, rep.upper_cf) == (0, 0)
        assert rep.tightest_lower == "thm4" and rep.tightest_upper == "thm4"

    def test_cf_can_win(self):
        # many points and a tiny minimum weight make 1/alpha_min large
        x = WeightedSample([1.0, 1.1, 1.2, 1.3], [1, 1, 1, 1e-3])
        rep = full_report(x)
        assert rep.tightest_upper == "cf"

    def test_to_dict(self):
        d = full_report(ONE_FOUR, 0.5, 2).to_dict()
        assert d["r"] == 0.5 and d["s"] == 2.0 and d["n"] == 2

    @given(sample_strategy(min_n=2, hi=1e4))
    def test_invariants(self, x):
        rep = full_report(x)
        assume(rep.gap > 0)
        assert within(rep.lower_thm4, rep.gap, rep.upper_thm4)
        assert rep.lower_a2 <= rep.gap * (1 + 1e-9)
        if rep.lower_cf is not None:
            assert within(rep.lower_cf, rep.gap, rep.upper_cf)
