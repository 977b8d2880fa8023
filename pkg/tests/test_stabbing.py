"""Interval stabbing solvers against hand traces, brute-force oracles, and properties."""

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from forestshare.stabbing import (
    min_stabbing_set,
    min_stabbing_set_brute,
    min_stabbing_set_with_exceptions,
    min_stabbing_set_with_exceptions_brute,
)

from conftest import random_intervals


def stabbed(interval, points):
    lo, hi = interval
    return any(lo <= s < hi for s in points)


intervals_strategy = st.lists(
    st.tuples(st.integers(0, 30), st.integers(1, 10)).map(
        lambda t: (float(t[0]), float(t[0] + t[1]))
    ),
    min_size=1,
    max_size=12,
)


class TestExactGreedy:
    def test_single_interval_midpoint(self):
        solution = min_stabbing_set([(0.0, 2.0)])
        assert solution.points == (1.0,)
        assert solution.groups == ((0,),)

    def test_nested_intervals_single_point(self):
        # running intersection ends as [2, 8), midpoint 5
        solution = min_stabbing_set([(0.0, 10.0), (1.0, 9.0), (2.0, 8.0)])
        assert solution.points == (5.0,)
        assert solution.groups == ((0, 1, 2),)

    def test_two_runs(self):
        # gap at lo=4 >= running min upper 3 forces a second point
        solution = min_stabbing_set([(1.0, 3.0), (2.0, 5.0), (4.0, 6.0)])
        assert solution.points == (2.5, 5.0)
        assert solution.groups == ((0, 1), (2,))

    def test_rejects_empty_and_degenerate(self):
        with pytest.raises(ValueError):
            min_stabbing_set([])
        with pytest.raises(ValueError):
            min_stabbing_set([(2.0, 2.0)])
        with pytest.raises(ValueError):
            min_stabbing_set([(0.0, float("inf"))])

    def test_groups_partition_and_points_hit_their_groups(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            intervals = random_intervals(rng)
            solution = min_stabbing_set(intervals)
            flat = sorted(i for grp in solution.groups for i in grp)
            assert flat == list(range(len(intervals)))
            for point, group in zip(solution.points, solution.groups):
                for i in group:
                    assert stabbed(intervals[i], [point])
            assert list(solution.points) == sorted(solution.points)

    @given(intervals_strategy)
    @settings(max_examples=150, deadline=None)
    def test_matches_brute_force(self, intervals):
        assert min_stabbing_set(intervals).size == min_stabbing_set_brute(intervals)

    @given(intervals_strategy, st.integers(0, 3), st.integers(0, 3))
    @settings(max_examples=100, deadline=None)
    def test_widening_never_needs_more_points(self, intervals, grow_lo, grow_hi):
        wider = [(lo - grow_lo, hi + grow_hi) for lo, hi in intervals]
        assert min_stabbing_set(wider).size <= min_stabbing_set(intervals).size


class TestBruteForce:
    def test_single(self):
        assert min_stabbing_set_brute([(0.0, 2.0)]) == 1

    def test_disjoint_needs_one_each(self):
        assert min_stabbing_set_brute([(0.0, 1.0), (2.0, 3.0), (4.0, 5.0)]) == 3

    def test_size_cap_exceeded(self):
        with pytest.raises(RuntimeError):
            min_stabbing_set_brute([(0.0, 1.0), (2.0, 3.0), (4.0, 5.0)], size_cap=2)


class TestExceptionBudgetDP:
    def test_zero_budget_reduces_to_exact(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            intervals = random_intervals(rng)
            assert min_stabbing_set_with_exceptions(intervals, 0) == min_stabbing_set(intervals)

    def test_drop_one_of_three_disjoint(self):
        solution = min_stabbing_set_with_exceptions([(0.0, 1.0), (10.0, 11.0), (20.0, 21.0)], 1)
        assert solution.size == 2

    def test_drop_outlier_then_single_point(self):
        solution = min_stabbing_set_with_exceptions([(0.0, 2.0), (1.0, 3.0), (5.0, 6.0)], 1)
        assert solution.size == 1
        # the two overlapping intervals are stabbed inside their intersection [1, 2)
        assert 1.0 <= solution.points[0] < 2.0

    def test_budget_not_below_interval_count(self):
        with pytest.raises(ValueError):
            min_stabbing_set_with_exceptions([(0.0, 1.0)], 1)
        with pytest.raises(ValueError):
            min_stabbing_set_with_exceptions([(0.0, 1.0)], -1)

    def test_matches_brute_and_respects_budget(self):
        rng = np.random.default_rng(13)
        for _ in range(250):
            intervals = random_intervals(rng, max_p=10, lo_range=16, max_width=6, min_p=2)
            budget = int(rng.integers(0, min(4, len(intervals))))
            solution = min_stabbing_set_with_exceptions(intervals, budget)
            assert solution.size == min_stabbing_set_with_exceptions_brute(intervals, budget)
            missed = sum(1 for iv in intervals if not stabbed(iv, solution.points))
            assert missed <= budget

    def test_brute_equals_literal_drop_subsets_definition(self):
        # cross-check the candidate-point search against dropping every <=c subset
        def literal(intervals, c):
            best = None
            for size in range(c + 1):
                for dropped in itertools.combinations(range(len(intervals)), size):
                    rest = [iv for i, iv in enumerate(intervals) if i not in dropped]
                    if not rest:
                        continue
                    k = min_stabbing_set_brute(rest)
                    best = k if best is None else min(best, k)
            return best

        rng = np.random.default_rng(17)
        for _ in range(60):
            intervals = random_intervals(rng, max_p=8, lo_range=12, max_width=5, min_p=2)
            budget = int(rng.integers(0, min(3, len(intervals))))
            assert min_stabbing_set_with_exceptions_brute(intervals, budget) == literal(
                intervals, budget
            )

    def test_budget_monotonicity(self):
        rng = np.random.default_rng(19)
        for _ in range(100):
            intervals = random_intervals(rng, max_p=10, min_p=4)
            sizes = [
                min_stabbing_set_with_exceptions(intervals, c).size
                for c in range(min(3, len(intervals) - 1) + 1)
            ]
            assert sizes == sorted(sizes, reverse=True)

    def test_groups_are_nearest_point_with_smaller_index_ties(self):
        rng = np.random.default_rng(23)
        for _ in range(120):
            intervals = random_intervals(rng, max_p=10, min_p=2)
            budget = int(rng.integers(0, min(3, len(intervals))))
            solution = min_stabbing_set_with_exceptions(intervals, budget)
            owner = {}
            for g, group in enumerate(solution.groups):
                for i in group:
                    assert i not in owner
                    owner[i] = g
            assert sorted(owner) == list(range(len(intervals)))
            for i, (lo, hi) in enumerate(intervals):
                dists = [max(lo - s, s - hi, 0.0) for s in solution.points]
                assert owner[i] == dists.index(min(dists))

    def test_remark_style_suffix_equality(self):
        # when the budget is below interval i's rank in the suffix upper-bound
        # order, dropping interval i cannot help, so D(i, j) == D(i+1, j)
        rng = np.random.default_rng(29)
        for _ in range(60):
            intervals = random_intervals(rng, max_p=9, min_p=3)
            intervals.sort(key=lambda iv: iv)
            p = len(intervals)
            budget = min(3, p - 1)

            def dp_size(suffix, c):
                if not suffix:
                    return 0
                c = min(c, len(suffix) - 1)
                return min_stabbing_set_with_exceptions(suffix, c).size

            for i in range(p - 1):
                suffix = intervals[i:]
                uppers = sorted(enumerate(suffix), key=lambda t: (t[1][1], t[0]))
                rank = next(pos for pos, (idx, _) in enumerate(uppers) if idx == 0)
                for j in range(min(budget, rank)):
                    if len(suffix) - 1 <= j:
                        continue
                    assert dp_size(suffix, j) == dp_size(suffix[1:], j)
