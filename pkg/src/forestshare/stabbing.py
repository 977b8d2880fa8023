"""Minimum interval stabbing: exact greedy solver, exception-budget DP, and brute-force oracles.

All solvers work on finite half-open intervals [lo, hi) and return the chosen
stab points together with the interval groups each point serves.
"""

from __future__ import annotations

import bisect
import itertools
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "StabbingSolution",
    "min_stabbing_set",
    "min_stabbing_set_brute",
    "min_stabbing_set_with_exceptions",
    "min_stabbing_set_with_exceptions_brute",
]


@dataclass(frozen=True)
class StabbingSolution:
    """Stab points in ascending order plus, per point, the input-interval indices it serves.

    Every input index appears in exactly one group.  For the exact solver the
    group's point lies inside each of its intervals; for the exception-budget
    solver intervals are grouped with their nearest point (missed intervals
    included), ties going to the smaller point index.
    """

    points: tuple[float, ...]
    groups: tuple[tuple[int, ...], ...]

    @property
    def size(self) -> int:
        return len(self.points)


def _check_intervals(intervals) -> None:
    if len(intervals) == 0:
        raise ValueError("need at least one interval")
    for i, (lo, hi) in enumerate(intervals):
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise ValueError(f"interval {i} has non-finite bounds [{lo}, {hi})")
        if not lo < hi:
            raise ValueError(f"interval {i} is empty or inverted: [{lo}, {hi})")


def _sorted_order(intervals) -> list[int]:
    # ties on lo broken by hi, then original index, so output is deterministic
    return sorted(range(len(intervals)), key=lambda i: (intervals[i][0], intervals[i][1], i))


def min_stabbing_set(intervals) -> StabbingSolution:
    """Smallest point set hitting every interval, via one sweep over the lo-sorted list.

    A maximal prefix of the sorted list with a non-empty running intersection
    is served by a single point placed at the midpoint of that intersection.
    """
    _check_intervals(intervals)
    order = _sorted_order(intervals)
    points: list[float] = []
    groups: list[tuple[int, ...]] = []
    run_start = 0
    t = intervals[order[0]][1]  # min upper bound of the current run
    for pos in range(1, len(order)):
        lo, hi = intervals[order[pos]]
        if lo >= t:
            prev_lo = intervals[order[pos - 1]][0]
            points.append((prev_lo + t) / 2.0)
            groups.append(tuple(order[run_start:pos]))
            run_start = pos
            t = hi
        elif hi < t:
            t = hi
    points.append((intervals[order[-1]][0] + t) / 2.0)
    groups.append(tuple(order[run_start:]))
    return StabbingSolution(tuple(points), tuple(groups))


def min_stabbing_set_brute(intervals, size_cap: int | None = None) -> int:
    """Exhaustive oracle for the minimum stabbing-set size.

    Any stabbing point can be slid right onto the largest lower bound among
    the intervals it hits, so searching subsets of the lo endpoints suffices.
    Intended for small inputs (roughly p <= 15).
    """
    _check_intervals(intervals)
    candidates = sorted({lo for lo, _ in intervals})
    cap = len(candidates) if size_cap is None else min(size_cap, len(candidates))
    for k in range(1, cap + 1):
        for chosen in itertools.combinations(candidates, k):
            if all(any(lo <= s < hi for s in chosen) for lo, hi in intervals):
                return k
    raise RuntimeError(f"size cap {cap} exceeded without covering every interval")


def _point_interval_distance(s: float, lo: float, hi: float) -> float:
    # distance from point s to the half-open interval [lo, hi)
    return max(lo - s, s - hi, 0.0)


def min_stabbing_set_with_exceptions(intervals, max_misses: int) -> StabbingSolution:
    """Smallest point set hitting all but at most ``max_misses`` intervals.

    Solved by dynamic programming over the lo-sorted list.  State (i, j) is
    the minimum number of points needed for the suffix starting at sorted
    position i when j misses may still be spent.  The leftmost point of an
    optimal suffix solution can be normalized to lie just below the upper
    bound of the interval with the (h+1)-th smallest upper bound in the
    suffix, having spent h misses; candidate anchors are pruned to those that
    advance the follow-up suffix.  The effective budget used is the smallest
    one achieving the optimal size, and the output groups assign every
    interval (missed ones included) to its nearest point.
    """
    _check_intervals(intervals)
    p = len(intervals)
    c = int(max_misses)
    if c < 0:
        raise ValueError("exception budget must be non-negative")
    if p <= c:
        raise ValueError(f"exception budget {c} must be smaller than the interval count {p}")

    order = _sorted_order(intervals)
    lo = np.array([intervals[i][0] for i in order], dtype=np.float64)
    hi = np.array([intervals[i][1] for i in order], dtype=np.float64)
    # nxt[q]: first sorted position m with lo[m] >= hi[q]; p when none exists
    nxt = np.searchsorted(lo, hi, side="left")

    INF = p + 1
    width = c + 1
    # dp[i][j]: minimum points for suffix i.. with j misses allowed; row p is the empty suffix
    dp = np.zeros((p + 1, width), dtype=np.int64)
    anchor = np.full((p + 1, width), -1, dtype=np.int64)  # chosen anchor interval (sorted pos)
    spent = np.zeros((p + 1, width), dtype=np.int64)  # misses spent by the chosen anchor

    uorder: list[tuple[float, int]] = []  # suffix intervals keyed by (hi, sorted pos), ascending
    for i in range(p - 1, -1, -1):
        bisect.insort(uorder, (hi[i], i))
        remaining = p - i
        if remaining <= c:
            j_lo = remaining  # dp[i][j] = 0 for j >= remaining
        else:
            j_lo = width
        j_max = min(c, remaining - 1)  # largest non-trivial budget at this state

        # anchor candidates: h misses skip the h intervals with the smallest upper bounds
        qs = [uorder[h][1] for h in range(j_max + 1)]
        kept = [0]
        for h in range(1, j_max + 1):
            if nxt[qs[h - 1]] < nxt[qs[h]]:
                kept.append(h)

        cand = np.full((len(kept), width), INF, dtype=np.int64)
        for row, h in enumerate(kept):
            cand[row, h:] = dp[nxt[qs[h]], : width - h]
        best_rows = np.argmin(cand, axis=0)
        best_vals = cand[best_rows, np.arange(width)]

        take = np.arange(width) < j_lo  # non-trivial budgets only
        dp[i, take] = best_vals[take] + 1
        dp[i, ~take] = 0
        kept_arr = np.array(kept, dtype=np.int64)
        anchor[i, take] = np.array(qs, dtype=np.int64)[kept_arr[best_rows[take]]]
        spent[i, take] = kept_arr[best_rows[take]]
        anchor[i, ~take] = -1
        spent[i, ~take] = 0

    # smallest budget that already reaches the optimum
    j = c
    while j > 0 and dp[0, j - 1] == dp[0, j]:
        j -= 1

    points: list[float] = []
    i = 0
    while p - i > j:
        q = int(anchor[i, j])
        h = int(spent[i, j])
        nxt_i = int(nxt[q])
        points.append(float(lo[nxt_i - 1] + hi[q]) / 2.0)
        i, j = nxt_i, j - h

    # nearest-point grouping over all inputs, ties to the smaller point index
    groups: list[list[int]] = [[] for _ in points]
    for pos in range(p):
        dists = [_point_interval_distance(s, lo[pos], hi[pos]) for s in points]
        groups[dists.index(min(dists))].append(order[pos])
    return StabbingSolution(tuple(points), tuple(tuple(g) for g in groups))


def min_stabbing_set_with_exceptions_brute(intervals, max_misses: int) -> int:
    """Exhaustive oracle for the exception-allowing variant.

    Equivalent to taking the minimum of the exact brute force over every way
    of discarding at most ``max_misses`` intervals: a candidate point set of
    size k is acceptable as soon as it leaves at most that many intervals
    unstabbed.  Intended for small inputs (roughly p <= 10, budget <= 3).
    """
    _check_intervals(intervals)
    p = len(intervals)
    c = int(max_misses)
    if p <= c:
        raise ValueError(f"exception budget {c} must be smaller than the interval count {p}")
    candidates = sorted({lo for lo, _ in intervals})
    for k in range(1, len(candidates) + 1):
        for chosen in itertools.combinations(candidates, k):
            missed = sum(1 for lo, hi in intervals if not any(lo <= s < hi for s in chosen))
            if missed <= c:
                return k
    raise RuntimeError("unreachable: the full candidate set stabs every interval")
