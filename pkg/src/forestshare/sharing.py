"""Threshold sharing across a forest.

Methods: exact (paths unchanged), sigma (per-node flip budget), exceptions
(per-feature budget of intervals the shared points may miss), and a k-means
threshold-clustering baseline.  All methods rewrite thresholds on a copy of
the forest; topology, leaf values, and aggregation are untouched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .model import Forest, Tree
from .paths import ThresholdInterval, collect_intervals, route
from .stabbing import StabbingSolution, min_stabbing_set, min_stabbing_set_with_exceptions

__all__ = [
    "ShareResult",
    "SharingConfig",
    "kmeans_1d",
    "kmeans_share",
    "share_thresholds",
    "share_thresholds_with_exceptions",
    "simplify",
]

METHODS = ("exact", "sigma", "exceptions", "kmeans")


@dataclass(frozen=True)
class SharingConfig:
    """One sharing method plus its parameter; scope picks all-rows or per-tree routing."""

    method: str = "exact"
    sigma: float = 0.0
    exception_ratio: float = 0.0
    k: int | None = None
    sample_scope: str = "all"  # "all" | "per-tree"

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}, expected one of {METHODS}")
        if not 0.0 <= self.sigma < 1.0:
            raise ValueError("sigma must lie in [0, 1)")
        if not 0.0 <= self.exception_ratio < 1.0:
            raise ValueError("exception_ratio must lie in [0, 1)")
        if self.method != "sigma" and self.sigma != 0.0:
            raise ValueError("sigma is only meaningful with method='sigma'")
        if self.method != "exceptions" and self.exception_ratio != 0.0:
            raise ValueError("exception_ratio is only meaningful with method='exceptions'")
        if self.method == "kmeans":
            if self.k is None or self.k < 1:
                raise ValueError("method='kmeans' needs k >= 1")
        elif self.k is not None:
            raise ValueError("k is only meaningful with method='kmeans'")
        if self.sample_scope not in ("all", "per-tree"):
            raise ValueError(f"unknown sample_scope {self.sample_scope!r}")


@dataclass
class ShareResult:
    """Simplified forest plus the per-feature evidence used to rewrite it."""

    forest: Forest
    intervals: dict[int, list[ThresholdInterval]] | None = None
    solutions: dict[int, StabbingSolution] | None = None
    centers: dict[int, tuple[float, ...]] | None = None


def _rewrite(forest: Forest, new_thresholds: dict[tuple[int, int], float]) -> Forest:
    trees = []
    for j, tree in enumerate(forest.trees):
        nodes = list(tree.nodes)
        for node_id, node in tree.internal_items():
            key = (j, node_id)
            if key in new_thresholds:
                nodes[node_id] = replace(node, threshold=float(new_thresholds[key]))
        trees.append(Tree(nodes=tuple(nodes), root=tree.root))
    return replace(forest, trees=tuple(trees))


def _solve_and_rewrite(forest, intervals_by_feature, solver) -> ShareResult:
    solutions: dict[int, StabbingSolution] = {}
    new_thresholds: dict[tuple[int, int], float] = {}
    for feature in sorted(intervals_by_feature):
        ivs = intervals_by_feature[feature]
        if not ivs:
            continue
        solution = solver(feature, [(iv.lo, iv.hi) for iv in ivs])
        solutions[feature] = solution
        for point, group in zip(solution.points, solution.groups):
            for idx in group:
                new_thresholds[(ivs[idx].tree, ivs[idx].node)] = point
    return ShareResult(
        forest=_rewrite(forest, new_thresholds),
        intervals=intervals_by_feature,
        solutions=solutions,
    )


def share_thresholds(forest: Forest, X, sigma: float = 0.0, samples=None) -> ShareResult:
    """Share thresholds via minimum stabbing of the per-node windows.

    sigma = 0 guarantees every routed row keeps its exact decision path and
    the per-feature shared-point count is the minimum possible for the
    collected windows.
    """
    occupancy = route(forest, X, samples)
    intervals = collect_intervals(forest, X, occupancy, sigma=sigma, samples=samples)
    return _solve_and_rewrite(forest, intervals, lambda _f, ivs: min_stabbing_set(ivs))


def share_thresholds_with_exceptions(
    forest: Forest, X, exception_ratio: float, samples=None
) -> ShareResult:
    """Exact windows, but per feature up to floor(ratio * p) windows may be missed.

    A feature whose budget is not smaller than its window count falls back to
    the exact solver.  Missed nodes take the nearest shared point.
    """
    if not 0.0 <= exception_ratio < 1.0:
        raise ValueError("exception_ratio must lie in [0, 1)")
    occupancy = route(forest, X, samples)
    intervals = collect_intervals(forest, X, occupancy, sigma=0.0, samples=samples)

    def solver(_feature, ivs):
        budget = math.floor(exception_ratio * len(ivs))
        if budget >= len(ivs):
            return min_stabbing_set(ivs)
        return min_stabbing_set_with_exceptions(ivs, budget)

    return _solve_and_rewrite(forest, intervals, solver)


def kmeans_1d(values, k: int, weights=None) -> np.ndarray:
    """Globally optimal 1-D k-means centers via dynamic programming over sorted values.

    Optimal clusters are contiguous in sorted order, so a table over
    (cluster count, prefix length) suffices.  Returns ascending centers,
    at most min(k, #distinct values) of them.
    """
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise ValueError("need at least one value")
    if k < 1:
        raise ValueError("k must be >= 1")
    weights = np.ones_like(values) if weights is None else np.asarray(weights, dtype=np.float64)
    order = np.argsort(values, kind="stable")
    v = values[order]
    w = weights[order]
    k = min(k, len(np.unique(v)))

    n = len(v)
    pw = np.concatenate([[0.0], np.cumsum(w)])
    pwx = np.concatenate([[0.0], np.cumsum(w * v)])
    pwx2 = np.concatenate([[0.0], np.cumsum(w * v * v)])

    def seg_cost(i, j):
        # weighted SSE of v[i..j] inclusive, for all i in the given array
        sw = pw[j + 1] - pw[i]
        sx = pwx[j + 1] - pwx[i]
        sx2 = pwx2[j + 1] - pwx2[i]
        return np.maximum(sx2 - sx * sx / sw, 0.0)

    INF = np.inf
    cost = np.full((k + 1, n), INF)
    split = np.zeros((k + 1, n), dtype=np.int64)
    idx = np.arange(n)
    cost[1] = seg_cost(np.zeros(n, dtype=np.int64), idx)
    for g in range(2, k + 1):
        for j in range(g - 1, n):
            starts = np.arange(g - 1, j + 1)
            total = cost[g - 1][starts - 1] + seg_cost(starts, j)
            pos = int(np.argmin(total))
            cost[g][j] = total[pos]
            split[g][j] = starts[pos]

    boundaries = []
    j = n - 1
    for g in range(k, 1, -1):
        s = int(split[g][j])
        boundaries.append(s)
        j = s - 1
    boundaries = [0] + sorted(boundaries) + [n]

    centers = []
    for a, b in zip(boundaries[:-1], boundaries[1:]):
        chunk = v[a:b]
        if chunk[0] == chunk[-1]:
            centers.append(float(chunk[0]))  # identical values stay bit-exact
        else:
            centers.append(float(np.sum(w[a:b] * chunk) / np.sum(w[a:b])))
    return np.array(centers)


def kmeans_share(forest: Forest, k: int) -> ShareResult:
    """Cluster each feature's threshold multiset and snap thresholds to the centers."""
    if k < 1:
        raise ValueError("k must be >= 1")
    by_feature: dict[int, list[tuple[int, int, float]]] = {}
    for j, tree in enumerate(forest.trees):
        for node_id, node in tree.internal_items():
            by_feature.setdefault(node.feature, []).append((j, node_id, node.threshold))

    centers_by_feature: dict[int, tuple[float, ...]] = {}
    new_thresholds: dict[tuple[int, int], float] = {}
    for feature in sorted(by_feature):
        entries = by_feature[feature]
        thresholds = np.array([t for _, _, t in entries])
        distinct, counts = np.unique(thresholds, return_counts=True)
        centers = kmeans_1d(distinct, k, weights=counts.astype(np.float64))
        centers_by_feature[feature] = tuple(centers.tolist())
        for j, node_id, t in entries:
            dists = np.abs(centers - t)
            new_thresholds[(j, node_id)] = float(centers[int(np.argmin(dists))])
    return ShareResult(forest=_rewrite(forest, new_thresholds), centers=centers_by_feature)


def simplify(forest: Forest, X, config: SharingConfig, samples=None) -> ShareResult:
    """Dispatch on the configured method; per-tree scope takes the forest's bootstrap rows."""
    if config.sample_scope == "per-tree" and samples is None:
        if forest.bootstrap_indices is None:
            raise ValueError("per-tree scope needs bootstrap indices (model has none)")
        samples = [np.asarray(rows, dtype=np.int64) for rows in forest.bootstrap_indices]
    if config.method == "exact":
        return share_thresholds(forest, X, sigma=0.0, samples=samples)
    if config.method == "sigma":
        return share_thresholds(forest, X, sigma=config.sigma, samples=samples)
    if config.method == "exceptions":
        return share_thresholds_with_exceptions(forest, X, config.exception_ratio, samples=samples)
    return kmeans_share(forest, config.k)
