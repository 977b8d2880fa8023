"""Row routing through trees and per-node threshold windows that preserve decision paths.

A node's window is the half-open range of thresholds that flips the branch
direction of at most floor(sigma * occupancy) of the rows passing through it;
sigma = 0 gives the exactly path-preserving range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import Forest

__all__ = [
    "Occupancy",
    "ThresholdInterval",
    "collect_intervals",
    "path_preserving_window",
    "route",
]

# (tree id, node id) -> routed dataset row indices (with multiplicity)
Occupancy = dict[tuple[int, int], np.ndarray]


@dataclass(frozen=True)
class ThresholdInterval:
    """Candidate threshold range [lo, hi) for one internal node, bounds clamped finite."""

    lo: float
    hi: float
    tree: int
    node: int
    feature: int


def _tree_samples(forest: Forest, n_rows: int, samples) -> list[np.ndarray]:
    if samples is None:
        return [np.arange(n_rows) for _ in forest.trees]
    if len(samples) != len(forest.trees):
        raise ValueError(f"need one sample list per tree, got {len(samples)}")
    out = []
    for j, rows in enumerate(samples):
        rows = np.asarray(rows, dtype=np.int64)
        if rows.size and (rows.min() < 0 or rows.max() >= n_rows):
            raise ValueError(f"tree {j}: sample index out of range [0, {n_rows})")
        out.append(rows)
    return out


def route(forest: Forest, X, samples=None) -> Occupancy:
    """Occupancy of every node against the forest's current thresholds.

    ``samples`` restricts each tree to its own row indices (bootstrap scope);
    by default all rows route through all trees.  Repeated indices keep their
    multiplicity.
    """
    X = np.asarray(X, dtype=np.float64)
    per_tree = _tree_samples(forest, len(X), samples)
    occupancy: Occupancy = {}
    for j, tree in enumerate(forest.trees):
        stack: list[tuple[int, np.ndarray]] = [(tree.root, per_tree[j])]
        while stack:
            node_id, rows = stack.pop()
            occupancy[(j, node_id)] = rows
            node = tree.nodes[node_id]
            if node.is_leaf:
                continue
            go_left = X[rows, node.feature] <= node.threshold
            stack.append((node.left, rows[go_left]))
            stack.append((node.right, rows[~go_left]))
    return occupancy


def path_preserving_window(values, theta: float, sigma: float = 0.0) -> tuple[float, float]:
    """Raw threshold window [lo, hi) for a node seeing ``values`` on its feature.

    With m = floor(sigma * len(values)): lo is the (m+1)-th largest value at
    most theta (else -inf) and hi is the (m+1)-th smallest value above theta
    (else +inf).  Any threshold inside the window flips at most m rows.
    """
    if not math.isfinite(theta):
        raise ValueError("theta must be finite")
    if not 0.0 <= sigma < 1.0:
        raise ValueError("sigma must lie in [0, 1)")
    values = np.asarray(values, dtype=np.float64)
    m = math.floor(sigma * len(values))
    left = np.sort(values[values <= theta])
    right = np.sort(values[values > theta])
    lo = float(left[-(m + 1)]) if len(left) >= m + 1 else -math.inf
    hi = float(right[m]) if len(right) >= m + 1 else math.inf
    return lo, hi


def collect_intervals(
    forest: Forest,
    X,
    occupancy: Occupancy,
    sigma: float = 0.0,
    samples=None,
) -> dict[int, list[ThresholdInterval]]:
    """Per-feature threshold windows for every internal node, infinite bounds clamped.

    Sentinels are replaced with (routed per-feature min - 1) / (max + 1); all
    finite window endpoints are data values, so clamping keeps every pairwise
    intersection intact.  A feature with no routed rows clamps around the
    node's own threshold instead.
    """
    X = np.asarray(X, dtype=np.float64)
    routed = np.unique(np.concatenate(_tree_samples(forest, len(X), samples))) if len(X) else np.array([], dtype=np.int64)
    have_rows = routed.size > 0
    if have_rows:
        feature_min = X[routed].min(axis=0)
        feature_max = X[routed].max(axis=0)

    intervals: dict[int, list[ThresholdInterval]] = {f: [] for f in range(forest.n_features)}
    for j, tree in enumerate(forest.trees):
        for node_id, node in tree.internal_items():
            rows = occupancy[(j, node_id)]
            lo, hi = path_preserving_window(X[rows, node.feature], node.threshold, sigma)
            if not math.isfinite(lo):
                lo = float(feature_min[node.feature]) - 1.0 if have_rows else node.threshold - 1.0
            if not math.isfinite(hi):
                hi = float(feature_max[node.feature]) + 1.0 if have_rows else node.threshold + 1.0
            intervals[node.feature].append(
                ThresholdInterval(lo=lo, hi=hi, tree=j, node=node_id, feature=node.feature)
            )
    return intervals
