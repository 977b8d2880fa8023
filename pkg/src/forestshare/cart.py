"""CART-style forest trainer for self-contained fixtures.

Split candidates are midpoints of adjacent distinct feature values;
classification splits maximize Gini impurity decrease, regression splits
maximize variance reduction.  Deterministic for a fixed seed.
"""

from __future__ import annotations

import numpy as np

from .data import Dataset
from .model import Aggregation, Forest, InternalNode, LeafNode, Tree

__all__ = ["fit_cart_forest"]


def _gini(counts: np.ndarray) -> float:
    total = counts.sum()
    if total == 0:
        return 0.0
    probs = counts / total
    return 1.0 - float(np.sum(probs * probs))


def _best_split_classification(X, y, rows, n_classes):
    """Return (feature, threshold, gain) of the best Gini split, or None."""
    n = len(rows)
    parent_counts = np.bincount(y[rows], minlength=n_classes)
    parent_gini = _gini(parent_counts)
    best = None
    for feature in range(X.shape[1]):
        col = X[rows, feature]
        order = np.argsort(col, kind="stable")
        vals = col[order]
        boundaries = np.nonzero(vals[:-1] != vals[1:])[0]
        if len(boundaries) == 0:
            continue
        one_hot = np.zeros((n, n_classes))
        one_hot[np.arange(n), y[rows][order]] = 1.0
        cum = np.cumsum(one_hot, axis=0)
        left_counts = cum[boundaries]
        right_counts = cum[-1] - left_counts
        n_left = (boundaries + 1).astype(np.float64)
        n_right = n - n_left
        gini_left = 1.0 - np.sum((left_counts / n_left[:, None]) ** 2, axis=1)
        gini_right = 1.0 - np.sum((right_counts / n_right[:, None]) ** 2, axis=1)
        gains = parent_gini - (n_left / n) * gini_left - (n_right / n) * gini_right
        pos = int(np.argmax(gains))
        gain = float(gains[pos])
        if gain > 0 and (best is None or gain > best[2]):
            b = boundaries[pos]
            best = (feature, (vals[b] + vals[b + 1]) / 2.0, gain)
    return best


def _best_split_regression(X, y, rows):
    """Return (feature, threshold, gain) of the best variance-reduction split, or None."""
    n = len(rows)
    target = y[rows]
    parent_sse = float(np.sum((target - target.mean()) ** 2))
    best = None
    for feature in range(X.shape[1]):
        col = X[rows, feature]
        order = np.argsort(col, kind="stable")
        vals = col[order]
        boundaries = np.nonzero(vals[:-1] != vals[1:])[0]
        if len(boundaries) == 0:
            continue
        t = target[order]
        cum_sum = np.cumsum(t)
        cum_sq = np.cumsum(t * t)
        n_left = (boundaries + 1).astype(np.float64)
        n_right = n - n_left
        sum_left = cum_sum[boundaries]
        sq_left = cum_sq[boundaries]
        sse_left = sq_left - sum_left**2 / n_left
        sse_right = (cum_sq[-1] - sq_left) - (cum_sum[-1] - sum_left) ** 2 / n_right
        gains = parent_sse - sse_left - sse_right
        pos = int(np.argmax(gains))
        gain = float(gains[pos])
        if gain > 1e-12 and (best is None or gain > best[2]):
            b = boundaries[pos]
            best = (feature, (vals[b] + vals[b + 1]) / 2.0, gain)
    return best


def _leaf(y, rows, task, n_classes):
    if task == "classification":
        counts = np.bincount(y[rows], minlength=n_classes).astype(np.float64)
        return LeafNode(tuple(counts.tolist()))
    return LeafNode(float(np.mean(y[rows])))


def _grow_tree(X, y, rows, max_depth, task, n_classes) -> Tree:
    nodes: list = []

    def grow(rows, depth) -> int:
        node_id = len(nodes)
        nodes.append(None)  # reserve the slot so ids are preorder
        pure = len(np.unique(y[rows])) <= 1
        if depth >= max_depth or len(rows) < 2 or pure:
            nodes[node_id] = _leaf(y, rows, task, n_classes)
            return node_id
        if task == "classification":
            split = _best_split_classification(X, y, rows, n_classes)
        else:
            split = _best_split_regression(X, y, rows)
        if split is None:
            nodes[node_id] = _leaf(y, rows, task, n_classes)
            return node_id
        feature, threshold, _ = split
        go_left = X[rows, feature] <= threshold
        left = grow(rows[go_left], depth + 1)
        right = grow(rows[~go_left], depth + 1)
        nodes[node_id] = InternalNode(feature=feature, threshold=float(threshold), left=left, right=right)
        return node_id

    grow(rows, 0)
    return Tree(nodes=tuple(nodes), root=0)


def fit_cart_forest(
    data: Dataset,
    n_trees: int = 10,
    max_depth: int = 5,
    bootstrap: bool = True,
    seed: int = 0,
    task: str = "classification",
) -> tuple[Forest, tuple[np.ndarray, ...]]:
    """Fit a small forest, returning it with the per-tree training row indices.

    Classification labels must be non-negative integers; the class count is
    taken as max(label) + 1.  With ``bootstrap`` each tree trains on n rows
    drawn with replacement (deterministic for the seed); otherwise every tree
    sees all rows.
    """
    if data.labels is None:
        raise ValueError("training requires labels")
    if data.n < 2:
        raise ValueError("training requires at least two rows")
    if task not in ("classification", "regression"):
        raise ValueError(f"unknown task {task!r}")

    X = data.X
    if task == "classification":
        y = data.labels.astype(np.int64)
        if (y < 0).any() or not np.allclose(y, data.labels):
            raise ValueError("classification labels must be non-negative integers")
        n_classes = int(y.max()) + 1
    else:
        y = data.labels
        n_classes = None

    rng = np.random.default_rng(seed)
    trees = []
    samples = []
    for _ in range(n_trees):
        if bootstrap:
            rows = rng.integers(0, data.n, size=data.n)
        else:
            rows = np.arange(data.n)
        samples.append(rows)
        trees.append(_grow_tree(X, y, rows, max_depth, task, n_classes))

    aggregation = Aggregation(mode="majority" if task == "classification" else "mean")
    forest = Forest(
        trees=tuple(trees),
        task=task,
        n_features=data.d,
        aggregation=aggregation,
        n_classes=n_classes,
        bootstrap_indices=tuple(tuple(int(r) for r in rows) for rows in samples) if bootstrap else None,
    )
    return forest, tuple(samples)
