"""Built-in fixtures: the two-tree golden example and random synthetic datasets."""

from __future__ import annotations

import numpy as np

from .data import Dataset
from .model import Aggregation, Forest, InternalNode, LeafNode, Tree

__all__ = ["example1_fixture", "synthetic_dataset"]


def example1_fixture() -> tuple[Forest, Dataset]:
    """Two depth-2 classification trees over four vectors.

    The four branching conditions (feature 0 at 4 and 5, feature 1 at 4 and 5)
    collapse to two shared conditions without moving any of the four vectors
    off its decision path.  Bootstrap rows {0,2,3} / {0,1,3} reproduce trees
    a midpoint-threshold CART learner can emit for those subsamples.
    """
    leaf0 = LeafNode((1.0, 0.0))
    leaf1 = LeafNode((0.0, 1.0))
    tree_a = Tree(
        nodes=(
            InternalNode(feature=0, threshold=4.0, left=1, right=2),
            leaf1,
            InternalNode(feature=1, threshold=5.0, left=3, right=4),
            leaf0,
            leaf1,
        ),
        root=0,
    )
    tree_b = Tree(
        nodes=(
            InternalNode(feature=1, threshold=4.0, left=1, right=2),
            leaf1,
            InternalNode(feature=0, threshold=5.0, left=3, right=4),
            leaf0,
            leaf1,
        ),
        root=0,
    )
    forest = Forest(
        trees=(tree_a, tree_b),
        task="classification",
        n_features=2,
        aggregation=Aggregation(mode="majority"),
        n_classes=2,
        bootstrap_indices=((0, 2, 3), (0, 1, 3)),
    )
    data = Dataset(
        X=np.array([[1.0, 1.0], [2.0, 7.0], [7.0, 2.0], [8.0, 8.0]]),
        labels=np.array([1.0, 0.0, 0.0, 1.0]),
    )
    return forest, data


def synthetic_dataset(n: int, d: int, task: str = "classification", seed: int = 0) -> Dataset:
    """Random dataset with a learnable signal: axis-aligned class boxes or a piecewise trend."""
    rng = np.random.default_rng(seed)
    X = rng.uniform(0.0, 10.0, size=(n, d))
    if task == "classification":
        cuts = rng.uniform(3.0, 7.0, size=2)
        labels = (X[:, 0] > cuts[0]).astype(np.float64)
        if d > 1:
            labels += X[:, 1] > cuts[1]
        n_classes = int(labels.max()) + 1
        noise = rng.random(n) < 0.05
        labels[noise] = rng.integers(0, n_classes, size=int(noise.sum()))
    else:
        labels = np.where(X[:, 0] <= 5.0, X[:, 0], 10.0 - X[:, 0])
        if d > 1:
            labels = labels + 0.5 * (X[:, 1] > 4.0)
        labels = labels + rng.normal(0.0, 0.1, size=n)
    return Dataset(X=X, labels=labels.astype(np.float64))
