"""Decision-forest data model: nodes, trees, JSON serialization, prediction, condition counting.

Branching semantics are fixed: an internal node tests ``x[feature] <= threshold``
and routes left on success.  All types are immutable after construction.
"""

from __future__ import annotations

import json
import math
import struct
from dataclasses import dataclass
from typing import Iterator, Union

import numpy as np

__all__ = [
    "Aggregation",
    "BranchingCondition",
    "Forest",
    "InternalNode",
    "LeafNode",
    "ModelFormatError",
    "Node",
    "Tree",
    "count_distinct_conditions",
    "leaf_path",
    "load_model",
    "predict",
    "predict_many",
    "save_model",
    "tree_leaf_ids",
    "validate_forest",
]


class ModelFormatError(ValueError):
    """Raised when a model violates the JSON schema or a structural invariant."""


@dataclass(frozen=True)
class BranchingCondition:
    """A (feature id, threshold) pair standing for the test x[feature] <= threshold."""

    feature_id: int
    threshold: float


@dataclass(frozen=True)
class InternalNode:
    feature: int
    threshold: float
    left: int
    right: int

    @property
    def is_leaf(self) -> bool:
        return False

    @property
    def condition(self) -> BranchingCondition:
        return BranchingCondition(self.feature, self.threshold)


@dataclass(frozen=True)
class LeafNode:
    # class-score vector for classification, scalar for regression
    value: Union[float, tuple[float, ...]]

    @property
    def is_leaf(self) -> bool:
        return True


Node = Union[InternalNode, LeafNode]


@dataclass(frozen=True)
class Tree:
    nodes: tuple[Node, ...]
    root: int = 0

    def internal_items(self) -> Iterator[tuple[int, InternalNode]]:
        for node_id, node in enumerate(self.nodes):
            if not node.is_leaf:
                yield node_id, node


@dataclass(frozen=True)
class Aggregation:
    """How per-tree outputs combine: majority vote, mean, or weighted sum with a bias."""

    mode: str  # "majority" | "mean" | "weighted_sum"
    weights: tuple[float, ...] | None = None
    bias: float = 0.0


@dataclass(frozen=True)
class Forest:
    trees: tuple[Tree, ...]
    task: str  # "classification" | "regression"
    n_features: int
    aggregation: Aggregation
    n_classes: int | None = None
    bootstrap_indices: tuple[tuple[int, ...], ...] | None = None


def validate_forest(forest: Forest) -> None:
    """Check every structural invariant, raising ModelFormatError with the offending location."""
    if forest.task not in ("classification", "regression"):
        raise ModelFormatError(f"unknown task {forest.task!r}")
    agg = forest.aggregation
    if agg.mode not in ("majority", "mean", "weighted_sum"):
        raise ModelFormatError(f"unknown aggregation mode {agg.mode!r}")
    if agg.mode == "majority" and forest.task != "classification":
        raise ModelFormatError("majority aggregation requires a classification task")
    if agg.mode == "mean" and forest.task != "regression":
        raise ModelFormatError("mean aggregation requires a regression task")
    if agg.mode == "weighted_sum":
        if agg.weights is None or len(agg.weights) != len(forest.trees):
            raise ModelFormatError("weighted_sum needs one weight per tree")
    if forest.task == "classification" and (forest.n_classes is None or forest.n_classes < 1):
        raise ModelFormatError("classification forests need n_classes >= 1")
    if forest.bootstrap_indices is not None and len(forest.bootstrap_indices) != len(forest.trees):
        raise ModelFormatError("bootstrap_indices needs one row list per tree")

    for j, tree in enumerate(forest.trees):
        n_nodes = len(tree.nodes)
        if not 0 <= tree.root < n_nodes:
            raise ModelFormatError(f"tree {j}: root id {tree.root} out of range")
        parents = [0] * n_nodes
        for h, node in enumerate(tree.nodes):
            if node.is_leaf:
                if forest.task == "classification":
                    if not isinstance(node.value, tuple) or len(node.value) != forest.n_classes:
                        raise ModelFormatError(
                            f"tree {j} node {h}: classification leaf needs a "
                            f"{forest.n_classes}-long score vector"
                        )
                elif not isinstance(node.value, float):
                    raise ModelFormatError(f"tree {j} node {h}: regression leaf needs a scalar")
                continue
            if not 0 <= node.feature < forest.n_features:
                raise ModelFormatError(
                    f"tree {j} node {h}: feature id {node.feature} out of range "
                    f"[0, {forest.n_features})"
                )
            if not math.isfinite(node.threshold):
                raise ModelFormatError(f"tree {j} node {h}: threshold must be finite")
            for child in (node.left, node.right):
                if not 0 <= child < n_nodes:
                    raise ModelFormatError(f"tree {j} node {h}: child id {child} is dangling")
                parents[child] += 1
            if node.left == node.right:
                raise ModelFormatError(f"tree {j} node {h}: left and right children coincide")
        if parents[tree.root] != 0:
            raise ModelFormatError(f"tree {j}: cycle detected, root {tree.root} has a parent")
        for h in range(n_nodes):
            if h != tree.root and parents[h] != 1:
                kind = "multiple parents" if parents[h] > 1 else "unreachable node"
                raise ModelFormatError(f"tree {j} node {h}: {kind}")
        # parent counts are consistent, so one DFS pass suffices to rule out cycles
        seen = set()
        stack = [tree.root]
        while stack:
            h = stack.pop()
            if h in seen:
                raise ModelFormatError(f"tree {j}: cycle detected at node {h}")
            seen.add(h)
            node = tree.nodes[h]
            if not node.is_leaf:
                stack.extend((node.left, node.right))
        if len(seen) != n_nodes:
            raise ModelFormatError(f"tree {j}: {n_nodes - len(seen)} nodes unreachable from root")


# ---------------------------------------------------------------------------
# JSON serialization
# ---------------------------------------------------------------------------


def _node_to_json(node: Node) -> dict:
    if node.is_leaf:
        value = list(node.value) if isinstance(node.value, tuple) else node.value
        return {"kind": "leaf", "value": value}
    return {
        "kind": "internal",
        "feature": node.feature,
        "threshold": node.threshold,
        "left": node.left,
        "right": node.right,
    }


def save_model(forest: Forest) -> bytes:
    """Serialize to the model JSON schema; thresholds keep full round-trip precision."""
    doc: dict = {
        "task": forest.task,
        "n_features": forest.n_features,
        "aggregation": {"mode": forest.aggregation.mode},
        "trees": [
            {"root": tree.root, "nodes": [_node_to_json(n) for n in tree.nodes]}
            for tree in forest.trees
        ],
    }
    if forest.n_classes is not None:
        doc["n_classes"] = forest.n_classes
    if forest.aggregation.weights is not None:
        doc["aggregation"]["weights"] = list(forest.aggregation.weights)
    if forest.aggregation.mode == "weighted_sum":
        doc["aggregation"]["bias"] = forest.aggregation.bias
    if forest.bootstrap_indices is not None:
        doc["bootstrap_indices"] = [list(rows) for rows in forest.bootstrap_indices]
    return json.dumps(doc, allow_nan=False).encode("utf-8")


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ModelFormatError(message)


def _parse_node(raw: dict, location: str) -> Node:
    _require(isinstance(raw, dict), f"{location}: node must be an object")
    kind = raw.get("kind")
    if kind == "leaf":
        value = raw.get("value")
        if isinstance(value, list):
            _require(
                all(isinstance(v, (int, float)) for v in value),
                f"{location}: leaf vector entries must be numbers",
            )
            return LeafNode(tuple(float(v) for v in value))
        _require(isinstance(value, (int, float)), f"{location}: leaf value must be a number")
        return LeafNode(float(value))
    if kind == "internal":
        for key in ("feature", "threshold", "left", "right"):
            _require(key in raw, f"{location}: internal node missing {key!r}")
        _require(
            isinstance(raw["feature"], int) and isinstance(raw["left"], int)
            and isinstance(raw["right"], int),
            f"{location}: feature and child ids must be integers",
        )
        _require(isinstance(raw["threshold"], (int, float)), f"{location}: threshold must be a number")
        return InternalNode(
            feature=raw["feature"],
            threshold=float(raw["threshold"]),
            left=raw["left"],
            right=raw["right"],
        )
    raise ModelFormatError(f"{location}: unknown node kind {kind!r}")


def load_model(data: bytes | str) -> Forest:
    """Parse and fully validate a model from its JSON encoding."""
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"not valid JSON: {exc}") from exc
    _require(isinstance(doc, dict), "top level must be an object")
    task = doc.get("task")
    _require(task in ("classification", "regression"), f"unknown task {task!r}")
    n_features = doc.get("n_features")
    _require(isinstance(n_features, int) and n_features >= 1, "n_features must be a positive integer")
    n_classes = doc.get("n_classes")
    if n_classes is not None:
        _require(isinstance(n_classes, int) and n_classes >= 1, "n_classes must be a positive integer")

    raw_agg = doc.get("aggregation")
    _require(isinstance(raw_agg, dict), "aggregation must be an object")
    weights = raw_agg.get("weights")
    if weights is not None:
        _require(
            isinstance(weights, list) and all(isinstance(w, (int, float)) for w in weights),
            "aggregation weights must be a list of numbers",
        )
        weights = tuple(float(w) for w in weights)
    bias = raw_agg.get("bias", 0.0)
    _require(isinstance(bias, (int, float)), "aggregation bias must be a number")
    aggregation = Aggregation(mode=raw_agg.get("mode"), weights=weights, bias=float(bias))

    raw_trees = doc.get("trees")
    _require(isinstance(raw_trees, list), "trees must be a list")
    trees = []
    for j, raw_tree in enumerate(raw_trees):
        _require(isinstance(raw_tree, dict), f"tree {j}: must be an object")
        raw_nodes = raw_tree.get("nodes")
        _require(isinstance(raw_nodes, list) and raw_nodes, f"tree {j}: needs a non-empty node list")
        nodes = tuple(_parse_node(raw, f"tree {j} node {h}") for h, raw in enumerate(raw_nodes))
        root = raw_tree.get("root", 0)
        _require(isinstance(root, int), f"tree {j}: root must be an integer")
        trees.append(Tree(nodes=nodes, root=root))

    bootstrap = doc.get("bootstrap_indices")
    if bootstrap is not None:
        _require(
            isinstance(bootstrap, list)
            and all(isinstance(rows, list) and all(isinstance(r, int) for r in rows) for rows in bootstrap),
            "bootstrap_indices must be a list of integer lists",
        )
        bootstrap = tuple(tuple(rows) for rows in bootstrap)

    forest = Forest(
        trees=tuple(trees),
        task=task,
        n_features=n_features,
        aggregation=aggregation,
        n_classes=n_classes,
        bootstrap_indices=bootstrap,
    )
    validate_forest(forest)
    return forest


# ---------------------------------------------------------------------------
# Prediction
# ---------------------------------------------------------------------------


def leaf_path(tree: Tree, x) -> list[int]:
    """Root-to-leaf node ids visited by x; left is taken iff x[feature] <= threshold."""
    path = [tree.root]
    node = tree.nodes[tree.root]
    while not node.is_leaf:
        nxt = node.left if x[node.feature] <= node.threshold else node.right
        path.append(nxt)
        node = tree.nodes[nxt]
    return path


def tree_leaf_ids(tree: Tree, X: np.ndarray, rows: np.ndarray | None = None) -> np.ndarray:
    """Leaf node id reached by each requested row of X (all rows by default)."""
    if rows is None:
        rows = np.arange(len(X))
    out = np.empty(len(rows), dtype=np.int64)
    stack: list[tuple[int, np.ndarray]] = [(tree.root, np.arange(len(rows)))]
    while stack:
        node_id, positions = stack.pop()
        node = tree.nodes[node_id]
        if node.is_leaf:
            out[positions] = node_id
            continue
        go_left = X[rows[positions], node.feature] <= node.threshold
        stack.append((node.left, positions[go_left]))
        stack.append((node.right, positions[~go_left]))
    return out


def _leaf_matrix(tree: Tree, n_classes: int) -> np.ndarray:
    mat = np.zeros((len(tree.nodes), n_classes))
    for node_id, node in enumerate(tree.nodes):
        if node.is_leaf:
            mat[node_id] = node.value
    return mat


def _leaf_scalars(tree: Tree) -> np.ndarray:
    vals = np.zeros(len(tree.nodes))
    for node_id, node in enumerate(tree.nodes):
        if node.is_leaf:
            vals[node_id] = node.value
    return vals


def predict_many(forest: Forest, X) -> np.ndarray:
    """Aggregate predictions for every row of X: class ids or regression values."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != forest.n_features:
        raise ValueError(f"expected an (n, {forest.n_features}) matrix, got shape {X.shape}")
    n = len(X)
    agg = forest.aggregation

    if forest.task == "classification":
        scores = np.zeros((n, forest.n_classes))
        for j, tree in enumerate(forest.trees):
            leaves = tree_leaf_ids(tree, X)
            leaf_mat = _leaf_matrix(tree, forest.n_classes)
            if agg.mode == "majority":
                votes = np.argmax(leaf_mat[leaves], axis=1)
                scores[np.arange(n), votes] += 1.0
            else:  # weighted_sum; scalar bias shifts every class equally, so it is ignored
                scores += agg.weights[j] * leaf_mat[leaves]
        return np.argmax(scores, axis=1)

    total = np.zeros(n)
    for j, tree in enumerate(forest.trees):
        values = _leaf_scalars(tree)[tree_leaf_ids(tree, X)]
        total += values if agg.mode == "mean" else agg.weights[j] * values
    if agg.mode == "mean":
        return total / max(len(forest.trees), 1)
    return total + agg.bias


def predict(forest: Forest, x) -> int | float:
    """Predict one feature vector; class id for classification, real for regression."""
    result = predict_many(forest, np.asarray(x, dtype=np.float64)[None, :])[0]
    return int(result) if forest.task == "classification" else float(result)


def count_distinct_conditions(forest: Forest) -> int:
    """Number of distinct (feature id, threshold) pairs, thresholds compared bit-exactly."""
    seen: set[tuple[int, bytes]] = set()
    for tree in forest.trees:
        for _, node in tree.internal_items():
            seen.add((node.feature, struct.pack("<d", node.threshold)))
    return len(seen)
