"""Metrics, invariance verification, deterministic k-fold splits, and reports.

Reports serialize to JSON (one object) and to CSV rows for aggregation across
folds; rendering them as figures lives in the figures module, not here.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from .data import Dataset
from .model import Forest, count_distinct_conditions, predict_many, tree_leaf_ids
from .paths import _tree_samples
from .sharing import SharingConfig

__all__ = [
    "REPORT_CSV_HEADER",
    "SimplificationReport",
    "accuracy",
    "build_report",
    "kfold_split",
    "mean_report",
    "r_squared",
    "verify_path_invariance",
]


def r_squared(y, y_hat) -> float:
    """Coefficient of determination 1 - sum((y - y_hat)^2) / sum((y - mean(y))^2)."""
    y = np.asarray(y, dtype=np.float64)
    y_hat = np.asarray(y_hat, dtype=np.float64)
    if y.shape != y_hat.shape or y.ndim != 1:
        raise ValueError("y and y_hat must be 1-D arrays of equal length")
    if len(y) < 2:
        raise ValueError("need at least two observations")
    denom = float(np.sum((y - y.mean()) ** 2))
    if denom == 0.0:
        raise ValueError("y has zero variance")
    return 1.0 - float(np.sum((y - y_hat) ** 2)) / denom


def accuracy(forest: Forest, data: Dataset) -> float:
    """Classification: fraction of matching labels.  Regression: R^2."""
    if data.labels is None:
        raise ValueError("accuracy needs labels")
    predictions = predict_many(forest, data.X)
    if forest.task == "classification":
        return float(np.mean(predictions == data.labels.astype(np.int64)))
    return r_squared(data.labels, predictions)


def _topology_signature(forest: Forest):
    return [
        (tree.root, [
            (node.is_leaf, node.value if node.is_leaf else (node.feature, node.left, node.right))
            for node in tree.nodes
        ])
        for tree in forest.trees
    ]


def verify_path_invariance(
    original: Forest, simplified: Forest, X, samples=None
) -> list[tuple[int, int]]:
    """All (row, tree) pairs whose leaf changed; empty iff every path is preserved.

    The forests must agree on everything except thresholds.  Within a tree a
    leaf identifies its root path uniquely, so comparing reached leaves is
    equivalent to comparing full paths.
    """
    if _topology_signature(original) != _topology_signature(simplified):
        raise ValueError("forests are not structurally isomorphic")
    X = np.asarray(X, dtype=np.float64)
    per_tree = _tree_samples(original, len(X), samples)
    violations: list[tuple[int, int]] = []
    for j, (before, after) in enumerate(zip(original.trees, simplified.trees)):
        rows = per_tree[j]
        if rows.size == 0:
            continue
        changed = tree_leaf_ids(before, X, rows) != tree_leaf_ids(after, X, rows)
        violations.extend((int(r), j) for r in rows[changed])
    return sorted(set(violations))


def kfold_split(n: int, folds: int, seed: int = 0) -> np.ndarray:
    """Deterministic shuffled fold assignment; fold sizes differ by at most one."""
    if folds < 2:
        raise ValueError("need at least two folds")
    if folds > n:
        raise ValueError(f"cannot split {n} rows into {folds} folds")
    order = np.random.default_rng(seed).permutation(n)
    assignment = np.empty(n, dtype=np.int64)
    base, extra = divmod(n, folds)
    start = 0
    for fold in range(folds):
        size = base + (1 if fold < extra else 0)
        assignment[order[start:start + size]] = fold
        start += size
    return assignment


@dataclass
class SimplificationReport:
    """Before/after sizes and accuracies of one simplification run."""

    ndc_before: int
    ndc_after: int
    size_ratio: float | None
    acc_before: float | None
    acc_after: float | None
    accuracy_ratio: float | None
    train_accuracy_ratio: float | None
    invariance_violations: int
    method: str
    sigma: float
    exception_ratio: float
    k: int | None
    per_tree_samples: bool
    wall_time_s: float

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, allow_nan=False)

    def to_csv_row(self) -> list:
        return [asdict(self)[key] for key in REPORT_CSV_HEADER]


REPORT_CSV_HEADER = [
    "method",
    "sigma",
    "exception_ratio",
    "k",
    "per_tree_samples",
    "ndc_before",
    "ndc_after",
    "size_ratio",
    "acc_before",
    "acc_after",
    "accuracy_ratio",
    "train_accuracy_ratio",
    "invariance_violations",
    "wall_time_s",
]


def _ratio(after: float | None, before: float | None) -> float | None:
    if after is None or before is None or before == 0:
        return None
    return after / before


def build_report(
    before: Forest,
    after: Forest,
    train: Dataset,
    test: Dataset | None,
    config: SharingConfig,
    samples=None,
    wall_time_s: float = 0.0,
) -> SimplificationReport:
    """Assemble the standard report; test accuracies drive the headline ratio.

    Invariance is checked on the training rows (honoring the sample scope);
    the training-accuracy ratio is reported alongside because exact mode
    pins it to 1.
    """
    ndc_before = count_distinct_conditions(before)
    ndc_after = count_distinct_conditions(after)
    if config.sample_scope == "per-tree" and samples is None:
        samples = before.bootstrap_indices
    violations = verify_path_invariance(before, after, train.X, samples=samples)

    acc_before = acc_after = train_ratio = None
    if train.labels is not None:
        train_before = accuracy(before, train)
        train_after = accuracy(after, train)
        train_ratio = _ratio(train_after, train_before)
        acc_before, acc_after = train_before, train_after
    if test is not None and test.labels is not None:
        acc_before = accuracy(before, test)
        acc_after = accuracy(after, test)

    return SimplificationReport(
        ndc_before=ndc_before,
        ndc_after=ndc_after,
        size_ratio=(ndc_after / ndc_before) if ndc_before > 0 else None,
        acc_before=acc_before,
        acc_after=acc_after,
        accuracy_ratio=_ratio(acc_after, acc_before),
        train_accuracy_ratio=train_ratio,
        invariance_violations=len(violations),
        method=config.method,
        sigma=config.sigma,
        exception_ratio=config.exception_ratio,
        k=config.k,
        per_tree_samples=config.sample_scope == "per-tree",
        wall_time_s=wall_time_s,
    )


def mean_report(reports) -> dict[str, float]:
    """Arithmetic mean of the numeric report fields across folds (None-valued fields skipped)."""
    out: dict[str, float] = {}
    for key in REPORT_CSV_HEADER:
        values = [asdict(r)[key] for r in reports]
        numeric = [v for v in values if isinstance(v, (int, float)) and not isinstance(v, bool)]
        if numeric and len(numeric) == len(values):
            out[key] = float(np.mean(numeric))
    return out
