"""Convert fitted scikit-learn tree ensembles into the portable model JSON schema.

Supported estimators and their aggregation mapping:

* RandomForest / ExtraTrees classifiers  -> majority vote over per-tree argmax
* RandomForest / ExtraTrees regressors   -> mean of per-tree values
* AdaBoostClassifier (SAMME)             -> weighted sum of one-hot tree votes
* GradientBoostingClassifier (binary)    -> weighted sum of (0, stage score) leaf
                                            vectors, initial score folded into
                                            the first stage's leaves
* GradientBoostingRegressor              -> weighted sum with the initial
                                            prediction as the bias

Thresholds are copied bit-exactly.  AdaBoostRegressor aggregates by weighted
median, which the schema cannot express, so it is rejected.
"""

from __future__ import annotations

import numpy as np

__all__ = ["UnsupportedEstimatorError", "export_model"]


class UnsupportedEstimatorError(ValueError):
    """Estimator type or configuration that the schema cannot represent."""


def _check_fitted(estimator) -> None:
    if not hasattr(estimator, "estimators_"):
        raise UnsupportedEstimatorError(
            f"{type(estimator).__name__} is not a fitted tree ensemble"
        )


def _check_train_matrix(X) -> np.ndarray:
    try:
        X = np.asarray(X, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise UnsupportedEstimatorError(f"non-numeric features: {exc}") from exc
    if X.ndim != 2:
        raise UnsupportedEstimatorError("training matrix must be 2-D")
    if np.isnan(X).any():
        raise UnsupportedEstimatorError("training matrix contains NaN values")
    return X


def _tree_nodes(sk_tree, leaf_value) -> list[dict]:
    """Flatten one sklearn tree into schema node dicts; ``leaf_value(i)`` builds leaves."""
    nodes = []
    for i in range(sk_tree.node_count):
        left = int(sk_tree.children_left[i])
        right = int(sk_tree.children_right[i])
        if left == -1:
            nodes.append({"kind": "leaf", "value": leaf_value(i)})
        else:
            nodes.append({
                "kind": "internal",
                "feature": int(sk_tree.feature[i]),
                "threshold": float(sk_tree.threshold[i]),
                "left": left,
                "right": right,
            })
    return nodes


def _class_vector_leaf(sk_tree):
    def leaf_value(i):
        return [float(v) for v in np.asarray(sk_tree.value[i][0]).ravel()]

    return leaf_value


def _one_hot_leaf(sk_tree, n_classes):
    def leaf_value(i):
        winner = int(np.argmax(sk_tree.value[i][0]))
        return [1.0 if c == winner else 0.0 for c in range(n_classes)]

    return leaf_value


def _scalar_leaf(sk_tree):
    def leaf_value(i):
        return float(sk_tree.value[i][0][0])

    return leaf_value


def _score_pair_leaf(sk_tree, offset=0.0):
    def leaf_value(i):
        return [0.0, float(sk_tree.value[i][0][0]) + offset]

    return leaf_value


def _bootstrap_indices(estimator, n_samples) -> list[list[int]] | None:
    if not getattr(estimator, "bootstrap", False):
        return None
    try:
        from sklearn.ensemble._forest import (
            _generate_sample_indices,
            _get_n_samples_bootstrap,
        )

        n_bootstrap = _get_n_samples_bootstrap(n_samples, estimator.max_samples)
        return [
            [int(r) for r in _generate_sample_indices(tree.random_state, n_samples, n_bootstrap)]
            for tree in estimator.estimators_
        ]
    except Exception:  # private API moved; the indices are an optional extra
        return None


def _integer_classes(estimator) -> list[int]:
    classes = np.asarray(estimator.classes_)
    if not np.issubdtype(classes.dtype, np.number) or not np.allclose(classes, classes.astype(int)):
        raise UnsupportedEstimatorError(
            "only integer class labels are supported; re-encode labels as 0..K-1"
        )
    return [int(c) for c in classes]


def _raw_init(estimator, X) -> float:
    raw = estimator._raw_predict_init(X[:1])
    return float(np.asarray(raw).ravel()[0])


def export_model(estimator, X_train) -> tuple[dict, dict]:
    """Return (model document, manifest) for a fitted estimator.

    The model document follows the core JSON schema; the manifest echoes the
    estimator class, key hyperparameters, and the aggregation mapping chosen.
    """
    from sklearn.ensemble import (
        AdaBoostClassifier,
        AdaBoostRegressor,
        ExtraTreesClassifier,
        ExtraTreesRegressor,
        GradientBoostingClassifier,
        GradientBoostingRegressor,
        RandomForestClassifier,
        RandomForestRegressor,
    )

    _check_fitted(estimator)
    X_train = _check_train_matrix(X_train)
    n_samples, n_features = X_train.shape
    if n_features != getattr(estimator, "n_features_in_", n_features):
        raise UnsupportedEstimatorError(
            f"training matrix has {n_features} features, estimator expects "
            f"{estimator.n_features_in_}"
        )

    name = type(estimator).__name__
    notes: list[str] = []
    bootstrap = None

    if isinstance(estimator, (RandomForestClassifier, ExtraTreesClassifier)):
        classes = _integer_classes(estimator)
        trees = [
            {"root": 0, "nodes": _tree_nodes(t.tree_, _class_vector_leaf(t.tree_))}
            for t in estimator.estimators_
        ]
        doc = {
            "task": "classification",
            "n_features": int(estimator.n_features_in_),
            "n_classes": len(classes),
            "aggregation": {"mode": "majority"},
            "trees": trees,
        }
        bootstrap = _bootstrap_indices(estimator, n_samples)
        notes.append("majority vote over per-tree argmax; scikit-learn averages probabilities")
    elif isinstance(estimator, (RandomForestRegressor, ExtraTreesRegressor)):
        trees = [
            {"root": 0, "nodes": _tree_nodes(t.tree_, _scalar_leaf(t.tree_))}
            for t in estimator.estimators_
        ]
        doc = {
            "task": "regression",
            "n_features": int(estimator.n_features_in_),
            "aggregation": {"mode": "mean"},
            "trees": trees,
        }
        bootstrap = _bootstrap_indices(estimator, n_samples)
    elif isinstance(estimator, AdaBoostClassifier):
        classes = _integer_classes(estimator)
        trees = [
            {"root": 0, "nodes": _tree_nodes(t.tree_, _one_hot_leaf(t.tree_, len(classes)))}
            for t in estimator.estimators_
        ]
        weights = [float(w) for w in estimator.estimator_weights_[: len(trees)]]
        doc = {
            "task": "classification",
            "n_features": int(estimator.n_features_in_),
            "n_classes": len(classes),
            "aggregation": {"mode": "weighted_sum", "weights": weights, "bias": 0.0},
            "trees": trees,
        }
        notes.append("SAMME voting: weighted sum of one-hot per-tree predictions")
    elif isinstance(estimator, AdaBoostRegressor):
        raise UnsupportedEstimatorError(
            "AdaBoostRegressor predicts by weighted median, which the weighted-sum "
            "aggregation cannot express"
        )
    elif isinstance(estimator, GradientBoostingClassifier):
        classes = _integer_classes(estimator)
        if len(classes) != 2:
            raise UnsupportedEstimatorError(
                "multiclass GradientBoostingClassifier is not supported (one tree "
                "per class per stage); binary only"
            )
        learning_rate = float(estimator.learning_rate)
        raw_init = _raw_init(estimator, X_train)
        stage_trees = [stage[0].tree_ for stage in estimator.estimators_]
        trees = []
        for s, sk_tree in enumerate(stage_trees):
            # the initial raw score cannot ride on the aggregation bias for
            # classification, so fold it into the first stage's leaves
            offset = raw_init / learning_rate if s == 0 else 0.0
            trees.append({"root": 0, "nodes": _tree_nodes(sk_tree, _score_pair_leaf(sk_tree, offset))})
        doc = {
            "task": "classification",
            "n_features": int(estimator.n_features_in_),
            "n_classes": 2,
            "aggregation": {
                "mode": "weighted_sum",
                "weights": [learning_rate] * len(trees),
                "bias": 0.0,
            },
            "trees": trees,
        }
        notes.append(f"initial raw score {raw_init!r} folded into the first stage's leaves")
    elif isinstance(estimator, GradientBoostingRegressor):
        learning_rate = float(estimator.learning_rate)
        raw_init = _raw_init(estimator, X_train)
        stage_trees = [stage[0].tree_ for stage in estimator.estimators_]
        trees = [
            {"root": 0, "nodes": _tree_nodes(sk_tree, _scalar_leaf(sk_tree))}
            for sk_tree in stage_trees
        ]
        doc = {
            "task": "regression",
            "n_features": int(estimator.n_features_in_),
            "aggregation": {
                "mode": "weighted_sum",
                "weights": [learning_rate] * len(trees),
                "bias": raw_init,
            },
            "trees": trees,
        }
    else:
        raise UnsupportedEstimatorError(f"unsupported estimator type {name}")

    if bootstrap is not None:
        doc["bootstrap_indices"] = bootstrap

    manifest = {
        "estimator": name,
        "hyperparameters": {
            "n_estimators": int(getattr(estimator, "n_estimators", len(estimator.estimators_))),
            "random_state": getattr(estimator, "random_state", None),
            "learning_rate": float(getattr(estimator, "learning_rate", 0.0)) or None,
        },
        "aggregation": doc["aggregation"]["mode"],
        "task": doc["task"],
        "classes": _integer_classes(estimator) if doc["task"] == "classification" else None,
        "bootstrap_indices_present": bootstrap is not None,
        "notes": notes,
    }
    return doc, manifest
