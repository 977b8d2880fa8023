"""Fixture trainer: midpoint thresholds, purity handling, determinism, bootstrap plumbing."""

import numpy as np
import pytest

from forestshare import Dataset, count_distinct_conditions, fit_cart_forest, predict_many, save_model


def midpoints(values):
    vals = sorted(set(values))
    return {(a + b) / 2.0 for a, b in zip(vals, vals[1:])}


class TestThresholdConvention:
    def test_thresholds_are_adjacent_value_midpoints(self):
        # the three-point set admits trees over midpoints {4, 7.5} x {1.5, 5}
        data = Dataset(
            X=np.array([[1.0, 1.0], [7.0, 2.0], [8.0, 8.0]]),
            labels=np.array([1.0, 0.0, 1.0]),
        )
        forest, _ = fit_cart_forest(data, n_trees=1, max_depth=2, bootstrap=False)
        allowed = {0: midpoints([1, 7, 8]), 1: midpoints([1, 2, 8])}
        assert allowed[0] == {4.0, 7.5} and allowed[1] == {1.5, 5.0}
        conditions = [
            (node.feature, node.threshold)
            for tree in forest.trees
            for _, node in tree.internal_items()
        ]
        assert conditions, "expected at least one split"
        for feature, threshold in conditions:
            assert threshold in allowed[feature]
        # the fitted tree separates the training points
        assert list(predict_many(forest, data.X)) == [1, 0, 1]

    def test_midpoints_on_random_data(self):
        rng = np.random.default_rng(0)
        X = rng.normal(size=(50, 3))
        labels = (X[:, 0] > 0).astype(float)
        data = Dataset(X=X, labels=labels)
        forest, _ = fit_cart_forest(data, n_trees=3, max_depth=3, bootstrap=True, seed=1)
        for j, tree in enumerate(forest.trees):
            rows = np.asarray(forest.bootstrap_indices[j])
            for _, node in tree.internal_items():
                assert node.threshold in midpoints(X[rows, node.feature])


class TestDegenerateAndDeterminism:
    def test_constant_labels_give_leaf_forest(self):
        data = Dataset(X=np.arange(10.0).reshape(5, 2), labels=np.ones(5))
        forest, _ = fit_cart_forest(data, n_trees=4, max_depth=3)
        assert count_distinct_conditions(forest) == 0

    def test_same_seed_bit_identical(self):
        rng = np.random.default_rng(5)
        data = Dataset(X=rng.uniform(size=(60, 4)), labels=rng.integers(0, 3, size=60).astype(float))
        a, samples_a = fit_cart_forest(data, n_trees=6, max_depth=4, seed=9)
        b, samples_b = fit_cart_forest(data, n_trees=6, max_depth=4, seed=9)
        assert save_model(a) == save_model(b)
        assert all(np.array_equal(x, y) for x, y in zip(samples_a, samples_b))

    def test_different_seed_differs(self):
        rng = np.random.default_rng(5)
        data = Dataset(X=rng.uniform(size=(60, 4)), labels=rng.integers(0, 3, size=60).astype(float))
        a, _ = fit_cart_forest(data, n_trees=6, max_depth=4, seed=1)
        b, _ = fit_cart_forest(data, n_trees=6, max_depth=4, seed=2)
        assert save_model(a) != save_model(b)

    def test_requires_labels_and_rows(self):
        with pytest.raises(ValueError):
            fit_cart_forest(Dataset(X=np.zeros((4, 2))), n_trees=1)
        with pytest.raises(ValueError):
            fit_cart_forest(Dataset(X=np.zeros((1, 2)), labels=np.zeros(1)), n_trees=1)

    def test_classification_rejects_fractional_labels(self):
        data = Dataset(X=np.zeros((4, 1)), labels=np.array([0.5, 1.0, 0.0, 1.0]))
        with pytest.raises(ValueError):
            fit_cart_forest(data, n_trees=1, task="classification")


class TestBootstrap:
    def test_bootstrap_rows_are_returned_and_embedded(self):
        rng = np.random.default_rng(2)
        data = Dataset(X=rng.uniform(size=(30, 2)), labels=(rng.uniform(size=30) > 0.5).astype(float))
        forest, samples = fit_cart_forest(data, n_trees=3, max_depth=2, bootstrap=True, seed=0)
        assert len(samples) == 3
        for rows in samples:
            assert rows.shape == (30,)
            assert rows.min() >= 0 and rows.max() < 30
        assert forest.bootstrap_indices == tuple(tuple(int(r) for r in rows) for rows in samples)

    def test_no_bootstrap_uses_all_rows(self):
        rng = np.random.default_rng(2)
        data = Dataset(X=rng.uniform(size=(12, 2)), labels=(rng.uniform(size=12) > 0.5).astype(float))
        forest, samples = fit_cart_forest(data, n_trees=2, max_depth=2, bootstrap=False)
        assert forest.bootstrap_indices is None
        for rows in samples:
            assert np.array_equal(rows, np.arange(12))


class TestRegressionSplits:
    def test_variance_reduction_recovers_step(self):
        X = np.linspace(0, 1, 40).reshape(-1, 1)
        y = (X[:, 0] > 0.5).astype(float) * 10.0
        forest, _ = fit_cart_forest(
            Dataset(X=X, labels=y), n_trees=1, max_depth=1, bootstrap=False, task="regression"
        )
        (node_id, node), = list(forest.trees[0].internal_items())
        assert abs(node.threshold - 0.5) < 0.02
        predictions = predict_many(forest, X)
        assert np.allclose(predictions, y)
