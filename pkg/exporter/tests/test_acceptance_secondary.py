"""Secondary acceptance: iris-scale export + exact sharing, and the ERT vs RF ordering."""

import json
import time

import numpy as np
import pytest
from sklearn.datasets import load_iris
from sklearn.ensemble import ExtraTreesClassifier, RandomForestClassifier
from sklearn.model_selection import train_test_split

from forestshare import (
    Dataset,
    accuracy,
    count_distinct_conditions,
    load_model,
    predict_many,
    share_thresholds,
    verify_path_invariance,
)
from forestshare_exporter import export_model


@pytest.fixture(scope="module")
def iris_split():
    bundle = load_iris()
    return train_test_split(bundle.data, bundle.target, test_size=0.2, random_state=0)


def exported_forest(estimator, X_train):
    doc, _ = export_model(estimator, X_train)
    return load_model(json.dumps(doc))


def exact_size_ratio(forest, X_train):
    result = share_thresholds(forest, X_train)
    before = count_distinct_conditions(forest)
    after = count_distinct_conditions(result.forest)
    return result, after / before


def test_iris_random_forest_export_and_exact_sharing(iris_split):
    started = time.perf_counter()
    X_train, X_test, y_train, y_test = iris_split
    estimator = RandomForestClassifier(n_estimators=100, random_state=0).fit(X_train, y_train)
    forest = exported_forest(estimator, X_train)

    # prediction parity on every training row, through the serialized schema
    ours = predict_many(forest, X_train)
    theirs = estimator.predict(X_train)
    disagreements = int(np.sum(ours != theirs))
    assert disagreements == 0, f"parity broken on {disagreements} training rows"

    result, size_ratio = exact_size_ratio(forest, X_train)
    assert size_ratio <= 0.6

    assert verify_path_invariance(forest, result.forest, X_train) == []
    test_set = Dataset(X=X_test, labels=y_test.astype(float))
    acc_before = accuracy(forest, test_set)
    acc_after = accuracy(result.forest, test_set)
    ratio = acc_after / acc_before
    assert 0.98 <= ratio <= 1.02

    elapsed = time.perf_counter() - started
    assert elapsed < 120.0
    print(
        f"PASS iris RF: parity 120/120, SR {size_ratio:.3f} <= 0.6, "
        f"test AR {ratio:.4f}, {elapsed:.1f}s"
    )


def test_iris_extra_trees_shares_better_than_random_forest(iris_split):
    X_train, X_test, y_train, y_test = iris_split
    rf = RandomForestClassifier(n_estimators=100, random_state=0).fit(X_train, y_train)
    ert = ExtraTreesClassifier(n_estimators=100, bootstrap=True, random_state=0).fit(
        X_train, y_train
    )
    _, rf_ratio = exact_size_ratio(exported_forest(rf, X_train), X_train)
    _, ert_ratio = exact_size_ratio(exported_forest(ert, X_train), X_train)
    assert ert_ratio < rf_ratio
    print(f"PASS iris direction: ERT SR {ert_ratio:.4f} < RF SR {rf_ratio:.4f}")
