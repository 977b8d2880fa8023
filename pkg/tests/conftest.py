"""Shared builders for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from forestshare import example1_fixture, fit_cart_forest, synthetic_dataset


def random_intervals(rng, max_p=12, lo_range=20, max_width=8, min_p=1):
    """Half-open integer-grid intervals, the standard randomized solver input."""
    p = int(rng.integers(min_p, max_p + 1))
    lows = rng.integers(0, lo_range, size=p)
    widths = rng.integers(1, max_width + 1, size=p)
    return [(float(lo), float(lo + w)) for lo, w in zip(lows, widths)]


def cart_fixture(n=80, d=3, trees=5, depth=3, task="classification", seed=0):
    data = synthetic_dataset(n, d, task=task, seed=seed)
    forest, samples = fit_cart_forest(
        data, n_trees=trees, max_depth=depth, bootstrap=True, seed=seed, task=task
    )
    return forest, data, samples


# moderate sizes keep the sigma and exception sweeps fast
BATTERY_PARAMS = [
    dict(n=60, d=3, trees=5, depth=3, task="classification", seed=1),
    dict(n=120, d=4, trees=8, depth=4, task="classification", seed=2),
    dict(n=40, d=2, trees=4, depth=5, task="classification", seed=3),
    dict(n=80, d=3, trees=6, depth=3, task="regression", seed=4),
    dict(n=150, d=5, trees=10, depth=4, task="regression", seed=5),
    dict(n=100, d=6, trees=6, depth=3, task="regression", seed=6),
]


@pytest.fixture(scope="session")
def fixture_battery():
    battery = [example1_fixture() + (None,)]
    battery.extend(cart_fixture(**params) for params in BATTERY_PARAMS)
    return battery
