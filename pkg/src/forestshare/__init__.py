"""Shrink decision forests by sharing branching thresholds without changing decision paths."""

from .cart import fit_cart_forest
from .data import Dataset, DatasetFormatError, load_dataset, save_dataset
from .evaluation import (
    SimplificationReport,
    accuracy,
    build_report,
    kfold_split,
    mean_report,
    r_squared,
    verify_path_invariance,
)
from .fixtures import example1_fixture, synthetic_dataset
from .model import (
    Aggregation,
    BranchingCondition,
    Forest,
    InternalNode,
    LeafNode,
    ModelFormatError,
    Tree,
    count_distinct_conditions,
    leaf_path,
    load_model,
    predict,
    predict_many,
    save_model,
    validate_forest,
)
from .paths import ThresholdInterval, collect_intervals, path_preserving_window, route
from .sharing import (
    ShareResult,
    SharingConfig,
    kmeans_1d,
    kmeans_share,
    share_thresholds,
    share_thresholds_with_exceptions,
    simplify,
)
from .stabbing import (
    StabbingSolution,
    min_stabbing_set,
    min_stabbing_set_brute,
    min_stabbing_set_with_exceptions,
    min_stabbing_set_with_exceptions_brute,
)

__version__ = "0.1.0"
