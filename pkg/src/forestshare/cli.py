"""Command-line interface: simplify, evaluate, inspect, fixture, sweep.

Exit codes: 0 success, 1 input parse error, 2 configuration conflict.
Output files are written atomically (temp file + rename).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
import time
from pathlib import Path

from .data import Dataset, DatasetFormatError, load_dataset, save_dataset
from .evaluation import REPORT_CSV_HEADER, build_report
from .fixtures import example1_fixture, synthetic_dataset
from .model import (
    Forest,
    ModelFormatError,
    count_distinct_conditions,
    load_model,
    save_model,
)
from .cart import fit_cart_forest
from .evaluation import accuracy as model_accuracy
from .figures import render_sweep_figures
from .sharing import SharingConfig, simplify

__all__ = ["entry", "main"]


class ConfigConflict(ValueError):
    """CLI flag combination that contradicts itself or the inputs."""


def _write_atomic(path: str | Path, payload: bytes) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(payload)
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp, 0o666 & ~umask)  # mkstemp files are 0600, outputs should follow umask
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _load_model_file(path: str) -> Forest:
    try:
        return load_model(Path(path).read_bytes())
    except OSError as exc:
        raise ModelFormatError(f"cannot read model {path}: {exc}") from exc


def _load_data_file(args, path: str | None = None) -> Dataset:
    path = path or args.data
    try:
        return load_dataset(path, label_col=args.label_col, header=not args.no_header)
    except OSError as exc:
        raise DatasetFormatError(f"cannot read dataset {path}: {exc}") from exc


def _sharing_config(args) -> SharingConfig:
    method = args.method
    if method != "sigma" and args.sigma is not None:
        raise ConfigConflict("--sigma requires --method sigma")
    if method != "exceptions" and args.exception_ratio is not None:
        raise ConfigConflict("--exception-ratio requires --method exceptions")
    if method != "kmeans" and args.k is not None:
        raise ConfigConflict("--k requires --method kmeans")
    if method == "kmeans" and args.k is None:
        raise ConfigConflict("--method kmeans requires --k")
    sigma = args.sigma if (method == "sigma" and args.sigma is not None) else 0.0
    ratio = (
        args.exception_ratio
        if (method == "exceptions" and args.exception_ratio is not None)
        else 0.0
    )
    try:
        return SharingConfig(
            method=method,
            sigma=sigma,
            exception_ratio=ratio,
            k=args.k if method == "kmeans" else None,
            sample_scope="per-tree" if args.per_tree_samples else "all",
        )
    except ValueError as exc:
        raise ConfigConflict(str(exc)) from exc


def _run_one(forest: Forest, train: Dataset, test: Dataset | None, config: SharingConfig):
    if config.sample_scope == "per-tree" and forest.bootstrap_indices is None:
        raise ConfigConflict("--per-tree-samples needs bootstrap_indices in the model file")
    started = time.perf_counter()
    result = simplify(forest, train.X, config)
    elapsed = time.perf_counter() - started
    report = build_report(forest, result.forest, train, test, config, wall_time_s=elapsed)
    return result, report


def cmd_simplify(args) -> int:
    forest = _load_model_file(args.model)
    train = _load_data_file(args)
    test = _load_data_file(args, args.test_data) if args.test_data else None
    config = _sharing_config(args)
    result, report = _run_one(forest, train, test, config)
    if args.out:
        _write_atomic(args.out, save_model(result.forest))
    if args.report:
        _write_atomic(args.report, report.to_json().encode("utf-8"))
    else:
        print(report.to_json())
    return 0


def cmd_evaluate(args) -> int:
    forest = _load_model_file(args.model)
    data = _load_data_file(args)
    summary = {"ndc": count_distinct_conditions(forest)}
    if data.labels is not None:
        summary["accuracy"] = model_accuracy(forest, data)
    print(json.dumps(summary, indent=2))
    return 0


def cmd_inspect(args) -> int:
    forest = _load_model_file(args.model)
    internal = sum(1 for tree in forest.trees for _ in tree.internal_items())
    per_feature: dict[int, set] = {}
    for tree in forest.trees:
        for _, node in tree.internal_items():
            per_feature.setdefault(node.feature, set()).add(node.threshold)
    summary = {
        "task": forest.task,
        "trees": len(forest.trees),
        "n_features": forest.n_features,
        "n_classes": forest.n_classes,
        "aggregation": forest.aggregation.mode,
        "internal_nodes": internal,
        "ndc": count_distinct_conditions(forest),
        "distinct_thresholds_per_feature": {
            str(f): len(v) for f, v in sorted(per_feature.items())
        },
        "has_bootstrap_indices": forest.bootstrap_indices is not None,
    }
    print(json.dumps(summary, indent=2))
    return 0


def cmd_fixture(args) -> int:
    out_dir = Path(args.out_dir)
    if args.preset == "example1":
        forest, data = example1_fixture()
    elif args.preset is not None:
        raise ConfigConflict(f"unknown preset {args.preset!r}")
    else:
        data = synthetic_dataset(args.n, args.d, task=args.task, seed=args.seed)
        forest, _ = fit_cart_forest(
            data,
            n_trees=args.trees,
            max_depth=args.depth,
            bootstrap=not args.no_bootstrap,
            seed=args.seed,
            task=args.task,
        )
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_atomic(out_dir / "model.json", save_model(forest))
    save_dataset(out_dir / "train.csv", data)
    print(json.dumps({"model": str(out_dir / "model.json"), "data": str(out_dir / "train.csv")}))
    return 0


_SWEEP_SIGMAS = [0.1, 0.2, 0.3, 0.4, 0.5]
_SWEEP_RATIOS = [0.1, 0.2, 0.3, 0.4, 0.5]
_SWEEP_KS = [2, 4, 8, 16, 32, 64, 128]


def _csv_bytes(rows: list[list]) -> bytes:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(REPORT_CSV_HEADER)
    writer.writerows(rows)
    return out.getvalue().encode("utf-8")


def cmd_sweep(args) -> int:
    forest = _load_model_file(args.model)
    train = _load_data_file(args)
    test = _load_data_file(args, args.test_data) if args.test_data else None
    scope = "per-tree" if args.per_tree_samples else "all"
    methods = args.methods.split(",") if args.methods else ["exact", "sigma", "exceptions", "kmeans"]

    configs: list[SharingConfig] = []
    for method in methods:
        if method == "exact":
            configs.append(SharingConfig(method="exact", sample_scope=scope))
        elif method == "sigma":
            values = args.sigmas or _SWEEP_SIGMAS
            configs.extend(SharingConfig(method="sigma", sigma=s, sample_scope=scope) for s in values)
        elif method == "exceptions":
            values = args.ratios or _SWEEP_RATIOS
            configs.extend(
                SharingConfig(method="exceptions", exception_ratio=r, sample_scope=scope)
                for r in values
            )
        elif method == "kmeans":
            values = args.ks or _SWEEP_KS
            configs.extend(SharingConfig(method="kmeans", k=k, sample_scope=scope) for k in values)
        else:
            raise ConfigConflict(f"unknown method {method!r} in --methods")

    reports = []
    for config in configs:
        _, report = _run_one(forest, train, test, config)
        reports.append(report)

    out_dir = Path(args.out_dir)
    _write_atomic(out_dir / "sweep.csv", _csv_bytes([r.to_csv_row() for r in reports]))
    figure_paths = render_sweep_figures(reports, out_dir)
    print(json.dumps({
        "csv": str(out_dir / "sweep.csv"),
        "figures": [str(p) for p in figure_paths],
        "runs": len(reports),
    }))
    return 0


def _add_dataset_flags(parser) -> None:
    parser.add_argument("--label-col", default=None, help="label column name or index")
    parser.add_argument("--no-header", action="store_true", help="CSV has no header row")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="forestshare")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simplify", help="share thresholds and write the simplified model")
    p.add_argument("-m", "--model", required=True)
    p.add_argument("-d", "--data", required=True)
    p.add_argument("-o", "--out", default=None, help="path for the simplified model JSON")
    p.add_argument("--method", choices=["exact", "sigma", "exceptions", "kmeans"], default="exact")
    p.add_argument("--sigma", type=float, default=None)
    p.add_argument("--exception-ratio", type=float, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--per-tree-samples", action="store_true")
    p.add_argument("--test-data", default=None, help="held-out CSV for the accuracy ratio")
    p.add_argument("--report", default=None, help="write the report JSON here instead of stdout")
    p.add_argument("--seed", type=int, default=0, help="accepted for interface stability")
    _add_dataset_flags(p)
    p.set_defaults(func=cmd_simplify)

    p = sub.add_parser("evaluate", help="print NDC and accuracy of a model on a dataset")
    p.add_argument("-m", "--model", required=True)
    p.add_argument("-d", "--data", required=True)
    _add_dataset_flags(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("inspect", help="print a structural summary of a model")
    p.add_argument("-m", "--model", required=True)
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("fixture", help="write a synthetic dataset and fitted model")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--preset", default=None, help="named fixture, e.g. example1")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--trees", type=int, default=5)
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--task", choices=["classification", "regression"], default="classification")
    p.add_argument("--no-bootstrap", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_fixture)

    p = sub.add_parser("sweep", help="run the parameter sweeps; write CSV plus figures")
    p.add_argument("-m", "--model", required=True)
    p.add_argument("-d", "--data", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--test-data", default=None)
    p.add_argument("--methods", default=None, help="comma list from exact,sigma,exceptions,kmeans")
    p.add_argument("--sigmas", type=float, nargs="*", default=None)
    p.add_argument("--ratios", type=float, nargs="*", default=None)
    p.add_argument("--ks", type=int, nargs="*", default=None)
    p.add_argument("--per-tree-samples", action="store_true")
    p.add_argument("--seed", type=int, default=0, help="accepted for interface stability")
    _add_dataset_flags(p)
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigConflict as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ModelFormatError, DatasetFormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())
