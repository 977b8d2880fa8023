"""Exporter command line: fit-or-load an estimator, write model JSON plus a manifest.

``--estimator`` accepts either a pickle path (.pkl/.pickle/.joblib) or an
inline constructor such as ``RandomForestClassifier(n_estimators=100,
random_state=0)``, which is fitted on the training CSV before export.
"""

from __future__ import annotations

import argparse
import ast
import csv
import io
import json
import pickle
import sys
from pathlib import Path

import numpy as np

from .export import UnsupportedEstimatorError, export_model

__all__ = ["entry", "main"]

_INLINE_WHITELIST = (
    "RandomForestClassifier",
    "RandomForestRegressor",
    "ExtraTreesClassifier",
    "ExtraTreesRegressor",
    "AdaBoostClassifier",
    "AdaBoostRegressor",
    "GradientBoostingClassifier",
    "GradientBoostingRegressor",
)


class InputError(ValueError):
    """Unreadable or unparsable CLI inputs."""


def _read_csv(path: str, label_col: str | None, header: bool):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    rows = [row for row in csv.reader(io.StringIO(text)) if row]
    if not rows:
        raise InputError(f"{path}: empty file")
    columns = None
    if header:
        columns = [name.strip() for name in rows[0]]
        rows = rows[1:]
    label_idx = None
    if label_col is not None:
        if label_col.lstrip("-").isdigit():
            label_idx = int(label_col)
        elif columns and label_col in columns:
            label_idx = columns.index(label_col)
        else:
            raise InputError(f"label column {label_col!r} not found")
    try:
        matrix = [[float(cell) for cell in row] for row in rows]
    except ValueError as exc:
        raise InputError(f"{path}: non-numeric cell ({exc})") from exc
    data = np.asarray(matrix, dtype=np.float64)
    if label_idx is None:
        return data, None
    labels = data[:, label_idx]
    features = np.delete(data, label_idx, axis=1)
    return features, labels


def _build_inline_estimator(spec: str):
    try:
        expr = ast.parse(spec, mode="eval").body
    except SyntaxError as exc:
        raise InputError(f"cannot parse estimator spec: {exc}") from exc
    if not (isinstance(expr, ast.Call) and isinstance(expr.func, ast.Name)):
        raise InputError("estimator spec must look like ClassName(arg=value, ...)")
    name = expr.func.id
    if name not in _INLINE_WHITELIST:
        raise InputError(f"estimator {name!r} is not in the supported set {_INLINE_WHITELIST}")
    if expr.args:
        raise InputError("estimator spec accepts keyword arguments only")
    kwargs = {}
    for kw in expr.keywords:
        try:
            kwargs[kw.arg] = ast.literal_eval(kw.value)
        except ValueError as exc:
            raise InputError(f"argument {kw.arg!r} must be a literal") from exc
    import sklearn.ensemble

    return getattr(sklearn.ensemble, name)(**kwargs)


def _load_estimator(spec: str, features, labels):
    path = Path(spec)
    if path.suffix in (".pkl", ".pickle", ".joblib"):
        try:
            with open(path, "rb") as handle:
                return pickle.load(handle)
        except OSError as exc:
            raise InputError(f"cannot read estimator pickle: {exc}") from exc
    estimator = _build_inline_estimator(spec)
    if labels is None:
        raise InputError("an inline estimator spec needs --label-col to fit on the CSV")
    if getattr(estimator, "_estimator_type", "") == "classifier":
        labels = labels.astype(np.int64)
    estimator.fit(features, labels)
    return estimator


def _manifest_path(out: Path) -> Path:
    if out.suffix == ".json":
        return out.with_suffix(".manifest.json")
    return out.with_name(out.name + ".manifest.json")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="forest-export")
    parser.add_argument("--estimator", required=True,
                        help="pickle path or inline constructor to fit on --train")
    parser.add_argument("--train", required=True, help="training CSV")
    parser.add_argument("--out", required=True, help="model JSON output path")
    parser.add_argument("--label-col", default=None, help="label column name or index")
    parser.add_argument("--no-header", action="store_true")
    args = parser.parse_args(argv)

    try:
        features, labels = _read_csv(args.train, args.label_col, header=not args.no_header)
        estimator = _load_estimator(args.estimator, features, labels)
        doc, manifest = export_model(estimator, features)
    except (InputError, UnsupportedEstimatorError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(doc), encoding="utf-8")
    manifest_out = _manifest_path(out)
    manifest_out.write_text(json.dumps(manifest, indent=2), encoding="utf-8")
    print(json.dumps({"model": str(out), "manifest": str(manifest_out)}))
    return 0


def entry() -> None:
    sys.exit(main())
