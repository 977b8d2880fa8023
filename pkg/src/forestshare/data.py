"""Dataset container plus CSV reading and writing."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = ["Dataset", "DatasetFormatError", "load_dataset", "save_dataset"]


class DatasetFormatError(ValueError):
    """Raised when a dataset file cannot be parsed into a clean numeric matrix."""


@dataclass(frozen=True)
class Dataset:
    """An (n, d) float matrix with optional labels (class ids or reals)."""

    X: np.ndarray
    labels: np.ndarray | None = None
    columns: tuple[str, ...] | None = None

    def __post_init__(self):
        X = np.asarray(self.X, dtype=np.float64)
        if X.ndim != 2:
            raise DatasetFormatError(f"feature matrix must be 2-D, got shape {X.shape}")
        if np.isnan(X).any():
            raise DatasetFormatError("feature matrix contains NaN values")
        object.__setattr__(self, "X", X)
        if self.labels is not None:
            labels = np.asarray(self.labels, dtype=np.float64)
            if labels.shape != (len(X),):
                raise DatasetFormatError(
                    f"labels length {labels.shape} does not match {len(X)} rows"
                )
            object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return len(self.X)

    @property
    def d(self) -> int:
        return self.X.shape[1]


def _parse_cell(cell: str, where: str) -> float:
    try:
        return float(cell)
    except ValueError as exc:
        raise DatasetFormatError(f"{where}: cannot parse {cell!r} as a number") from exc


def load_dataset(
    path: str | Path,
    label_col: int | str | None = None,
    header: bool = True,
) -> Dataset:
    """Read a CSV file; ``label_col`` selects the label column by name or index."""
    text = Path(path).read_text(encoding="utf-8")
    rows = [row for row in csv.reader(io.StringIO(text)) if row]
    if not rows:
        raise DatasetFormatError(f"{path}: empty file")

    columns: tuple[str, ...] | None = None
    if header:
        columns = tuple(name.strip() for name in rows[0])
        rows = rows[1:]
        if not rows:
            raise DatasetFormatError(f"{path}: header but no data rows")

    width = len(rows[0])
    label_idx: int | None = None
    if label_col is not None:
        if isinstance(label_col, str) and not label_col.lstrip("-").isdigit():
            if columns is None:
                raise DatasetFormatError("label column by name requires a header row")
            if label_col not in columns:
                raise DatasetFormatError(f"label column {label_col!r} not found in header")
            label_idx = columns.index(label_col)
        else:
            label_idx = int(label_col)
            if label_idx < 0:
                label_idx += width
            if not 0 <= label_idx < width:
                raise DatasetFormatError(f"label column index {label_col} out of range")

    data = []
    labels = [] if label_idx is not None else None
    for r, row in enumerate(rows):
        if len(row) != width:
            raise DatasetFormatError(f"{path} row {r}: expected {width} cells, got {len(row)}")
        values = [_parse_cell(cell, f"{path} row {r} col {c}") for c, cell in enumerate(row)]
        if label_idx is not None:
            labels.append(values.pop(label_idx))
        data.append(values)

    feature_columns = None
    if columns is not None:
        feature_columns = tuple(
            name for c, name in enumerate(columns) if c != label_idx
        )
    return Dataset(
        X=np.array(data, dtype=np.float64),
        labels=np.array(labels, dtype=np.float64) if labels is not None else None,
        columns=feature_columns,
    )


def save_dataset(path: str | Path, dataset: Dataset, label_name: str = "label") -> None:
    """Write a CSV with a header row; floats keep full round-trip precision."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    names = dataset.columns or tuple(f"x{c}" for c in range(dataset.d))
    header = list(names) + ([label_name] if dataset.labels is not None else [])
    writer.writerow(header)
    for r in range(dataset.n):
        row = [repr(v) for v in dataset.X[r].tolist()]
        if dataset.labels is not None:
            label = dataset.labels[r]
            row.append(repr(int(label)) if float(label).is_integer() else repr(float(label)))
        writer.writerow(row)
    Path(path).write_text(out.getvalue(), encoding="utf-8")
