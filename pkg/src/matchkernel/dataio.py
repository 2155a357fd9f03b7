"""Tabular datasets, min-max scaling and Gram matrix files."""
from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

GRAM_FORMAT = "%.17g"


class DataError(ValueError):
    """Malformed or unusable input data."""


@dataclass(frozen=True, eq=False)
class Dataset:
    X: np.ndarray
    y: np.ndarray
    name: str = ""
    # label_map[k] is the original label string of class k
    label_map: tuple = ()
    feature_names: tuple = ()
    scaling: dict | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.X.ndim != 2 or self.y.shape != (self.X.shape[0],):
            raise DataError(f"X has shape {self.X.shape} but y has shape {self.y.shape}")

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (self.name == other.name and self.label_map == other.label_map
                and self.feature_names == other.feature_names
                and np.array_equal(self.X, other.X) and np.array_equal(self.y, other.y))

    __hash__ = None

    @property
    def n_samples(self) -> int:
        return self.X.shape[0]

    @property
    def feature_count(self) -> int:
        return self.X.shape[1]

    @property
    def class_count(self) -> int:
        return int(np.unique(self.y).size)

    def subset(self, rows) -> "Dataset":
        rows = np.asarray(rows)
        return replace(self, X=self.X[rows], y=self.y[rows])

    def digest(self) -> str:
        """SHA-256 over the feature and label arrays."""
        h = hashlib.sha256()
        h.update(np.ascontiguousarray(self.X, dtype="<f8").tobytes())
        h.update(np.ascontiguousarray(self.y, dtype="<i8").tobytes())
        return h.hexdigest()


def _looks_numeric(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def _label_key(label: str):
    # numeric labels sort numerically, anything else lexicographically after them
    try:
        return (0, float(label), label)
    except ValueError:
        return (1, 0.0, label)


def load_csv(path, label_column: int | str = -1, has_header: bool | None = None,
             name: str | None = None) -> Dataset:
    """Read a comma-separated table of numeric features plus one label column.

    ``label_column`` is a header name or a (possibly negative) 0-based index.
    ``has_header=None`` treats the first row as a header when any of its cells
    is non-numeric. Labels are re-indexed to ``0..k-1`` in sorted order and the
    original values are kept in ``label_map``.
    """
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    except (UnicodeDecodeError, csv.Error) as exc:
        raise DataError(f"{path}: CSV parse failure: {exc}") from exc
    if not rows:
        raise DataError(f"{path}: empty file")
    if has_header is None:
        has_header = not all(_looks_numeric(c) for c in rows[0])
    header = [c.strip() for c in rows[0]] if has_header else None
    body = rows[1:] if has_header else rows
    first_line = 2 if has_header else 1
    if not body:
        raise DataError(f"{path}: no data rows")
    width = len(rows[0])

    if isinstance(label_column, str) and not label_column.lstrip("-").isdigit():
        if header is None or label_column not in header:
            raise DataError(f"{path}: no column named {label_column!r}")
        label_idx = header.index(label_column)
    else:
        label_idx = int(label_column)
        if not -width <= label_idx < width:
            raise DataError(f"{path}: label column {label_idx} out of range for {width} columns")
        label_idx %= width

    features, labels = [], []
    for r, row in enumerate(body):
        line = first_line + r
        if len(row) != width:
            raise DataError(f"{path}: row {line} has {len(row)} cells, expected {width}")
        values = []
        for c, cell in enumerate(row):
            cell = cell.strip()
            if c == label_idx:
                if not cell:
                    raise DataError(f"{path}: row {line}, column {c + 1}: missing label")
                labels.append(cell)
                continue
            if not cell:
                raise DataError(f"{path}: row {line}, column {c + 1}: missing value")
            try:
                v = float(cell)
            except ValueError:
                raise DataError(f"{path}: row {line}, column {c + 1}: "
                                f"non-numeric value {cell!r}") from None
            if not math.isfinite(v):
                raise DataError(f"{path}: row {line}, column {c + 1}: non-finite value {cell!r}")
            values.append(v)
        features.append(values)

    # numerically equal labels written differently ("1" vs "1.0") are one class
    canon = [repr(float(l)) if _looks_numeric(l) else l for l in labels]
    raw = {}
    for c, l in zip(canon, labels):
        raw.setdefault(c, l)
    classes = sorted(raw, key=_label_key)
    index = {lab: k for k, lab in enumerate(classes)}
    names = tuple(h for i, h in enumerate(header) if i != label_idx) if header else ()
    return Dataset(X=np.array(features, dtype=float).reshape(len(body), width - 1),
                   y=np.array([index[l] for l in canon], dtype=np.int64),
                   name=name or path.stem, label_map=tuple(raw[c] for c in classes),
                   feature_names=names)


def minmax_fit(X) -> tuple[np.ndarray, np.ndarray]:
    X = np.asarray(X, dtype=float)
    if X.shape[0] == 0:
        raise DataError("cannot scale an empty dataset")
    return X.min(axis=0), X.max(axis=0)


def minmax_apply(X, lo, hi) -> np.ndarray:
    """Map ``[lo, hi]`` to ``[0, 1]`` per column; constant columns become 0.

    Values outside the fitted range (unseen test rows) are clipped.
    """
    X = np.asarray(X, dtype=float)
    span = hi - lo
    const = span == 0
    out = (X - lo) / np.where(const, 1.0, span)
    out[:, const] = 0.0
    return np.clip(out, 0.0, 1.0)


def minmax_scale(ds: Dataset) -> Dataset:
    """Scale every feature of ``ds`` to ``[0, 1]`` using the full dataset."""
    lo, hi = minmax_fit(ds.X)
    return replace(ds, X=minmax_apply(ds.X, lo, hi),
                   scaling={"min": lo.tolist(), "max": hi.tolist()})


# ----------------------------------------------------------------------------
# Gram matrix files

def header_path(csv_path) -> Path:
    p = Path(csv_path)
    return p.with_name(p.name + ".json") if p.suffix != ".csv" else p.with_suffix(".json")


def save_gram(path, K: np.ndarray, header: dict) -> tuple[Path, Path]:
    """Write ``K`` row-major with 17 significant digits plus a JSON header beside it."""
    path = Path(path)
    K = np.asarray(K, dtype=float)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        np.savetxt(fh, K, fmt=GRAM_FORMAT, delimiter=",")
    hp = header_path(path)
    hp.write_text(json.dumps({**header, "shape": list(K.shape)}, indent=2, sort_keys=True) + "\n",
                  encoding="utf-8")
    return path, hp


def load_gram(path) -> tuple[np.ndarray, dict]:
    path = Path(path)
    try:
        K = np.loadtxt(path, delimiter=",", ndmin=2)
    except (OSError, ValueError) as exc:
        raise DataError(f"cannot read Gram matrix {path}: {exc}") from exc
    hp = header_path(path)
    header = json.loads(hp.read_text(encoding="utf-8")) if hp.exists() else {}
    return K, header
