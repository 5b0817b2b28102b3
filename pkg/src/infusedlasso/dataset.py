"""Tabular datasets with discrete class labels.

Labels are always stored re-encoded as ``1..C`` in order of first
appearance.  Feature indices are 0-based everywhere in the package.
"""

import csv
import math
import os
from dataclasses import dataclass, field, replace

import numpy as np


class DatasetError(ValueError):
    """Raised for unreadable or invalid input data."""


@dataclass(frozen=True)
class Dataset:
    """Design matrix ``X`` (M samples x N features) with labels ``y``.

    ``constant`` flags feature columns with zero spread; ``standardized``
    records whether :func:`standardize` has been applied.
    """

    X: np.ndarray
    y: np.ndarray
    n_classes: int
    feature_names: tuple = ()
    class_names: tuple = ()
    constant: np.ndarray = field(default=None)
    standardized: bool = False

    def __post_init__(self):
        X = np.asarray(self.X, dtype=np.float64)
        y = np.asarray(self.y, dtype=np.int64)
        if X.ndim != 2:
            raise DatasetError(f"X must be 2-D, got shape {X.shape}")
        M, N = X.shape
        if M < 2:
            raise DatasetError(f"need at least 2 samples, got {M}")
        if N < 2:
            raise DatasetError(f"need at least 2 features, got {N}")
        if y.shape != (M,):
            raise DatasetError(f"y has shape {y.shape}, expected ({M},)")
        if not np.all(np.isfinite(X)):
            r, c = np.argwhere(~np.isfinite(X))[0]
            raise DatasetError(f"non-finite value at row {r}, column {c}")
        C = int(self.n_classes)
        if C < 2:
            raise DatasetError("single-class label vector; need C >= 2")
        present = np.unique(y)
        if not np.array_equal(present, np.arange(1, C + 1)):
            raise DatasetError(
                f"labels must cover 1..{C} exactly, found {present.tolist()}")
        constant = self.constant
        if constant is None:
            constant = np.ptp(X, axis=0) == 0
        X.setflags(write=False)
        y.setflags(write=False)
        constant = np.asarray(constant, dtype=bool)
        names = tuple(self.feature_names) or tuple(f"f{i}" for i in range(N))
        if len(names) != N:
            raise DatasetError(f"{len(names)} feature names for {N} columns")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "n_classes", C)
        object.__setattr__(self, "constant", constant)
        object.__setattr__(self, "feature_names", names)
        object.__setattr__(self, "class_names", tuple(self.class_names))

    @property
    def n_samples(self):
        return self.X.shape[0]

    @property
    def n_features(self):
        return self.X.shape[1]

    def subset(self, rows):
        """Rows ``rows`` as a new, unstandardized dataset.

        Labels are re-encoded if a class disappears, so ``rows`` should
        contain every class (stratified folds guarantee it).
        """
        rows = np.asarray(rows)
        y, C = encode_labels(self.y[rows])
        return Dataset(self.X[rows], y, C, self.feature_names)


def encode_labels(labels):
    """Map arbitrary labels to ``1..C`` by first appearance.

    Returns ``(codes, C)``.
    """
    mapping = {}
    codes = np.empty(len(labels), dtype=np.int64)
    for k, lab in enumerate(labels):
        if lab not in mapping:
            mapping[lab] = len(mapping) + 1
        codes[k] = mapping[lab]
    return codes, len(mapping)


def load_csv(path, label_column=-1, header=True, delimiter=","):
    """Read a CSV file into a :class:`Dataset`.

    ``label_column`` is a column name (requires ``header``) or an integer
    position; negative positions count from the end.  Every other column
    must be numeric.
    """
    path = os.fspath(path)
    if not os.path.isfile(path):
        raise DatasetError(f"no such file: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh, delimiter=delimiter) if r]
    if header:
        if not rows:
            raise DatasetError(f"{path}: empty file")
        names, rows = [c.strip() for c in rows[0]], rows[1:]
    else:
        names = None
    if not rows:
        raise DatasetError(f"{path}: no data rows")
    width = len(rows[0])
    for k, r in enumerate(rows):
        if len(r) != width:
            raise DatasetError(
                f"{path}: row {k + 1} has {len(r)} cells, expected {width}")

    if isinstance(label_column, str) and not label_column.lstrip("-").isdigit():
        if names is None:
            raise DatasetError("a label column name requires a header row")
        if label_column not in names:
            raise DatasetError(f"{path}: no column named {label_column!r}")
        lab = names.index(label_column)
    else:
        lab = int(label_column)
        if not -width <= lab < width:
            raise DatasetError(f"label column {lab} outside 0..{width - 1}")
        lab %= width

    feat_cols = [c for c in range(width) if c != lab]
    X = np.empty((len(rows), len(feat_cols)))
    for k, r in enumerate(rows):
        for j, c in enumerate(feat_cols):
            cell = r[c].strip()
            try:
                val = float(cell)
            except ValueError:
                val = math.nan
            if not math.isfinite(val):
                col = names[c] if names else c
                raise DatasetError(
                    f"{path}: non-numeric or non-finite cell {cell!r} "
                    f"at data row {k + 1}, column {col}")
            X[k, j] = val

    raw_labels = [r[lab].strip() for r in rows]
    if len(rows) < 2:
        raise DatasetError(f"{path}: fewer than 2 samples")
    y, C = encode_labels(raw_labels)
    if C < 2:
        raise DatasetError(f"{path}: single-class label column")
    class_names = tuple(dict.fromkeys(raw_labels))
    feature_names = tuple(names[c] for c in feat_cols) if names else ()
    return Dataset(X, y, C, feature_names, class_names)


def standardization_stats(X):
    """Column means and sample standard deviations (``ddof=1``)."""
    X = np.asarray(X, dtype=np.float64)
    return X.mean(axis=0), X.std(axis=0, ddof=1)


def apply_standardization(X, mean, scale):
    """z-score ``X`` with given statistics; zero-scale columns are only centered."""
    X = np.asarray(X, dtype=np.float64) - mean
    safe = np.where(scale > 0, scale, 1.0)
    return X / safe


def standardize(d):
    """Return ``d`` with every column at mean 0 and unit sample std.

    Constant columns become all zeros and stay flagged in ``d.constant``.
    """
    mean, scale = standardization_stats(d.X)
    constant = np.ptp(d.X, axis=0) == 0
    scale = np.where(constant, 0.0, scale)
    Z = apply_standardization(d.X, mean, scale)
    Z[:, constant] = 0.0
    return replace(d, X=Z, constant=constant, standardized=True)


def class_means(f, y, n_classes):
    """Per-class mean of vector ``f``, indexed ``0..C-1``."""
    f = np.asarray(f, dtype=np.float64)
    sums = np.bincount(y - 1, weights=f, minlength=n_classes)
    counts = np.bincount(y - 1, minlength=n_classes)
    return sums / counts


def class_mean_target(d, feature_index):
    """Target feature for column ``feature_index``.

    Entry ``a`` is the mean of that column over all samples sharing
    sample ``a``'s class.
    """
    if not 0 <= feature_index < d.n_features:
        raise IndexError(
            f"feature index {feature_index} outside 0..{d.n_features - 1}")
    f = d.X[:, feature_index]
    return class_means(f, d.y, d.n_classes)[d.y - 1]
