"""Cross-validated accuracy curves and synthetic recovery benchmarks.

A nearest-centroid classifier scores feature subsets; folds are stratified
and seeded.  Selection and standardization statistics are always fit on
the training rows of each fold only.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np

from .dataset import Dataset, apply_standardization, encode_labels, standardization_stats


@dataclass(frozen=True)
class CvConfig:
    folds: int = 10
    repeats: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.folds < 2:
            raise ValueError(f"folds must be >= 2, got {self.folds}")
        if self.repeats < 1:
            raise ValueError(f"repeats must be >= 1, got {self.repeats}")


@dataclass(frozen=True)
class SyntheticSpec:
    """Ground-truth synthetic classification problem.

    Informative features have class means ``separation * (c - 1)`` for class
    ``c``, so they increase with the label, plus Gaussian noise of scale
    ``noise_sigma``.  The remaining features are class-independent standard
    normals scaled by ``noise_sigma`` (or 1 when ``noise_sigma`` is 0).
    """

    n_samples: int = 150
    n_features: int = 50
    n_classes: int = 2
    informative: tuple = (0, 1, 2, 3, 4)
    noise_sigma: float = 1.0
    separation: float = 2.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "informative", tuple(int(i) for i in self.informative))
        if not self.informative:
            raise ValueError("informative set must be nonempty")
        if any(not 0 <= i < self.n_features for i in self.informative):
            raise ValueError(f"informative indices must lie in 0..{self.n_features - 1}")
        if len(set(self.informative)) != len(self.informative):
            raise ValueError("informative indices must be distinct")
        if self.n_classes < 2 or self.n_samples < 2 * self.n_classes:
            raise ValueError("need C >= 2 and at least two samples per class")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")
        if self.separation < 2 * self.noise_sigma or self.separation <= 0:
            raise ValueError("separation must be positive and >= 2 * noise_sigma")


def generate_synthetic(spec):
    """Draw a dataset for ``spec``; returns ``(Dataset, informative_indices)``."""
    rng = np.random.default_rng(spec.seed)
    M, N, C = spec.n_samples, spec.n_features, spec.n_classes
    y = np.arange(M) % C + 1
    rng.shuffle(y)
    # relabel so class c first appears before class c + 1; a CSV round trip
    # through load_csv then reproduces the same codes
    y, _ = encode_labels(y)
    noise_scale = spec.noise_sigma if spec.noise_sigma > 0 else 1.0
    X = noise_scale * rng.standard_normal((M, N))
    means = spec.separation * (y - 1.0)
    for i in spec.informative:
        X[:, i] = means + spec.noise_sigma * rng.standard_normal(M)
    return Dataset(X, y, C), spec.informative


def nearest_centroid_classify(X_train, y_train, X_test, n_classes=None):
    """Label each test row with the class whose training centroid is closest.

    Ties go to the smaller class index.  Classes are ``1..C``.
    """
    X_train = np.asarray(X_train, dtype=np.float64)
    X_test = np.asarray(X_test, dtype=np.float64)
    y_train = np.asarray(y_train)
    C = int(n_classes or y_train.max())
    counts = np.bincount(y_train - 1, minlength=C)
    if np.any(counts == 0):
        missing = (np.flatnonzero(counts == 0) + 1).tolist()
        raise ValueError(f"training fold has no samples of classes {missing}")
    centroids = np.stack([X_train[y_train == c].mean(axis=0) for c in range(1, C + 1)])
    d2 = ((X_test[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=-1)
    # argmin returns the first minimum, i.e. the lowest class index on ties
    return np.argmin(d2, axis=1) + 1


def stratified_folds(y, folds, rng):
    """Assign each sample a fold id so every class is spread evenly.

    Within each class the samples are shuffled and dealt round-robin,
    starting from a rotating offset so fold sizes stay balanced overall.
    """
    y = np.asarray(y)
    assignment = np.empty(y.shape[0], dtype=np.int64)
    offset = 0
    for c in np.unique(y):
        idx = np.flatnonzero(y == c)
        idx = idx[rng.permutation(idx.shape[0])]
        assignment[idx] = (np.arange(idx.shape[0]) + offset) % folds
        offset = (offset + idx.shape[0]) % folds
    return assignment


def _train_test(d, train, test):
    mean, scale = standardization_stats(d.X[train])
    constant = np.ptp(d.X[train], axis=0) == 0
    scale = np.where(constant, 0.0, scale)
    Xtr = apply_standardization(d.X[train], mean, scale)
    Xte = apply_standardization(d.X[test], mean, scale)
    Xtr[:, constant] = 0.0
    Xte[:, constant] = 0.0
    return Xtr, Xte, mean, scale


def cv_accuracy_curve(d, hp, cv, k_values, selector=None, return_details=False):
    """Mean and std of fold accuracies for the top-``k`` features, per ``k``.

    ``selector(train_dataset, hp)`` must return a full feature ranking; it
    defaults to :func:`infusedlasso.selection.fit`.  Rows are
    ``(k, mean_acc, std_acc)``; the std is over all ``folds * repeats``
    fold accuracies.
    """
    from .selection import fit

    if selector is None:
        def selector(train, params):
            return fit(train, params).ranking
    k_values = [int(k) for k in k_values]
    if not k_values:
        raise ValueError("k_values is empty")
    bad = [k for k in k_values if not 1 <= k <= d.n_features]
    if bad:
        raise ValueError(f"k values {bad} outside 1..{d.n_features}")
    if cv.folds > d.n_samples:
        raise ValueError(f"folds={cv.folds} exceeds the {d.n_samples} samples")

    rng = np.random.default_rng(cv.seed)
    acc = {k: [] for k in k_values}
    details = []
    for rep in range(cv.repeats):
        assignment = stratified_folds(d.y, cv.folds, rng)
        for fold in range(cv.folds):
            test = np.flatnonzero(assignment == fold)
            train = np.flatnonzero(assignment != fold)
            if test.size == 0:
                continue
            train_d = Dataset(d.X[train], d.y[train], d.n_classes, d.feature_names)
            ranking = list(selector(train_d, hp))
            Xtr, Xte, mean, scale = _train_test(d, train, test)
            for k in k_values:
                cols = ranking[:k]
                pred = nearest_centroid_classify(Xtr[:, cols], d.y[train],
                                                 Xte[:, cols], d.n_classes)
                acc[k].append(float(np.mean(pred == d.y[test])))
            if return_details:
                details.append({"repeat": rep, "fold": fold, "train": train,
                                "test": test, "ranking": ranking,
                                "mean": mean, "scale": scale})
    rows = [(k, float(np.mean(acc[k])), float(np.std(acc[k]))) for k in k_values]
    if return_details:
        return rows, details
    return rows


def write_curve_csv(rows, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "mean_acc", "std_acc"])
        for k, m, s in rows:
            w.writerow([k, repr(m), repr(s)])


def recovery_score(ranking, truth, k=None):
    """Fraction of ``truth`` found among the first ``k`` ranked features.

    ``ranking`` may be a :class:`SelectionResult` or an index sequence;
    ``k`` defaults to ``len(truth)``.
    """
    ranking = getattr(ranking, "ranking", ranking)
    truth = set(int(i) for i in truth)
    if not truth:
        return 0.0
    k = len(truth) if k is None else k
    top = set(int(i) for i in list(ranking)[:k])
    return len(top & truth) / len(truth)


def chance_band(n_test, n_classes, n_folds_total, sigmas=3.0):
    """``(low, high)`` band for a mean accuracy at chance level.

    Treats each of the ``n_folds_total`` fold accuracies as a binomial
    proportion over ``n_test`` samples.
    """
    p = 1.0 / n_classes
    se = math.sqrt(p * (1 - p) / (n_test * n_folds_total))
    return p - sigmas * se, p + sigmas * se
