"""Jensen-Shannon measures between feature graphs and the interaction matrix.

Entropies use natural logarithms with the usual sign, ``H = -sum p log p``,
so divergences are nonnegative and similarities lie in ``(0, 1]``.
"""

import math

import numpy as np

from ._backend import kernels
from .dataset import class_mean_target, standardize
from .feature_graph import DegenerateFeatureError, feature_distribution, is_constant

SIMPLEX_TOL = 1e-9


def _check_simplex(P):
    P = np.asarray(P, dtype=np.float64)
    if P.ndim != 1 or P.size == 0:
        raise ValueError("expected a non-empty 1-D probability vector")
    if np.any(P < 0):
        raise ValueError("probability vector has negative entries")
    if abs(P.sum() - 1.0) > SIMPLEX_TOL:
        raise ValueError(f"probability vector sums to {P.sum()!r}, not 1")
    return P


def _entropy(P):
    nz = P[P > 0]
    # fsum is exactly rounded, so the result ignores the order of the support
    return -math.fsum(nz * np.log(nz))


def shannon_entropy(P):
    """Entropy in nats; ``0 log 0`` counts as 0."""
    return _entropy(_check_simplex(P))


def jsd(dists):
    """Equal-weight Jensen-Shannon divergence of ``n >= 2`` distributions.

    All sums are exactly rounded, so reordering the distributions or
    permuting their common support leaves the value bit-identical.
    """
    if len(dists) < 2:
        raise ValueError("jsd needs at least two distributions")
    dists = [_check_simplex(P) for P in dists]
    size = dists[0].shape[0]
    if any(P.shape[0] != size for P in dists):
        raise ValueError("distributions have different support sizes")
    n = len(dists)
    stacked = np.stack(dists)
    mixture = np.array([math.fsum(col) for col in stacked.T]) / n
    val = _entropy(mixture) - math.fsum(_entropy(P) for P in dists) / n
    return max(val, 0.0)


def jsd_similarity(dists):
    return float(np.exp(-jsd(dists)))


def pair_relevance(Gi, Gj, Ti, Tj):
    """Joint relevance of features ``i, j`` given their target graphs.

    Relevance of the pair to each target, summed, divided by the pair's
    mutual similarity (redundancy).
    """
    num = (jsd_similarity([Gi.prob, Gj.prob, Ti.prob])
           + jsd_similarity([Gi.prob, Gj.prob, Tj.prob]))
    return num / jsd_similarity([Gi.prob, Gj.prob])


def interaction_matrix(graphs, targets, degenerate_mask=None):
    """Assemble ``U`` from per-feature graphs and target graphs.

    ``graphs`` and ``targets`` may be :class:`FeatureGraph` objects or bare
    probability vectors; entries for masked features may be ``None``.
    """
    n = len(graphs)
    if len(targets) != n:
        raise ValueError("graphs and targets must align")
    mask = (np.zeros(n, dtype=bool) if degenerate_mask is None
            else np.asarray(degenerate_mask, dtype=bool).copy())
    size = None
    for k in range(n):
        if graphs[k] is None or targets[k] is None:
            mask[k] = True
        if not mask[k]:
            size = _prob(graphs[k]).shape[0]
    if size is None:
        return np.zeros((n, n))
    P = np.full((n, size), 1.0 / size)
    T = np.full((n, size), 1.0 / size)
    for k in range(n):
        if mask[k]:
            continue
        P[k] = _check_simplex(_prob(graphs[k]))
        T[k] = _check_simplex(_prob(targets[k]))
        if P[k].shape[0] != size or T[k].shape[0] != size:
            raise ValueError("all graphs must share the same vertex count")
    return kernels.interaction_from_distributions(P, T, mask)


def _prob(g):
    return g.prob if hasattr(g, "prob") else np.asarray(g, dtype=np.float64)


def dataset_distributions(d):
    """Feature and target distributions for every column of ``d``.

    Returns ``(P, T, degenerate)``; ``d`` is standardized first if needed.
    A feature is degenerate when it, or its class-mean target, is constant.
    """
    if not d.standardized:
        d = standardize(d)
    M, N = d.X.shape
    P = np.full((N, M), 1.0 / M)
    T = np.full((N, M), 1.0 / M)
    degenerate = np.asarray(d.constant, dtype=bool).copy()
    for i in range(N):
        if degenerate[i]:
            continue
        target = class_mean_target(d, i)
        if is_constant(target):
            degenerate[i] = True
            continue
        try:
            P[i] = feature_distribution(d.X[:, i])
            T[i] = feature_distribution(target)
        except DegenerateFeatureError:
            degenerate[i] = True
    return P, T, degenerate


def dataset_interaction_matrix(d):
    """``U`` for dataset ``d`` plus the degenerate-feature mask."""
    P, T, degenerate = dataset_distributions(d)
    return kernels.interaction_from_distributions(P, T, degenerate), degenerate


def write_interaction_csv(U, path):
    """Write ``U`` as CSV with a header row of 0-based feature indices."""
    U = np.asarray(U)
    header = ",".join(str(i) for i in range(U.shape[0]))
    np.savetxt(path, U, delimiter=",", header=header, comments="", fmt="%.17g")
