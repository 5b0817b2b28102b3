"""Feature graphs: one complete weighted graph per feature.

Vertices are samples.  Each sample is embedded by its row of absolute
differences to every other sample, and edges carry the normalized
dot-product (cosine) kernel between embeddings.  A graph's probability
distribution is its normalized vertex strength.
"""

import os
from dataclasses import dataclass

import numpy as np

from ._backend import kernels


class DegenerateFeatureError(ValueError):
    """A constant feature has no well-defined kernel graph."""


@dataclass(frozen=True)
class FeatureGraph:
    kernel: np.ndarray
    prob: np.ndarray

    @property
    def n_vertices(self):
        return self.prob.shape[0]


def distance_matrix(f):
    """Pairwise distances ``|f_a - f_b|`` between the samples of one feature."""
    f = np.asarray(f, dtype=np.float64)
    return np.abs(f[:, None] - f[None, :])


def kernel_adjacency(A):
    """Cosine kernel between the rows of distance matrix ``A``."""
    A = np.asarray(A, dtype=np.float64)
    norms = np.sqrt(np.einsum("ij,ij->i", A, A))
    if np.any(norms == 0):
        raise DegenerateFeatureError(
            "distance matrix has an all-zero row (constant feature)")
    K = (A @ A.T) / np.outer(norms, norms)
    K = 0.5 * (K + K.T)
    np.fill_diagonal(K, 1.0)
    return np.clip(K, 0.0, 1.0)


def graph_distribution(K):
    """Vertex strengths of ``K`` normalized to sum to one."""
    K = np.asarray(K, dtype=np.float64)
    strength = K.sum(axis=1)
    total = strength.sum()
    if not total > 0:
        raise DegenerateFeatureError("kernel matrix has zero total weight")
    return strength / total


def is_constant(f):
    f = np.asarray(f)
    return bool(np.all(f == f[0]))


def build_feature_graph(f):
    f = np.asarray(f, dtype=np.float64)
    if is_constant(f):
        raise DegenerateFeatureError("constant feature")
    K = kernel_adjacency(distance_matrix(f))
    return FeatureGraph(K, graph_distribution(K))


def feature_distribution(f):
    """Distribution of ``build_feature_graph(f)`` without storing the kernel.

    Runs in O(M^2) time and O(M) memory with the compiled backend.
    """
    f = np.ascontiguousarray(f, dtype=np.float64)
    if is_constant(f):
        raise DegenerateFeatureError("constant feature")
    return kernels.feature_distribution(f)


def dump_graph_csv(graph, directory, name):
    """Write ``<name>_kernel.csv`` and ``<name>_prob.csv`` under ``directory``."""
    os.makedirs(directory, exist_ok=True)
    np.savetxt(os.path.join(directory, f"{name}_kernel.csv"), graph.kernel,
               delimiter=",", fmt="%.17g")
    np.savetxt(os.path.join(directory, f"{name}_prob.csv"), graph.prob,
               delimiter=",", fmt="%.17g")
