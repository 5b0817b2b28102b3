"""Fused-lasso feature selection driven by kernel feature graphs.

Each feature is turned into a graph over samples, pairs of features are
scored for joint relevance to the class labels with a multi-distribution
Jensen-Shannon similarity, and a fused-lasso regression with a reward for
high-scoring feature pairs picks the final subset.
"""

from ._backend import BACKEND
from .dataset import Dataset, DatasetError, class_mean_target, load_csv, standardize
from .evaluation import (CvConfig, SyntheticSpec, cv_accuracy_curve,
                         generate_synthetic, nearest_centroid_classify,
                         recovery_score)
from .feature_graph import DegenerateFeatureError, FeatureGraph, build_feature_graph
from .selection import NoSignalError, SelectionResult, fit, select_top_k
from .solver import Hyperparams, SolverDivergenceError, SolverError, solve
from .structural_info import (dataset_interaction_matrix, interaction_matrix, jsd,
                              jsd_similarity, pair_relevance, shannon_entropy)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "CvConfig", "Dataset", "DatasetError", "DegenerateFeatureError",
    "FeatureGraph", "Hyperparams", "NoSignalError", "SelectionResult",
    "SolverDivergenceError", "SolverError", "SyntheticSpec", "build_feature_graph",
    "class_mean_target", "cv_accuracy_curve", "dataset_interaction_matrix",
    "fit", "generate_synthetic", "interaction_matrix", "jsd", "jsd_similarity",
    "load_csv", "nearest_centroid_classify", "pair_relevance", "recovery_score",
    "select_top_k", "shannon_entropy", "solve", "standardize",
]
