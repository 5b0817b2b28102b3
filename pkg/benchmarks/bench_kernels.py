"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--samples 200] [--features 100]

Each row reports the best-of-``repeat`` wall time for both backends and
the speedup.  The solve row runs the full split-Bregman loop with
default hyperparameters on a synthetic problem of the requested size.
"""

import argparse
import timeit

import numpy as np

from infusedlasso import _kernels_py
from infusedlasso.dataset import standardize
from infusedlasso.evaluation import SyntheticSpec, generate_synthetic
from infusedlasso.solver import Hyperparams, solve
from infusedlasso.structural_info import dataset_distributions, dataset_interaction_matrix

try:
    from infusedlasso import _kernels
except ImportError:
    _kernels = None


def best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--samples", type=int, default=200)
    ap.add_argument("--features", type=int, default=100)
    args = ap.parse_args(argv)
    if _kernels is None:
        raise SystemExit("compiled extension not built; reinstall with cython available")

    spec = SyntheticSpec(args.samples, args.features, 2, tuple(range(5)), seed=0)
    d = standardize(generate_synthetic(spec)[0])
    P, T, mask = dataset_distributions(d)
    U, _ = dataset_interaction_matrix(d)
    f = np.ascontiguousarray(d.X[:, 0])
    response = d.y - d.y.mean()
    w = np.random.default_rng(0).normal(size=100_000)

    cases = [
        ("feature_distribution", lambda k: k.feature_distribution(f)),
        ("interaction_from_distributions",
         lambda k: k.interaction_from_distributions(P, T, mask)),
        ("soft_threshold (1e5)", lambda k: k.soft_threshold(w, 0.5)),
    ]
    print(f"M={args.samples} N={args.features}, best of {args.repeat}")
    print(f"{'kernel':34s} {'python [ms]':>12s} {'cython [ms]':>12s} {'speedup':>8s}")
    for name, run in cases:
        tp = best(lambda: run(_kernels_py), args.repeat)
        tc = best(lambda: run(_kernels), args.repeat)
        print(f"{name:34s} {1e3 * tp:12.3f} {1e3 * tc:12.3f} {tp / tc:8.1f}")
    hp = Hyperparams()
    tp = best(lambda: solve(d.X, response, U, hp, backend="python"), args.repeat)
    tc = best(lambda: solve(d.X, response, U, hp, backend="cython"), args.repeat)
    print(f"{'solve (split-Bregman loop)':34s} {1e3 * tp:12.3f} {1e3 * tc:12.3f} {tp / tc:8.1f}")


if __name__ == "__main__":
    main()
