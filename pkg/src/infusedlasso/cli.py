"""Command-line front end.

Subcommands: ``select``, ``eval``, ``synth``, ``trace``, ``dump-interaction``.
Exit status is 0 on success, 1 on input or validation errors and 2 on
numerical failure inside the solver.
"""

import argparse
import json
import logging
import os
import sys
from contextlib import nullcontext

import numpy as np

from .dataset import DatasetError, load_csv, standardize
from .evaluation import (CvConfig, SyntheticSpec, cv_accuracy_curve,
                         generate_synthetic, write_curve_csv)
from .selection import NoSignalError, fit
from .solver import Hyperparams, SolverError, solve
from .structural_info import dataset_interaction_matrix, write_interaction_csv

OUT_DIR_ENV = "INFUSEDLASSO_OUT_DIR"

log = logging.getLogger("infusedlasso")


def _int_list(text):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _add_data_args(p):
    p.add_argument("input", help="CSV file, one row per sample")
    p.add_argument("--label-column", default="-1",
                   help="label column name or 0-based position (default: last)")
    p.add_argument("--no-header", action="store_true",
                   help="the CSV has no header row")


def _add_solver_args(p):
    g = p.add_argument_group("model and solver")
    g.add_argument("--lambda1", type=float, default=Hyperparams.lambda1,
                   help="lambda_1: weight of the l1 penalty ||beta||_1")
    g.add_argument("--lambda2", type=float, default=Hyperparams.lambda2,
                   help="lambda_2: weight of the fused penalty ||C beta||_1")
    g.add_argument("--lambda3", type=float, default=Hyperparams.lambda3,
                   help="lambda_3: weight of the structural reward beta^T U beta")
    g.add_argument("--mu1", type=float, default=None,
                   help="mu_1: augmentation weight for p = beta (default: max(1, trace(X^T X)/N))")
    g.add_argument("--mu2", type=float, default=None,
                   help="mu_2: augmentation weight for q = C beta (default: max(1, trace(X^T X)/N))")
    g.add_argument("--delta1", type=float, default=None,
                   help="delta_1: dual ascent step for u (default: mu_1)")
    g.add_argument("--delta2", type=float, default=None,
                   help="delta_2: dual ascent step for v (default: mu_2)")
    g.add_argument("--tol", type=float, default=Hyperparams.tol,
                   help="convergence tolerance on residuals relative to max(1, ||beta||)")
    g.add_argument("--max-iter", type=int, default=Hyperparams.max_iter,
                   help="maximum number of split-Bregman sweeps")
    g.add_argument("--solve-method", choices=("auto", "direct", "cg"), default="auto",
                   help="linear solve for the beta step (D beta = rhs)")
    g.add_argument("--order", choices=("input", "u_diagonal"), default="input",
                   help="feature order used by the fused penalty")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="infusedlasso",
        description="Fused-lasso feature selection with structural interaction rewards.")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    parser.add_argument("--out-dir", default=None,
                        help=f"output directory (default: ${OUT_DIR_ENV} or .)")
    parser.add_argument("--threads", type=int, default=None,
                        help="cap on BLAS worker threads")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("select", help="fit the model and write result JSON + trace CSV")
    _add_data_args(p)
    _add_solver_args(p)
    p.add_argument("--dump-graphs", action="store_true",
                   help="also write each feature's kernel and distribution as CSV")

    p = sub.add_parser("eval", help="cross-validated accuracy versus number of features")
    _add_data_args(p)
    _add_solver_args(p)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--repeats", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k", type=_int_list, default=[1, 2, 5, 10],
                   help="comma-separated subset sizes")

    p = sub.add_parser("synth", help="write a synthetic dataset and its ground truth")
    p.add_argument("--samples", type=int, default=150, help="M")
    p.add_argument("--features", type=int, default=50, help="N")
    p.add_argument("--classes", type=int, default=2, help="C")
    p.add_argument("--informative", type=_int_list, default=[0, 1, 2, 3, 4],
                   help="0-based indices of informative features")
    p.add_argument("--noise-sigma", type=float, default=1.0)
    p.add_argument("--separation", type=float, default=2.0,
                   help="gap between successive class means of informative features")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("trace", help="run one solve and write the per-iteration trace")
    _add_data_args(p)
    _add_solver_args(p)

    p = sub.add_parser("dump-interaction", help="write the interaction matrix U as CSV")
    _add_data_args(p)
    return parser


def _hyperparams(args):
    return Hyperparams(lambda1=args.lambda1, lambda2=args.lambda2, lambda3=args.lambda3,
                       mu1=args.mu1, mu2=args.mu2, delta1=args.delta1,
                       delta2=args.delta2, tol=args.tol, max_iter=args.max_iter,
                       solve_method=args.solve_method)


def _load(args):
    label = args.label_column
    return load_csv(args.input, label_column=label, header=not args.no_header)


def cmd_select(args, out_dir):
    hp = _hyperparams(args)
    d = standardize(_load(args))
    result = fit(d, hp, order=args.order)
    trace_path = os.path.join(out_dir, "trace.csv")
    result.trace.write_csv(trace_path)
    result_path = os.path.join(out_dir, "result.json")
    result.write_json(result_path, trace_path="trace.csv")
    if args.dump_graphs:
        from .dataset import class_mean_target
        from .feature_graph import build_feature_graph, dump_graph_csv
        gdir = os.path.join(out_dir, "graphs")
        for i in np.flatnonzero(~result.degenerate):
            dump_graph_csv(build_feature_graph(d.X[:, i]), gdir, f"feature{i}")
            dump_graph_csv(build_feature_graph(class_mean_target(d, i)), gdir, f"target{i}")
    print(f"selected {len(result.selected)} of {d.n_features} features; "
          f"ranking head {result.ranking[:10]}; wrote {result_path}")
    if not result.converged:
        print(f"warning: not converged after {result.iterations} iterations",
              file=sys.stderr)
    return 0


def cmd_eval(args, out_dir):
    hp = _hyperparams(args)
    d = _load(args)
    cv = CvConfig(folds=args.folds, repeats=args.repeats, seed=args.seed)
    order = args.order

    def selector(train, params):
        return fit(train, params, order=order).ranking

    rows = cv_accuracy_curve(d, hp, cv, args.k, selector=selector)
    path = os.path.join(out_dir, "curve.csv")
    write_curve_csv(rows, path)
    for k, m, s in rows:
        print(f"k={k:4d}  acc={m:.4f} +/- {s:.4f}")
    return 0


def cmd_synth(args, out_dir):
    spec = SyntheticSpec(args.samples, args.features, args.classes,
                         tuple(args.informative), args.noise_sigma,
                         args.separation, args.seed)
    d, truth = generate_synthetic(spec)
    path = os.path.join(out_dir, "dataset.csv")
    with open(path, "w") as fh:
        fh.write(",".join(list(d.feature_names) + ["label"]) + "\n")
        for row, lab in zip(d.X, d.y):
            fh.write(",".join(repr(float(x)) for x in row) + f",{lab}\n")
    with open(os.path.join(out_dir, "truth.json"), "w") as fh:
        json.dump({"informative": list(truth), "n_samples": spec.n_samples,
                   "n_features": spec.n_features, "n_classes": spec.n_classes,
                   "noise_sigma": spec.noise_sigma, "separation": spec.separation,
                   "seed": spec.seed}, fh, indent=2)
        fh.write("\n")
    print(f"wrote {path}")
    return 0


def cmd_trace(args, out_dir):
    hp = _hyperparams(args)
    d = standardize(_load(args))
    U, _ = dataset_interaction_matrix(d)
    state = solve(d.X, d.y - d.y.mean(), U, hp)
    path = os.path.join(out_dir, "trace.csv")
    state.trace.write_csv(path)
    summary = {"iterations": state.iter, "converged": state.converged,
               "residual_p": state.residual_p, "residual_q": state.residual_q,
               "objective": state.objective,
               "beta_norm": float(np.linalg.norm(state.beta)), "mu1_shifts": state.mu1_shifts,
               "config": state.hyperparams.to_dict()}
    with open(os.path.join(out_dir, "trace_summary.json"), "w") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    flag = "converged" if state.converged else "not converged"
    print(f"{state.iter} iterations, {flag}; wrote {path}")
    return 0


def cmd_dump_interaction(args, out_dir):
    d = standardize(_load(args))
    U, _ = dataset_interaction_matrix(d)
    path = os.path.join(out_dir, "interaction.csv")
    write_interaction_csv(U, path)
    print(f"wrote {path}")
    return 0


COMMANDS = {
    "select": cmd_select,
    "eval": cmd_eval,
    "synth": cmd_synth,
    "trace": cmd_trace,
    "dump-interaction": cmd_dump_interaction,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s: %(message)s")

    out_dir = args.out_dir or os.environ.get(OUT_DIR_ENV) or "."
    if args.threads is not None:
        from threadpoolctl import threadpool_limits
        limits = threadpool_limits(limits=args.threads)
    else:
        limits = nullcontext()
    try:
        os.makedirs(out_dir, exist_ok=True)
        with limits:
            return COMMANDS[args.command](args, out_dir)
    except SolverError as exc:
        print(f"error: solver failed: {exc}", file=sys.stderr)
        return 2
    except (DatasetError, NoSignalError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
