"""Acceptance checks, one test per criterion.

Each check prints a single ``PASS``/``FAIL`` line with the measured numbers
before asserting, so a plain ``pytest tests/test_acceptance.py`` run shows
the full scorecard.  Running this file as a script does the same without
pytest.
"""

import itertools
import math
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))
import oracles  # noqa: E402

from infusedlasso.cli import main as cli_main  # noqa: E402
from infusedlasso.dataset import Dataset, standardize  # noqa: E402
from infusedlasso.evaluation import (CvConfig, SyntheticSpec, chance_band,  # noqa: E402
                                     cv_accuracy_curve, generate_synthetic,
                                     recovery_score)
from infusedlasso.selection import fit  # noqa: E402
from infusedlasso.solver import (Hyperparams, diff_apply, p_update, q_update,  # noqa: E402
                                 smooth_gradient, smooth_value, soft_threshold, solve)
from infusedlasso.structural_info import (dataset_interaction_matrix, jsd,  # noqa: E402
                                          jsd_similarity)


def report(number, title, ok, detail, capsys=None):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title}: {detail}"
    if capsys is not None:
        with capsys.disabled():
            print("\n" + line)
    else:
        print(line)
    assert ok, line


def _random_instance(rng):
    M = int(rng.integers(3, 13))
    N = int(rng.integers(2, 9))
    C = int(rng.integers(2, min(4, M) + 1))
    y = np.concatenate([np.arange(1, C + 1), rng.integers(1, C + 1, size=M - C)])
    rng.shuffle(y)
    X = rng.normal(size=(M, N)) * rng.uniform(0.1, 10, size=N)
    # occasionally plant a constant column or a constant class-mean target
    if rng.random() < 0.2:
        X[:, 0] = 3.0
    return X, y, C


def check_c1_interaction_matches_oracle(capsys=None):
    rng = np.random.default_rng(2024)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(100):
        X, y, C = _random_instance(rng)
        U, _ = dataset_interaction_matrix(Dataset(X, y, C))
        ref = np.array(oracles.interaction([list(c) for c in X.T], list(y)))
        scale = np.maximum(np.abs(ref), 1e-300)
        err = np.where(ref == 0, np.abs(U), np.abs(U - ref) / scale)
        worst = max(worst, float(err.max()))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-10 and elapsed < 10
    report(1, "interaction matrix vs brute-force oracle", ok,
           f"100 instances, max rel err {worst:.2e} (<= 1e-10), {elapsed:.2f}s (< 10s)", capsys)


def _rand_simplex(rng, size, sparse):
    p = rng.random(size)
    if sparse:
        p[rng.random(size) < 0.3] = 0.0
        if p.sum() == 0:
            p[0] = 1.0
    return p / p.sum()


def check_c2_jsd_suite(capsys=None):
    rng = np.random.default_rng(7)
    failures = []
    for t in range(1000):
        n = 2 if t % 2 else 3
        size = int(rng.integers(1, 21))
        if t % 5 == 0:
            base = _rand_simplex(rng, size, t % 3 == 0)
            dists = [base.copy() for _ in range(n)]
        else:
            dists = [_rand_simplex(rng, size, t % 3 == 0) for _ in range(n)]
        d = jsd(dists)
        s = jsd_similarity(dists)
        equal = all(np.array_equal(dists[0], q) for q in dists[1:])
        if not (0.0 <= d <= math.log(n) + 1e-15):
            failures.append((t, "range", d))
        if not (1.0 / n - 1e-15 <= s <= 1.0):
            failures.append((t, "similarity range", s))
        if equal and d > 1e-12:
            failures.append((t, "equal but positive", d))
        if not equal and np.max(np.abs(dists[0] - dists[1])) > 1e-12 and d <= 0.0:
            failures.append((t, "distinct but zero", d))
        perm = rng.permutation(size)
        for order in itertools.permutations(range(n)):
            shuffled = [dists[i][perm] for i in order]
            if jsd(shuffled) != d:
                failures.append((t, "permutation", order))
                break
    report(2, "JSD bounds, identity and permutation invariance", not failures,
           f"1000 tuples, {len(failures)} violations" + (f", first {failures[0]}" if failures else ""),
           capsys)


def _orthonormal(rng, M, N):
    Q, _ = np.linalg.qr(rng.normal(size=(M, N)))
    return Q


def check_c3_solver_closed_forms(capsys=None):
    rng = np.random.default_rng(3)
    X = _orthonormal(rng, 64, 16)
    y = X @ rng.normal(scale=2, size=16) + 0.3 * rng.normal(size=64)
    lam1 = 0.8
    start = time.perf_counter()
    s = solve(X, y, None, Hyperparams(lambda1=lam1, lambda2=0, lambda3=0, tol=1e-10,
                                      max_iter=10000))
    t_lasso = time.perf_counter() - start
    err_lasso = float(np.abs(s.beta - soft_threshold(X.T @ y, lam1)).max())

    start = time.perf_counter()
    s0 = solve(X, y, None, Hyperparams(lambda1=0, lambda2=0, lambda3=0, tol=1e-10,
                                       max_iter=10000))
    t_ls = time.perf_counter() - start
    err_ls = float(np.abs(s0.beta - np.linalg.solve(X.T @ X, X.T @ y)).max())
    ok = err_lasso <= 1e-6 and err_ls <= 1e-6 and t_lasso < 5 and t_ls < 5
    report(3, "solver vs orthonormal lasso and normal equations", ok,
           f"lasso err {err_lasso:.2e} in {t_lasso:.3f}s, LS err {err_ls:.2e} "
           f"in {t_ls:.3f}s (<= 1e-6, < 5s each)", capsys)


def check_c4_gradient_check(capsys=None):
    rng = np.random.default_rng(4)
    M, N = 30, 12
    X, y = rng.normal(size=(M, N)), rng.normal(size=M)
    U = rng.random((N, N))
    U = U + U.T
    hp = Hyperparams(lambda3=0.05, mu1=1.3, mu2=0.7)
    p, u = rng.normal(size=N), rng.normal(size=N)
    q, v = rng.normal(size=N - 1), rng.normal(size=N - 1)
    h = 1e-5
    worst = 0.0
    for _ in range(50):
        b = rng.normal(scale=2, size=N)
        g = smooth_gradient(b, X, y, U, hp, p, q, u, v)
        fd = np.array([(smooth_value(b + h * e, X, y, U, hp, p, q, u, v)
                        - smooth_value(b - h * e, X, y, U, hp, p, q, u, v)) / (2 * h)
                       for e in np.eye(N)])
        worst = max(worst, float(np.linalg.norm(g - fd) / np.linalg.norm(g)))
    report(4, "analytic gradient vs central differences", worst <= 1e-5,
           f"50 points, max rel err {worst:.2e} (<= 1e-5)", capsys)


def check_c5_proximal_exactness(capsys=None):
    rng = np.random.default_rng(5)
    N = 10
    losses = 0
    trials = 10_000
    for t in range(trials):
        beta, u = rng.normal(size=N), rng.normal(size=N)
        v = rng.normal(size=N - 1)
        mu1, mu2 = rng.uniform(0.1, 5, size=2)
        lam1, lam2 = rng.uniform(0, 2, size=2)
        p = p_update(beta, u, mu1, lam1)
        q = q_update(beta, v, mu2, lam2)
        cb = diff_apply(beta)

        def fp(z):
            return lam1 * np.abs(z).sum() + u @ (beta - z) + 0.5 * mu1 * np.sum((beta - z) ** 2)

        def fq(z):
            return lam2 * np.abs(z).sum() + v @ (cb - z) + 0.5 * mu2 * np.sum((cb - z) ** 2)

        scale = 10.0 ** rng.uniform(-4, 0)
        if fp(p + rng.normal(scale=scale, size=N)) < fp(p):
            losses += 1
        if fq(q + rng.normal(scale=scale, size=N - 1)) < fq(q):
            losses += 1
    report(5, "p and q updates beat random perturbations", losses == 0,
           f"{trials} perturbations of each, {losses} improvements found", capsys)


def check_c6_convergence_reproduction(capsys=None):
    spec = SyntheticSpec(n_samples=200, n_features=100, n_classes=2,
                         informative=tuple(range(10)), seed=6)
    d, _ = generate_synthetic(spec)
    start = time.perf_counter()
    d = standardize(d)
    U, _ = dataset_interaction_matrix(d)
    s = solve(d.X, d.y - d.y.mean(), U, Hyperparams())
    elapsed = time.perf_counter() - start
    rp = s.trace.residual_p
    rq = s.trace.residual_q
    below = np.flatnonzero((rp < 1e-6) & (rq < 1e-6))
    first = int(below[0]) + 1 if below.size else None
    tail = np.diff(s.trace.objective[-51:])
    monotone = s.iter >= 51 and bool(np.all(tail <= 0))
    ok = first is not None and first <= 1000 and monotone and elapsed < 30
    report(6, "convergence on M=200, N=100 with defaults", ok,
           f"residuals < 1e-6 at iteration {first}, stopped at {s.iter}, final-50 "
           f"objective max increase {tail.max():.2e}, {elapsed:.2f}s (< 30s)", capsys)


def check_c7_synthetic_recovery(capsys=None):
    with_u, without_u = [], []
    for seed in range(20):
        d, truth = generate_synthetic(SyntheticSpec(150, 50, 2, (0, 1, 2, 3, 4),
                                                    noise_sigma=1.0, separation=2.0,
                                                    seed=seed))
        d = standardize(d)
        U, _ = dataset_interaction_matrix(d)
        with_u.append(recovery_score(fit(d, Hyperparams(), U=U), truth, k=5))
        without_u.append(recovery_score(fit(d, Hyperparams(lambda3=0.0), U=U), truth, k=5))
    m1, m0 = float(np.mean(with_u)), float(np.mean(without_u))
    ok = m1 >= 0.8 and m1 >= m0
    report(7, "synthetic recovery at k=5 over 20 seeds", ok,
           f"mean recovery {m1:.3f} with lambda3={Hyperparams.lambda3} (>= 0.8), "
           f"{m0:.3f} with lambda3=0 (must not exceed)", capsys)


def check_c8_cv_protocol(capsys=None):
    import tempfile
    tmp_path = Path(tempfile.mkdtemp())
    d, _ = generate_synthetic(SyntheticSpec(200, 20, 2, (0, 1, 2), seed=8))
    y = np.random.default_rng(88).permutation(d.y)
    cv = CvConfig(folds=5, repeats=4, seed=1)
    mean_acc = cv_accuracy_curve(Dataset(d.X, y, 2), Hyperparams(), cv, [5])[0][1]
    low, high = chance_band(200 // cv.folds, 2, cv.folds * cv.repeats)
    in_band = low <= mean_acc <= high

    outputs = []
    for run in ("a", "b"):
        out = tmp_path / run
        codes = [
            cli_main(["--out-dir", str(out), "synth", "--samples", "80", "--features", "15",
                      "--seed", "9"]),
            cli_main(["--out-dir", str(out), "select", str(out / "dataset.csv")]),
            cli_main(["--out-dir", str(out), "eval", str(out / "dataset.csv"), "--folds", "4",
                      "--repeats", "2", "--seed", "3", "--k", "1,3,5"]),
        ]
        assert codes == [0, 0, 0]
        outputs.append({name: (out / name).read_bytes() for name in
                        ("dataset.csv", "truth.json", "result.json", "trace.csv", "curve.csv")})
    identical = outputs[0] == outputs[1]
    report(8, "CV chance level and reproducible outputs", in_band and identical,
           f"permuted-label accuracy {mean_acc:.3f} in [{low:.3f}, {high:.3f}], "
           f"byte-identical reruns: {identical}", capsys)


CHECKS = [check_c1_interaction_matches_oracle, check_c2_jsd_suite,
          check_c3_solver_closed_forms, check_c4_gradient_check,
          check_c5_proximal_exactness, check_c6_convergence_reproduction,
          check_c7_synthetic_recovery, check_c8_cv_protocol]


@pytest.mark.parametrize("check", CHECKS, ids=[f"criterion{i}" for i in range(1, 9)])
def test_acceptance(check, capsys, caplog):
    caplog.set_level("ERROR")
    check(capsys)


if __name__ == "__main__":
    failed = 0
    for check in CHECKS:
        try:
            check()
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
