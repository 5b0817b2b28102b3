"""Split-Bregman solver for the structurally rewarded fused lasso.

Minimizes::

    1/2 ||y - X b||^2 + lambda1 ||b||_1 + lambda2 ||C b||_1 - lambda3 b^T U b

where ``C`` takes successive differences ``(C b)_k = b_k - b_{k+1}``.  The
problem is split with ``p = b`` and ``q = C b``; each sweep solves one
linear system for ``b``, soft-thresholds ``p`` and ``q``, then takes a
gradient-ascent step on the duals ``u`` and ``v``.
"""

import csv
import logging
from dataclasses import asdict, dataclass, field, replace

import numpy as np
import scipy.linalg
from scipy.sparse.linalg import eigsh

from ._backend import kernels

logger = logging.getLogger(__name__)

DIRECT_MAX_N = 2000
MAX_SHIFTS = 6


class SolverError(RuntimeError):
    """Numerical failure inside the solver."""


class SolverDivergenceError(SolverError):
    def __init__(self, iteration, message=None):
        self.iteration = iteration
        super().__init__(message or (
            f"non-finite value at iteration {iteration}; "
            "try smaller delta1/delta2 or larger mu1/mu2"))


class IndefiniteSystemError(SolverError):
    pass


@dataclass(frozen=True)
class Hyperparams:
    """Regularization, augmentation and stopping parameters.

    ``mu1``/``mu2`` left as None are resolved per problem to
    ``max(1, trace(X^T X) / N)`` (see :meth:`resolve`), which keeps the
    augmentation on the scale of the data term.  ``delta1``/``delta2``
    default to ``mu1``/``mu2``.  ``solve_method`` is
    ``"auto"`` (direct up to ``DIRECT_MAX_N`` features, CG above),
    ``"direct"`` or ``"cg"``.
    """

    lambda1: float = 1.0
    lambda2: float = 0.1
    lambda3: float = 0.01
    mu1: float = None
    mu2: float = None
    delta1: float = None
    delta2: float = None
    tol: float = 1e-6
    max_iter: int = 1000
    solve_method: str = "auto"
    cg_tol: float = 1e-12

    def __post_init__(self):
        for name in ("lambda1", "lambda2", "lambda3"):
            val = getattr(self, name)
            if not (np.isfinite(val) and val >= 0):
                raise ValueError(f"{name} must be finite and >= 0, got {val}")
        for name in ("mu1", "mu2", "tol", "cg_tol"):
            val = getattr(self, name)
            if val is None and name in ("mu1", "mu2"):
                continue
            if not (np.isfinite(val) and val > 0):
                raise ValueError(f"{name} must be finite and > 0, got {val}")
        for name in ("delta1", "delta2"):
            val = getattr(self, name)
            if val is not None and not (np.isfinite(val) and val >= 0):
                raise ValueError(f"{name} must be finite and >= 0, got {val}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise ValueError(f"max_iter must be a positive integer, got {self.max_iter}")
        if self.solve_method not in ("auto", "direct", "cg"):
            raise ValueError(f"unknown solve_method {self.solve_method!r}")

    def resolve(self, XtX):
        """Copy with ``mu1``/``mu2`` filled in from the Gram matrix."""
        if self.mu1 is not None and self.mu2 is not None:
            return self
        auto = max(1.0, float(np.trace(XtX)) / XtX.shape[0])
        return replace(self,
                       mu1=auto if self.mu1 is None else self.mu1,
                       mu2=auto if self.mu2 is None else self.mu2)

    @property
    def step1(self):
        return self.mu1 if self.delta1 is None else self.delta1

    @property
    def step2(self):
        return self.mu2 if self.delta2 is None else self.delta2

    def to_dict(self):
        d = asdict(self)
        d["delta1"], d["delta2"] = self.step1, self.step2
        return d


# -- difference operator ----------------------------------------------------

def diff_apply(beta):
    """``C @ beta``."""
    beta = np.asarray(beta)
    return beta[:-1] - beta[1:]


def diff_transpose_apply(z):
    """``C.T @ z`` for ``z`` of length ``N - 1``."""
    z = np.asarray(z)
    out = np.zeros(z.shape[0] + 1)
    out[:-1] += z
    out[1:] -= z
    return out


def difference_matrix(n):
    """Dense ``(n-1) x n`` first-difference matrix."""
    C = np.zeros((n - 1, n))
    idx = np.arange(n - 1)
    C[idx, idx] = 1.0
    C[idx, idx + 1] = -1.0
    return C


def diff_gram(n):
    """``C.T @ C``: the path-graph Laplacian."""
    L = np.zeros((n, n))
    idx = np.arange(n - 1)
    L[idx, idx] += 1.0
    L[idx + 1, idx + 1] += 1.0
    L[idx, idx + 1] = -1.0
    L[idx + 1, idx] = -1.0
    return L


def system_matrix(XtX, U, lambda3, mu1, mu2):
    n = XtX.shape[0]
    D = XtX - 2.0 * lambda3 * U + mu1 * np.eye(n) + mu2 * diff_gram(n)
    return 0.5 * (D + D.T)


# -- linear solves ----------------------------------------------------------

class CholeskySystem:
    """Stored Cholesky factor of the (constant) system matrix."""

    method = "direct"

    def __init__(self, D):
        try:
            self.R = scipy.linalg.cholesky(D, lower=False, check_finite=True)
        except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
            raise IndefiniteSystemError("system matrix is not positive definite") from exc
        self.D = D

    def solve(self, rhs):
        return scipy.linalg.cho_solve((self.R, False), rhs, check_finite=False)


class CGSystem:
    """Jacobi-preconditioned conjugate gradients on ``D``.

    Positive definiteness is checked once up front via the smallest
    eigenvalue; a non-positive curvature step during a solve also raises.
    """

    method = "cg"

    def __init__(self, D, tol=1e-12, max_iter=None):
        n = D.shape[0]
        if n > 1:
            lam_min = eigsh(D, k=1, which="SA", return_eigenvectors=False)[0]
        else:
            lam_min = D[0, 0]
        if not lam_min > 0:
            raise IndefiniteSystemError(
                f"system matrix has smallest eigenvalue {lam_min:.3g}")
        diag = np.diag(D)
        self.D = D
        self.inv_diag = 1.0 / diag
        self.tol = tol
        self.max_iter = max_iter or 10 * n
        self.x0 = np.zeros(n)

    def solve(self, rhs):
        D = self.D
        x = self.x0.copy()
        r = rhs - D @ x
        z = self.inv_diag * r
        d = z.copy()
        rz = r @ z
        stop = self.tol * max(np.linalg.norm(rhs), 1e-300)
        for _ in range(self.max_iter):
            if np.linalg.norm(r) <= stop:
                break
            Dd = D @ d
            curv = d @ Dd
            if not curv > 0:
                raise IndefiniteSystemError("non-positive curvature in CG")
            alpha = rz / curv
            x += alpha * d
            r -= alpha * Dd
            z = self.inv_diag * r
            rz_new = r @ z
            d = z + (rz_new / rz) * d
            rz = rz_new
        # warm start the next call; successive right-hand sides are close
        self.x0 = x
        return x


def prepare_system(XtX, U, hp):
    """Factor ``D``, doubling ``mu1`` until it is positive definite.

    Returns ``(system, hp_used, shifts)`` where ``shifts`` lists the
    ``mu1`` values that were tried and rejected.
    """
    n = XtX.shape[0]
    method = hp.solve_method
    if method == "auto":
        method = "direct" if n <= DIRECT_MAX_N else "cg"
    shifts = []
    cur = hp
    for _ in range(MAX_SHIFTS + 1):
        D = system_matrix(XtX, U, cur.lambda3, cur.mu1, cur.mu2)
        try:
            if method == "direct":
                system = CholeskySystem(D)
            else:
                system = CGSystem(D, tol=cur.cg_tol)
            return system, cur, shifts
        except IndefiniteSystemError:
            shifts.append(cur.mu1)
            logger.warning("system matrix indefinite at mu1=%g; doubling", cur.mu1)
            cur = replace(cur, mu1=2.0 * cur.mu1)
    raise IndefiniteSystemError(
        f"system matrix stays indefinite after {MAX_SHIFTS} doublings of mu1 "
        f"(last mu1={shifts[-1]:g}); use a larger mu1 or a smaller lambda3")


# -- primal / dual steps ----------------------------------------------------

def soft_threshold(w, lam):
    """Elementwise ``sign(w) * max(|w| - lam, 0)``."""
    if lam < 0:
        raise ValueError("threshold must be nonnegative")
    return kernels.soft_threshold(np.asarray(w, dtype=np.float64), float(lam))


def beta_rhs(Xty, p, q, u, v, mu1, mu2):
    return Xty + mu1 * p - u + diff_transpose_apply(mu2 * q - v)


def beta_update(system, Xty, p, q, u, v, mu1, mu2):
    """Minimize the smooth part of the augmented Lagrangian over ``beta``."""
    return system.solve(beta_rhs(Xty, p, q, u, v, mu1, mu2))


def p_update(beta, u, mu1, lambda1):
    return soft_threshold(beta + u / mu1, lambda1 / mu1)


def q_update(beta, v, mu2, lambda2):
    return soft_threshold(diff_apply(beta) + v / mu2, lambda2 / mu2)


def dual_update(beta, p, q, u, v, delta1, delta2):
    return u + delta1 * (beta - p), v + delta2 * (diff_apply(beta) - q)


# -- objectives -------------------------------------------------------------

def objective_value(X, y, U, hp, beta):
    """Value of the penalized objective at ``beta``."""
    beta = np.asarray(beta, dtype=np.float64)
    r = y - X @ beta
    val = 0.5 * r @ r + hp.lambda1 * np.abs(beta).sum()
    val += hp.lambda2 * np.abs(diff_apply(beta)).sum()
    if U is not None:
        val -= hp.lambda3 * beta @ U @ beta
    return float(val)


def _objective_gram(beta, G, Xty, yty, lambda1, lambda2):
    return float(0.5 * yty - beta @ Xty + 0.5 * beta @ (G @ beta)
                 + lambda1 * np.abs(beta).sum()
                 + lambda2 * np.abs(diff_apply(beta)).sum())


def smooth_value(beta, X, y, U, hp, p, q, u, v):
    """The differentiable part of the augmented Lagrangian in ``beta``."""
    hp = hp.resolve(X.T @ X)
    r = y - X @ beta
    cb = diff_apply(beta)
    return float(0.5 * r @ r - hp.lambda3 * beta @ U @ beta
                 + u @ (beta - p) + v @ (cb - q)
                 + 0.5 * hp.mu1 * np.sum((beta - p) ** 2)
                 + 0.5 * hp.mu2 * np.sum((cb - q) ** 2))


def smooth_gradient(beta, X, y, U, hp, p, q, u, v):
    """Analytic gradient of :func:`smooth_value`; zero at the beta update."""
    XtX = X.T @ X
    hp = hp.resolve(XtX)
    lap = diff_gram(beta.shape[0])
    return (XtX @ beta - 2.0 * hp.lambda3 * U @ beta + hp.mu1 * beta
            + hp.mu2 * lap @ beta - X.T @ y - hp.mu1 * p + u
            - hp.mu2 * diff_transpose_apply(q) + diff_transpose_apply(v))


# -- driver -----------------------------------------------------------------

@dataclass
class Trace:
    objective: np.ndarray
    residual_p: np.ndarray
    residual_q: np.ndarray
    step: np.ndarray

    def __len__(self):
        return self.objective.shape[0]

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["iter", "objective", "residual_p", "residual_q"])
            for k in range(len(self)):
                w.writerow([k + 1, repr(float(self.objective[k])),
                            repr(float(self.residual_p[k])),
                            repr(float(self.residual_q[k]))])


@dataclass
class SolverState:
    beta: np.ndarray
    p: np.ndarray
    q: np.ndarray
    u: np.ndarray
    v: np.ndarray
    iter: int
    converged: bool
    trace: Trace
    hyperparams: Hyperparams
    mu1_shifts: list = field(default_factory=list)
    backend: str = "python"

    @property
    def residual_p(self):
        return float(np.linalg.norm(self.beta - self.p))

    @property
    def residual_q(self):
        return float(np.linalg.norm(diff_apply(self.beta) - self.q))

    @property
    def objective(self):
        return float(self.trace.objective[-1]) if len(self.trace) else float("nan")


def solve(X, y, U=None, hp=None, beta0=None, backend="auto"):
    """Run split-Bregman iterations from ``beta0`` (default zeros).

    Stops once ``||beta - p||``, ``||C beta - q||`` and the change in
    ``beta`` over the last sweep are all at most ``tol * max(1, ||beta||)``,
    or after ``max_iter`` sweeps.  ``backend`` is ``"auto"``, ``"python"``
    or ``"cython"``.
    """
    hp = hp or Hyperparams()
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    M, N = X.shape
    if y.shape != (M,):
        raise ValueError(f"y has shape {y.shape}, expected ({M},)")
    U = np.zeros((N, N)) if U is None else np.asarray(U, dtype=np.float64)
    if U.shape != (N, N):
        raise ValueError(f"U has shape {U.shape}, expected ({N}, {N})")
    if not np.array_equal(U, U.T):
        raise ValueError("U must be symmetric")

    XtX = X.T @ X
    Xty = X.T @ y
    yty = float(y @ y)
    system, hp_used, shifts = prepare_system(XtX, U, hp.resolve(XtX))
    G = XtX - 2.0 * hp_used.lambda3 * U

    beta = np.zeros(N) if beta0 is None else np.array(beta0, dtype=np.float64)
    p = beta.copy()
    q = diff_apply(beta).copy()
    u = np.zeros(N)
    v = np.zeros(N - 1)

    use_compiled = (system.method == "direct"
                    and hasattr(kernels, "split_bregman_direct")
                    and backend in ("auto", "cython"))
    if backend == "cython" and not use_compiled:
        raise ValueError("compiled backend unavailable for this configuration")

    if use_compiled:
        n = hp_used.max_iter
        obj, rp, rq, rs = (np.empty(n) for _ in range(4))
        iters, converged = kernels.split_bregman_direct(
            np.asfortranarray(system.R), Xty, np.asfortranarray(G), yty,
            hp_used.lambda1, hp_used.lambda2, hp_used.mu1, hp_used.mu2,
            hp_used.step1, hp_used.step2, beta, p, q, u, v,
            hp_used.tol, n, obj, rp, rq, rs)
        trace = Trace(obj[:iters], rp[:iters], rq[:iters], rs[:iters])
        if iters and not np.isfinite(obj[iters - 1]):
            raise SolverDivergenceError(iters)
        return SolverState(beta, p, q, u, v, iters, bool(converged), trace,
                           hp_used, shifts, "cython")

    with np.errstate(over="ignore", invalid="ignore"):
        return _iterate(system, Xty, G, yty, hp_used, beta, p, q, u, v, shifts)


def _iterate(system, Xty, G, yty, hp_used, beta, p, q, u, v, shifts):
    obj, rp, rq, rs = [], [], [], []
    converged = False
    for it in range(1, hp_used.max_iter + 1):
        prev = beta
        beta = beta_update(system, Xty, p, q, u, v, hp_used.mu1, hp_used.mu2)
        p = p_update(beta, u, hp_used.mu1, hp_used.lambda1)
        q = q_update(beta, v, hp_used.mu2, hp_used.lambda2)
        u, v = dual_update(beta, p, q, u, v, hp_used.step1, hp_used.step2)
        val = _objective_gram(beta, G, Xty, yty, hp_used.lambda1, hp_used.lambda2)
        res_p = float(np.linalg.norm(beta - p))
        res_q = float(np.linalg.norm(diff_apply(beta) - q))
        step = float(np.linalg.norm(beta - prev))
        obj.append(val)
        rp.append(res_p)
        rq.append(res_q)
        rs.append(step)
        if not np.isfinite(val):
            raise SolverDivergenceError(it)
        limit = hp_used.tol * max(1.0, float(np.linalg.norm(beta)))
        if res_p <= limit and res_q <= limit and step <= limit:
            converged = True
            break
    trace = Trace(np.array(obj), np.array(rp), np.array(rq), np.array(rs))
    return SolverState(beta, p, q, u, v, len(obj), converged, trace, hp_used,
                       shifts, "python")
