# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels.

Signatures match ``_kernels_py``; ``split_bregman_direct`` has no pure
Python twin here because ``solver`` runs the same iteration out of its
individual update functions.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, log, exp, fabs
from scipy.linalg.cython_blas cimport dtrsv, dsymv
from cython.parallel cimport prange

cnp.import_array()


def feature_distribution(const double[::1] f):
    cdef Py_ssize_t m = f.shape[0]
    cdef Py_ssize_t a, b
    cdef double acc, d, total
    cdef double[::1] inv_norm = np.empty(m)
    cdef double[::1] s = np.zeros(m)
    out = np.empty(m)
    cdef double[::1] strength = out

    for a in range(m):
        acc = 0.0
        for b in range(m):
            d = f[a] - f[b]
            acc += d * d
        inv_norm[a] = 1.0 / sqrt(acc)
    for a in range(m):
        acc = 0.0
        for b in range(m):
            acc += fabs(f[a] - f[b]) * inv_norm[b]
        s[a] = acc
    total = 0.0
    for a in range(m):
        acc = 0.0
        for b in range(m):
            acc += fabs(f[a] - f[b]) * s[b]
        strength[a] = acc * inv_norm[a]
        total += strength[a]
    for a in range(m):
        strength[a] /= total
    return out


cdef inline double _xlogx(double x) nogil:
    if x > 0.0:
        return x * log(x)
    return 0.0


cdef inline double _pair_relevance(const double[:, ::1] p, const double[:, ::1] t,
                                   const double[::1] hp, const double[::1] ht,
                                   Py_ssize_t i, Py_ssize_t j) nogil:
    cdef Py_ssize_t a, m = p.shape[1]
    cdef double h2 = 0.0, hi = 0.0, hj = 0.0, d2, di, dj, pi_a, pj_a
    for a in range(m):
        pi_a = p[i, a]
        pj_a = p[j, a]
        h2 -= _xlogx(0.5 * (pi_a + pj_a))
        hi -= _xlogx((pi_a + pj_a + t[i, a]) / 3.0)
        hj -= _xlogx((pi_a + pj_a + t[j, a]) / 3.0)
    # rounding can push a divergence of identical inputs just below 0
    d2 = h2 - 0.5 * (hp[i] + hp[j])
    di = hi - (hp[i] + hp[j] + ht[i]) / 3.0
    dj = hj - (hp[i] + hp[j] + ht[j]) / 3.0
    if d2 < 0.0:
        d2 = 0.0
    if di < 0.0:
        di = 0.0
    if dj < 0.0:
        dj = 0.0
    return (exp(-di) + exp(-dj)) / exp(-d2)


def interaction_from_distributions(P, T, degenerate):
    cdef const double[:, ::1] p = np.ascontiguousarray(P, dtype=np.float64)
    cdef const double[:, ::1] t = np.ascontiguousarray(T, dtype=np.float64)
    cdef const cnp.uint8_t[::1] deg = np.ascontiguousarray(degenerate, dtype=np.uint8)
    cdef Py_ssize_t n = p.shape[0]
    cdef Py_ssize_t m = p.shape[1]
    cdef Py_ssize_t i, j, a
    cdef double hi, hj, val
    cdef double[::1] hp = np.empty(n)
    cdef double[::1] ht = np.empty(n)
    out = np.zeros((n, n))
    cdef double[:, ::1] U = out

    for i in range(n):
        hi = 0.0
        hj = 0.0
        for a in range(m):
            hi -= _xlogx(p[i, a])
            hj -= _xlogx(t[i, a])
        hp[i] = hi
        ht[i] = hj

    # every entry is computed independently, so threading does not change bits
    with nogil:
        for i in prange(n, schedule="dynamic"):
            if deg[i]:
                continue
            for j in range(i, n):
                if deg[j]:
                    continue
                val = _pair_relevance(p, t, hp, ht, i, j)
                U[i, j] = val
                U[j, i] = val
    return out


def soft_threshold(w, double lam):
    cdef const double[::1] x = np.ascontiguousarray(w, dtype=np.float64)
    cdef Py_ssize_t k, n = x.shape[0]
    out = np.empty(n)
    cdef double[::1] r = out
    for k in range(n):
        r[k] = _shrink(x[k], lam)
    return out


cdef inline double _shrink(double x, double lam) nogil:
    if x > lam:
        return x - lam
    if x < -lam:
        return x + lam
    return 0.0


def split_bregman_direct(R, Xty, G, double yty, double lam1, double lam2,
                         double mu1, double mu2, double delta1, double delta2,
                         double[::1] beta, double[::1] p, double[::1] q,
                         double[::1] u, double[::1] v,
                         double tol, int max_iter,
                         double[::1] obj, double[::1] res_p,
                         double[::1] res_q, double[::1] res_step):
    """Run the split-Bregman loop against an upper Cholesky factor.

    ``R`` is the Fortran-ordered upper factor of ``D`` (``D = R^T R``) and
    ``G = X^T X - 2 lambda3 U`` is only used for the objective trace.
    ``beta, p, q, u, v`` are updated in place; trace arrays need at least
    ``max_iter`` slots.  Returns ``(iterations, converged)``.
    """
    cdef double[::1, :] r = np.asfortranarray(R, dtype=np.float64)
    cdef double[::1, :] g = np.asfortranarray(G, dtype=np.float64)
    cdef const double[::1] xty = np.ascontiguousarray(Xty, dtype=np.float64)
    cdef int n = beta.shape[0]
    cdef int nq = n - 1
    cdef int one = 1
    cdef double d_one = 1.0, d_zero = 0.0
    cdef char uplo = b'U', trans_t = b'T', trans_n = b'N', diag_n = b'N'
    cdef double[::1] rhs = np.empty(n)
    cdef double[::1] prev = np.empty(n)
    cdef double[::1] gb = np.empty(n)
    cdef double th1 = lam1 / mu1
    cdef double th2 = lam2 / mu2
    cdef int it = 0
    cdef Py_ssize_t i
    cdef double w, diff, rp, rq, rs, nb, l1, tv, quad, lin, scale
    cdef bint converged = False

    with nogil:
        for it in range(max_iter):
            for i in range(n):
                prev[i] = beta[i]
                rhs[i] = xty[i] + mu1 * p[i] - u[i]
            # rhs += C^T (mu2 q - v); (C^T z)_i = z_i - z_{i-1}
            for i in range(nq):
                w = mu2 * q[i] - v[i]
                rhs[i] += w
                rhs[i + 1] -= w
            dtrsv(&uplo, &trans_t, &diag_n, &n, &r[0, 0], &n, &rhs[0], &one)
            dtrsv(&uplo, &trans_n, &diag_n, &n, &r[0, 0], &n, &rhs[0], &one)
            for i in range(n):
                beta[i] = rhs[i]

            rp = 0.0
            rs = 0.0
            nb = 0.0
            l1 = 0.0
            lin = 0.0
            for i in range(n):
                p[i] = _shrink(beta[i] + u[i] / mu1, th1)
                diff = beta[i] - p[i]
                u[i] += delta1 * diff
                rp += diff * diff
                diff = beta[i] - prev[i]
                rs += diff * diff
                nb += beta[i] * beta[i]
                l1 += fabs(beta[i])
                lin += beta[i] * xty[i]
            rq = 0.0
            tv = 0.0
            for i in range(nq):
                w = beta[i] - beta[i + 1]
                tv += fabs(w)
                q[i] = _shrink(w + v[i] / mu2, th2)
                diff = w - q[i]
                v[i] += delta2 * diff
                rq += diff * diff

            dsymv(&uplo, &n, &d_one, &g[0, 0], &n, &beta[0], &one,
                  &d_zero, &gb[0], &one)
            quad = 0.0
            for i in range(n):
                quad += beta[i] * gb[i]
            obj[it] = 0.5 * yty - lin + 0.5 * quad + lam1 * l1 + lam2 * tv
            rp = sqrt(rp)
            rq = sqrt(rq)
            rs = sqrt(rs)
            res_p[it] = rp
            res_q[it] = rq
            res_step[it] = rs
            # inf - inf and nan - nan are both nan
            if obj[it] - obj[it] != 0.0:
                it += 1
                break
            scale = sqrt(nb)
            if scale < 1.0:
                scale = 1.0
            if rp <= tol * scale and rq <= tol * scale and rs <= tol * scale:
                converged = True
                it += 1
                break
        else:
            it = max_iter
    return it, converged
