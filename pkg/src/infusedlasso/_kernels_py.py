"""Pure numpy implementations of the hot kernels.

These are the reference versions; ``_kernels`` (Cython) mirrors every
function here with the same signature and is preferred when it has been
compiled.
"""

import numpy as np


def feature_distribution(f):
    """Vertex-strength distribution of the cosine kernel graph of ``f``.

    Equivalent to building ``A = |f_a - f_b|``, the normalized dot-product
    kernel ``K`` of its rows, and returning ``K.sum(1) / K.sum()``, but
    without materializing ``K``.  The caller guarantees ``f`` is not
    constant.
    """
    f = np.asarray(f, dtype=np.float64)
    A = np.abs(f[:, None] - f[None, :])
    norms = np.sqrt(np.einsum("ij,ij->i", A, A))
    # rowsum_a(K) = <A_a, sum_b A_b / n_b> / n_a
    s = A @ (1.0 / norms)
    strength = (A @ s) / norms
    return strength / strength.sum()


def _entropy_rows(P):
    """Shannon entropy (nats) of every row of ``P``; 0 log 0 = 0."""
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(P > 0, P * np.log(P), 0.0)
    return -terms.sum(axis=-1)


def interaction_from_distributions(P, T, degenerate):
    """Joint-relevance matrix from feature and target distributions.

    Parameters
    ----------
    P, T : (N, M) arrays
        Row ``i`` holds the graph distribution of feature ``i`` and of its
        class-mean target, respectively.
    degenerate : (N,) bool array
        Features whose rows and columns are forced to zero.

    Only the upper triangle is evaluated; the lower one is mirrored so the
    result is exactly symmetric.
    """
    P = np.ascontiguousarray(P, dtype=np.float64)
    T = np.ascontiguousarray(T, dtype=np.float64)
    degenerate = np.asarray(degenerate, dtype=bool)
    n = P.shape[0]
    U = np.zeros((n, n))
    HP = _entropy_rows(P)
    HT = _entropy_rows(T)
    for i in range(n):
        if degenerate[i]:
            continue
        js = np.arange(i, n)
        js = js[~degenerate[js]]
        Pj = P[js]
        mix2 = 0.5 * (P[i] + Pj)
        d2 = _entropy_rows(mix2) - 0.5 * (HP[i] + HP[js])
        mix_i = (P[i] + Pj + T[i]) / 3.0
        di = _entropy_rows(mix_i) - (HP[i] + HP[js] + HT[i]) / 3.0
        mix_j = (P[i] + Pj + T[js]) / 3.0
        dj = _entropy_rows(mix_j) - (HP[i] + HP[js] + HT[js]) / 3.0
        # rounding can push a divergence of identical inputs just below 0
        d2, di, dj = (np.maximum(d, 0.0) for d in (d2, di, dj))
        vals = (np.exp(-di) + np.exp(-dj)) / np.exp(-d2)
        U[i, js] = vals
        U[js, i] = vals
    return U


def soft_threshold(w, lam):
    w = np.asarray(w, dtype=np.float64)
    return np.sign(w) * np.maximum(np.abs(w) - lam, 0.0)
