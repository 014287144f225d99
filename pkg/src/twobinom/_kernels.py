"""Hot numeric kernels shared by the inference modules.

Everything here is a pure function of ndarray inputs.  The two backends
(numba loops vs vectorized numpy) agree to floating-point roundoff; see
``benchmarks/bench_kernels.py`` for a timing comparison.
"""

from __future__ import annotations

import numpy as np
from scipy.special import gammaln

from ._backend import NUMBA_ENABLED, njit, prange


def binom_logcoef(n: int) -> np.ndarray:
    """log C(n, k) for k = 0..n."""
    k = np.arange(n + 1)
    return gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)


def binom_pmf_matrix(n: int, thetas: np.ndarray) -> np.ndarray:
    """Binomial pmf rows for every theta: shape (len(thetas), n+1).

    Computed in log space; theta = 0 and 1 rows are exact one-hots.
    """
    th = np.atleast_1d(np.asarray(thetas, dtype=float))
    k = np.arange(n + 1, dtype=float)
    logc = binom_logcoef(n)
    with np.errstate(divide="ignore", invalid="ignore"):
        lp = (
            logc[None, :]
            + k[None, :] * np.log(th)[:, None]
            + (n - k)[None, :] * np.log1p(-th)[:, None]
        )
        out = np.exp(lp)
    edge0 = th == 0.0
    edge1 = th == 1.0
    if edge0.any():
        out[edge0] = 0.0
        out[edge0, 0] = 1.0
    if edge1.any():
        out[edge1] = 0.0
        out[edge1, n] = 1.0
    return out


def _region_prob_numpy(P1, P2, member):
    # sum_{(i,j) in member} P1[g,i] * P2[g,j] for every grid row g
    return np.einsum("gi,ij,gj->g", P1, member, P2, optimize=True)


def _rank_tail_numpy(P1, P2, order_i, order_j, block_ends):
    # lower-tail mass P[rank(X) <= r, X informative] at every dense rank r
    W = P1[:, order_i] * P2[:, order_j]
    return np.cumsum(W, axis=1)[:, block_ends]


if NUMBA_ENABLED:

    @njit(cache=True, parallel=True)
    def _region_prob_numba(P1, P2, member):  # pragma: no cover - jitted
        G = P1.shape[0]
        m = P1.shape[1]
        n = P2.shape[1]
        out = np.empty(G)
        for g in prange(G):
            acc = 0.0
            for i in range(m):
                p1 = P1[g, i]
                if p1 == 0.0:
                    continue
                row = 0.0
                for j in range(n):
                    if member[i, j] != 0.0:
                        row += P2[g, j]
                acc += p1 * row
            out[g] = acc
        return out

    @njit(cache=True, parallel=True)
    def _rank_tail_numba(P1, P2, order_i, order_j, block_ends):  # pragma: no cover
        G = P1.shape[0]
        K = order_i.shape[0]
        R = block_ends.shape[0]
        out = np.empty((G, R))
        for g in prange(G):
            acc = 0.0
            r = 0
            for k in range(K):
                acc += P1[g, order_i[k]] * P2[g, order_j[k]]
                while r < R and block_ends[r] == k:
                    out[g, r] = acc
                    r += 1
        return out


def region_prob(P1: np.ndarray, P2: np.ndarray, member: np.ndarray) -> np.ndarray:
    """P[X in member set] for each theta row of the pmf matrices.

    ``member`` is an (n1+1, n2+1) float array of 0.0/1.0 indicators.
    """
    P1 = np.ascontiguousarray(P1, dtype=float)
    P2 = np.ascontiguousarray(P2, dtype=float)
    member = np.ascontiguousarray(member, dtype=float)
    if NUMBA_ENABLED:
        return _region_prob_numba(P1, P2, member)
    return _region_prob_numpy(P1, P2, member)


def rank_tail_table(
    P1: np.ndarray,
    P2: np.ndarray,
    order_i: np.ndarray,
    order_j: np.ndarray,
    block_ends: np.ndarray,
) -> np.ndarray:
    """Cumulative lower-tail mass at the last index of every tie block.

    ``order_i``/``order_j`` list the informative sample points sorted by
    the ordering statistic; ``block_ends[r]`` is the position (into that
    sorted list) of the last point with dense rank r.  Returns a
    (G, n_ranks) table whose ``[g, r]`` entry is
    P_theta_g[rank(X) <= r, X informative].
    """
    P1 = np.ascontiguousarray(P1, dtype=float)
    P2 = np.ascontiguousarray(P2, dtype=float)
    order_i = np.ascontiguousarray(order_i, dtype=np.int64)
    order_j = np.ascontiguousarray(order_j, dtype=np.int64)
    block_ends = np.ascontiguousarray(block_ends, dtype=np.int64)
    if NUMBA_ENABLED:
        return _rank_tail_numba(P1, P2, order_i, order_j, block_ends)
    return _rank_tail_numpy(P1, P2, order_i, order_j, block_ends)


def power_matrix(P1: np.ndarray, reject: np.ndarray, P2: np.ndarray) -> np.ndarray:
    """Rejection probability on a (theta1, theta2) product grid.

    ``reject`` is the (n1+1, n2+1) 0/1 rejection indicator; rows of the
    result follow P1's thetas and columns follow P2's.
    """
    return (P1 @ np.asarray(reject, dtype=float)) @ P2.T
