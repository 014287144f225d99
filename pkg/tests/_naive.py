"""Independent brute-force oracle for unconditional p-values.

Deliberately structure-free: a double loop over the sample space at every
boundary point, scipy pmfs, no sorting, no shared kernels.  Kept outside
the package so it stays an independent check.
"""

import numpy as np
from scipy.stats import binom


def boundary_theta2(measure, beta0, theta1):
    if measure == "difference":
        return theta1 + beta0
    if measure == "ratio":
        return beta0 * theta1
    return beta0 * theta1 / (1.0 + theta1 * (beta0 - 1.0))


def boundary_domain(measure, beta0):
    if measure == "difference":
        return max(0.0, -beta0), min(1.0, 1.0 - beta0)
    if measure == "ratio":
        return 0.0, min(1.0, 1.0 / beta0)
    return 0.0, 1.0


def naive_uncond_pvalue(x1, n1, x2, n2, rank, mask, measure, beta0, tail, n_grid):
    """sup over an n_grid boundary lattice of the tail probability of the
    integer-ranked ordering; O(N^2 * G) by construction."""
    if not mask[x1, x2]:
        return 1.0
    r_obs = rank[x1, x2]
    lo, hi = boundary_domain(measure, beta0)
    best = 0.0
    for t1 in np.linspace(lo, hi, n_grid):
        t2 = min(1.0, max(0.0, boundary_theta2(measure, beta0, t1)))
        pmf1 = binom.pmf(np.arange(n1 + 1), n1, t1)
        pmf2 = binom.pmf(np.arange(n2 + 1), n2, t2)
        total = 0.0
        for i in range(n1 + 1):
            for j in range(n2 + 1):
                if not mask[i, j]:
                    continue
                if tail == "le":
                    hit = rank[i, j] <= r_obs
                else:
                    hit = rank[i, j] >= r_obs
                if hit:
                    total += pmf1[i] * pmf2[j]
        best = max(best, total)
    return best


def naive_uncond_pvalue_table(n1, n2, rank, mask, measure, beta0, tail, n_grid):
    """All sample points at once, still by the plain double loop."""
    out = np.ones((n1 + 1, n2 + 1))
    for x1 in range(n1 + 1):
        for x2 in range(n2 + 1):
            out[x1, x2] = min(
                1.0,
                naive_uncond_pvalue(
                    x1, n1, x2, n2, rank, mask, measure, beta0, tail, n_grid
                ),
            )
    return out
