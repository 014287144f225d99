"""Exact probability kernels: binomial, noncentral hypergeometric, beta.

All pmfs are computed through log-gamma and renormalized over their
support, so they stay stable for odds ratios far from 1 and for large
counts.  Degenerate beta shapes follow the point-mass convention:
Beta(0, b) is a point mass at 0 and Beta(a, 0) a point mass at 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import betainc, betaincinv, gammaln

from ._kernels import binom_logcoef
from .core import DomainError


@dataclass(frozen=True)
class BinomialParams:
    n: int
    theta: float

    def __post_init__(self):
        if self.n < 0:
            raise DomainError(f"n must be >= 0, got {self.n}")
        if not 0.0 <= self.theta <= 1.0:
            raise DomainError(f"theta must be in [0, 1], got {self.theta}")


@dataclass(frozen=True)
class NoncentralHypergeomParams:
    """Conditional distribution of X2 given X1 + X2 = s, indexed by the
    odds ratio psi.  psi = 1 is the central hypergeometric."""

    s: int
    n1: int
    n2: int
    psi: float

    def __post_init__(self):
        if self.n1 < 0 or self.n2 < 0:
            raise DomainError("n1 and n2 must be >= 0")
        if not 0 <= self.s <= self.n1 + self.n2:
            raise DomainError(
                f"s must be in [0, {self.n1 + self.n2}], got {self.s}"
            )
        if not (self.psi >= 0.0):
            raise DomainError(f"psi must be >= 0, got {self.psi}")

    @property
    def support(self) -> tuple[int, int]:
        return max(0, self.s - self.n1), min(self.s, self.n2)


@dataclass(frozen=True)
class BetaParams:
    a: float
    b: float

    def __post_init__(self):
        if self.a < 0 or self.b < 0:
            raise DomainError("beta shapes must be >= 0")
        if self.a == 0 and self.b == 0:
            raise DomainError("Beta(0, 0) is undefined")

    @property
    def point_mass(self) -> float | None:
        """0.0 or 1.0 for the degenerate shapes, else None."""
        if self.a == 0:
            return 0.0
        if self.b == 0:
            return 1.0
        return None


def binom_pmf(k: int, params: BinomialParams) -> float:
    """P[X = k] for X ~ Binomial(n, theta), via log-gamma."""
    n, theta = params.n, params.theta
    if not 0 <= k <= n:
        raise DomainError(f"k must be in [0, {n}], got {k}")
    if theta == 0.0:
        return 1.0 if k == 0 else 0.0
    if theta == 1.0:
        return 1.0 if k == n else 0.0
    logc = gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)
    return float(math.exp(logc + k * math.log(theta) + (n - k) * math.log1p(-theta)))


def binom_pmf_vector(n: int, theta: float) -> np.ndarray:
    """pmf over k = 0..n as a vector."""
    if theta == 0.0:
        out = np.zeros(n + 1)
        out[0] = 1.0
        return out
    if theta == 1.0:
        out = np.zeros(n + 1)
        out[n] = 1.0
        return out
    k = np.arange(n + 1, dtype=float)
    lp = binom_logcoef(n) + k * math.log(theta) + (n - k) * math.log1p(-theta)
    return np.exp(lp)


def nchg_pmf_vector(params: NoncentralHypergeomParams) -> np.ndarray:
    """pmf of X2 over the support, normalized by mode-anchored summation."""
    lo, hi = params.support
    x2 = np.arange(lo, hi + 1)
    if hi == lo:
        return np.ones(1)
    if params.psi == 0.0:
        out = np.zeros(hi - lo + 1)
        out[0] = 1.0
        return out
    if math.isinf(params.psi):
        out = np.zeros(hi - lo + 1)
        out[-1] = 1.0
        return out
    lc1 = binom_logcoef(params.n1)
    lc2 = binom_logcoef(params.n2)
    lw = lc1[params.s - x2] + lc2[x2] + x2 * math.log(params.psi)
    lw -= lw.max()
    w = np.exp(lw)
    return w / w.sum()


def nchg_pmf(x2: int, params: NoncentralHypergeomParams) -> float:
    lo, hi = params.support
    if not lo <= x2 <= hi:
        raise DomainError(f"x2 must be in the support [{lo}, {hi}], got {x2}")
    return float(nchg_pmf_vector(params)[x2 - lo])


def nchg_tail(
    x2: int,
    params: NoncentralHypergeomParams,
    side: str = "upper",
    mode: str = "full",
) -> float:
    """Tail probability of X2 given the total.

    side="upper" gives P[X2 >= x2] (full) or P[X2 > x2] + pmf/2 (mid);
    side="lower" mirrors it.  Upper tails are nondecreasing in psi.
    """
    if side not in ("upper", "lower"):
        raise DomainError(f"side must be 'upper' or 'lower', got {side!r}")
    if mode not in ("full", "mid"):
        raise DomainError(f"mode must be 'full' or 'mid', got {mode!r}")
    lo, hi = params.support
    if not lo <= x2 <= hi:
        raise DomainError(f"x2 must be in the support [{lo}, {hi}], got {x2}")
    w = nchg_pmf_vector(params)
    i = x2 - lo
    point = w[i]
    if side == "upper":
        strict = float(w[i + 1 :].sum())
    else:
        strict = float(w[:i].sum())
    if mode == "mid":
        return strict + 0.5 * point
    return strict + point


def beta_cdf(x: float, params: BetaParams) -> float:
    """Regularized incomplete beta, honoring the point-mass shapes."""
    pm = params.point_mass
    if pm is not None:
        return 1.0 if x >= pm else 0.0
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    return float(betainc(params.a, params.b, x))


def beta_quantile(p: float, params: BetaParams) -> float:
    """Inverse of ``beta_cdf`` in probability; point masses return their atom."""
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p must be in [0, 1], got {p}")
    pm = params.point_mass
    if pm is not None:
        return pm
    if p == 0.0:
        return 0.0
    if p == 1.0:
        return 1.0
    return float(betaincinv(params.a, params.b, p))
