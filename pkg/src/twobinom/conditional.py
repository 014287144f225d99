"""Conditional exact inference given the total number of successes.

Conditioning on s = x1 + x2 reduces the model to the noncentral
hypergeometric distribution of X2 indexed by the odds ratio, so tests at
a general null value are available only for that measure; at the
equality null the one-sided hypotheses coincide across measures.

Tail convention: alternative "greater" (evidence that theta2 is the
larger rate) uses the upper tail of X2 given s, "less" the lower tail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    Alternative,
    ConfidenceInterval,
    DomainError,
    Hypothesis,
    Measure,
    TwoByTwoData,
    UnsupportedCombinationError,
)
from .distributions import NoncentralHypergeomParams, nchg_pmf_vector

_PMF_RTOL = 1e-7


@dataclass(frozen=True)
class BlakerStatistics:
    """Per-support-point minimum tail gamma and its attained tail sums."""

    support: np.ndarray
    gamma_values: np.ndarray
    tb_values: np.ndarray


def _cond_setup(data: TwoByTwoData, psi: float):
    params = NoncentralHypergeomParams(data.s, data.n1, data.n2, psi)
    lo, _hi = params.support
    w = nchg_pmf_vector(params)
    return w, lo


def _resolve_psi(data: TwoByTwoData, hyp: Hypothesis) -> float:
    if hyp.measure is Measure.ODDS_RATIO:
        return hyp.beta0
    if hyp.at_equality:
        return 1.0
    raise UnsupportedCombinationError(
        f"conditional tests support measure={hyp.measure.value} only at the "
        "equality null; use the melded or unconditional methods for "
        f"beta0={hyp.beta0}"
    )


def fisher_onesided(data: TwoByTwoData, hyp: Hypothesis, mode: str = "full") -> float:
    """One-sided conditional exact (Fisher) p-value, full or mid mode."""
    if not hyp.alternative.one_sided:
        raise DomainError("fisher_onesided needs alternative 'less' or 'greater'")
    if mode not in ("full", "mid"):
        raise DomainError(f"mode must be 'full' or 'mid', got {mode!r}")
    psi = _resolve_psi(data, hyp)
    w, lo = _cond_setup(data, psi)
    i = data.x2 - lo
    point = float(w[i])
    if hyp.alternative is Alternative.GREATER:
        strict = float(w[i + 1 :].sum())
    else:
        strict = float(w[:i].sum())
    if mode == "mid":
        return strict + 0.5 * point
    return strict + point


def fisher_central(data: TwoByTwoData, beta0: float = 1.0, mode: str = "full") -> float:
    """Central conditional p-value: min(1, 2 lower tail, 2 upper tail)."""
    p_lo = fisher_onesided(
        data, Hypothesis(Measure.ODDS_RATIO, beta0, Alternative.LESS), mode
    )
    p_hi = fisher_onesided(
        data, Hypothesis(Measure.ODDS_RATIO, beta0, Alternative.GREATER), mode
    )
    return min(1.0, 2.0 * p_lo, 2.0 * p_hi)


def fisher_irwin(data: TwoByTwoData, beta0: float = 1.0, mode: str = "full") -> float:
    """Two-sided conditional test that sums all support points whose pmf
    does not exceed the observed one (within relative tolerance)."""
    if mode not in ("full", "mid"):
        raise DomainError(f"mode must be 'full' or 'mid', got {mode!r}")
    w, lo = _cond_setup(data, beta0)
    f_obs = float(w[data.x2 - lo])
    member = w <= f_obs * (1.0 + _PMF_RTOL)
    p = float(w[member].sum())
    if mode == "mid":
        tie = member & (w >= f_obs * (1.0 - _PMF_RTOL))
        p -= 0.5 * float(w[tie].sum())
    return min(1.0, p)


def blaker_statistics(data: TwoByTwoData, beta0: float = 1.0) -> BlakerStatistics:
    """gamma (the smaller of the two conditional tails) and the attained
    tail-sum ordering statistic at every support point."""
    w, lo = _cond_setup(data, beta0)
    lower = np.cumsum(w)
    upper = np.cumsum(w[::-1])[::-1]
    gamma = np.minimum(lower, upper)
    tb = np.array([
        float(w[gamma <= g * (1.0 + _PMF_RTOL)].sum()) for g in gamma
    ])
    support = np.arange(lo, lo + len(w))
    return BlakerStatistics(support=support, gamma_values=gamma, tb_values=tb)


def blaker(data: TwoByTwoData, beta0: float = 1.0, mode: str = "full") -> float:
    """Blaker's acceptability p-value: the probability of all support
    points whose min-tail is at most the observed min-tail."""
    if mode not in ("full", "mid"):
        raise DomainError(f"mode must be 'full' or 'mid', got {mode!r}")
    w, lo = _cond_setup(data, beta0)
    lower = np.cumsum(w)
    upper = np.cumsum(w[::-1])[::-1]
    gamma = np.minimum(lower, upper)
    g_obs = float(gamma[data.x2 - lo])
    member = gamma <= g_obs * (1.0 + _PMF_RTOL)
    p = float(w[member].sum())
    if mode == "mid":
        tie = member & (gamma >= g_obs * (1.0 - _PMF_RTOL))
        p -= 0.5 * float(w[tie].sum())
    return min(1.0, p)


def _tail_at_psi(data: TwoByTwoData, psi: float, side: str, mode: str) -> float:
    w, lo = _cond_setup(data, psi)
    i = data.x2 - lo
    point = float(w[i])
    strict = float(w[i + 1 :].sum()) if side == "upper" else float(w[:i].sum())
    return strict + (0.5 * point if mode == "mid" else point)


def conditional_ci_oddsratio(
    data: TwoByTwoData, level: float = 0.95, mode: str = "full"
) -> ConfidenceInterval:
    """Central conditional interval for the odds ratio by inverting the
    two one-sided tails (each at (1-level)/2).

    Tails are monotone in psi, so each limit is a bracketed bisection on
    log psi; degenerate tables give 0 or infinite endpoints.
    """
    if not 0.0 < level < 1.0:
        raise DomainError(f"level must be in (0, 1), got {level}")
    if mode not in ("full", "mid"):
        raise DomainError(f"mode must be 'full' or 'mid', got {mode!r}")
    target = (1.0 - level) / 2.0
    params = NoncentralHypergeomParams(data.s, data.n1, data.n2, 1.0)
    lo_s, hi_s = params.support

    if data.x2 == lo_s:
        lower = 0.0
    else:
        # upper tail is increasing in psi; find psi with upper = target
        lower = _invert_tail(data, "upper", target, mode, increasing=True)
    if data.x2 == hi_s:
        upper = math.inf
    else:
        upper = _invert_tail(data, "lower", target, mode, increasing=False)
    return ConfidenceInterval(lower=lower, upper=upper, level=level, central=True)


def _invert_tail(data, side, target, mode, increasing, rtol=1e-8):
    def f(logpsi):
        return _tail_at_psi(data, math.exp(logpsi), side, mode)

    # geometric bracket growth from the continuity-corrected sample OR
    num = (data.x2 + 0.5) * (data.n1 - data.x1 + 0.5)
    den = (data.x1 + 0.5) * (data.n2 - data.x2 + 0.5)
    center = math.log(num / den)
    lo, hi = center - 1.0, center + 1.0
    # after bracketing, `a` holds f on the same side of target as f(lo)
    low_cmp = (lambda v: v < target) if increasing else (lambda v: v > target)
    for _ in range(200):
        if low_cmp(f(lo)):
            break
        lo -= 1.0
    for _ in range(200):
        if not low_cmp(f(hi)):
            break
        hi += 1.0
    a, b = lo, hi
    for _ in range(100):
        m = 0.5 * (a + b)
        if low_cmp(f(m)):
            a = m
        else:
            b = m
        if abs(b - a) < rtol:
            break
    return math.exp(0.5 * (a + b))


def santner_diff_bound(u_or: float) -> float:
    """Upper bound on the rate difference implied by an odds-ratio upper
    limit: (sqrt(U) - 1)/(sqrt(U) + 1) when U > 1, else 0."""
    if u_or < 0:
        raise DomainError(f"odds-ratio limit must be >= 0, got {u_or}")
    if u_or <= 1.0:
        return 0.0
    if math.isinf(u_or):
        return 1.0
    r = math.sqrt(u_or)
    return (r - 1.0) / (r + 1.0)
