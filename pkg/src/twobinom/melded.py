"""Melded confidence intervals and matching one-sided p-values.

Each group's exact one-sample interval is re-expressed through a pair of
beta confidence-distribution random variables (lower CD stochastically
smaller than upper CD, with point masses at the data extremes).  Interval
limits are quantiles of the measure applied to a conservative pairing of
the two groups' CD variables; the matching one-sided p-values coincide
with one-sided conditional exact p-values at equality nulls.

All probabilities are deterministic numerical integrals: the first
variable's density is integrated against the second variable's cdf by
composite Gauss-Legendre panels whose edges sit at the integrand's kink
points and at the density's quantiles, so each panel sees a smooth
(piecewise-polynomial or analytic) integrand.  Monte Carlo is used only
as a test oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import betainc, betaincinv, betaln, xlogy

from .core import (
    Alternative,
    ConfidenceInterval,
    DomainError,
    Hypothesis,
    Measure,
    TwoByTwoData,
)
from .distributions import BetaParams

_ORDER = 32
_EDGE_QUANTILES = (0.001, 0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99, 0.999)


@lru_cache(maxsize=1)
def _gl_rule() -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(_ORDER)


@lru_cache(maxsize=4096)
def _density_edges(a: float, b: float) -> tuple[float, ...]:
    return tuple(float(betaincinv(a, b, q)) for q in _EDGE_QUANTILES)


def _beta_pdf(a: float, b: float, x: np.ndarray) -> np.ndarray:
    return np.exp(xlogy(a - 1.0, x) + xlogy(b - 1.0, 1.0 - x) - betaln(a, b))


@dataclass(frozen=True)
class MeldingDistributions:
    """Lower/upper confidence-distribution variables for both groups."""

    lower1: BetaParams
    upper1: BetaParams
    lower2: BetaParams
    upper2: BetaParams

    @classmethod
    def from_data(cls, data: TwoByTwoData) -> "MeldingDistributions":
        return cls(
            lower1=BetaParams(data.x1, data.n1 - data.x1 + 1),
            upper1=BetaParams(data.x1 + 1, data.n1 - data.x1),
            lower2=BetaParams(data.x2, data.n2 - data.x2 + 1),
            upper2=BetaParams(data.x2 + 1, data.n2 - data.x2),
        )


def _cdf2(cd: BetaParams, x: np.ndarray) -> np.ndarray:
    return betainc(cd.a, cd.b, np.clip(x, 0.0, 1.0))


def _threshold_in_theta2(measure: Measure, w1, c):
    """Largest theta2 with b(w1, theta2) <= c, vectorized over w1."""
    w1 = np.asarray(w1, dtype=float)
    if measure is Measure.DIFFERENCE:
        return np.clip(w1 + c, 0.0, 1.0)
    if measure is Measure.RATIO:
        return np.clip(c * w1, 0.0, 1.0)
    # odds(theta2) <= c * odds(w1)
    t = c * w1
    return np.clip(t / ((1.0 - w1) + t), 0.0, 1.0)


def _tail(measure: Measure, cd1: BetaParams, cd2: BetaParams, c: float, side: str) -> float:
    """P[b(W1, W2) <= c] (side "le") or >= (side "ge").

    Point-mass branches are analytic; undefined measure values at double
    point masses (0/0 style) count toward both tails, which keeps the
    p-value semantics conservative.
    """
    if side not in ("le", "ge"):
        raise DomainError(f"side must be 'le' or 'ge', got {side!r}")
    pm1 = cd1.point_mass
    pm2 = cd2.point_mass
    if pm1 is not None and pm2 is not None:
        val = measure.evaluate(pm1, pm2)
        if math.isnan(val):
            return 1.0
        ok = val <= c if side == "le" else val >= c
        return 1.0 if ok else 0.0
    if pm1 is not None:
        return _tail_fixed1(measure, pm1, cd2, c, side)
    if pm2 is not None:
        return _tail_fixed2(measure, cd1, pm2, c, side)
    if math.isinf(c):
        le = 1.0 if c > 0 else 0.0
    else:
        le = _tail_le_continuous(measure, cd1, cd2, c)
    return le if side == "le" else 1.0 - le


def _tail_le_continuous(measure: Measure, cd1: BetaParams, cd2: BetaParams, c: float) -> float:
    # panel edges: the threshold's clip kinks plus W1's density quantiles
    knots = {0.0, 1.0}
    if measure is Measure.DIFFERENCE:
        for k in (-c, 1.0 - c):
            if 0.0 < k < 1.0:
                knots.add(float(k))
    elif measure is Measure.RATIO:
        if c > 0.0 and 1.0 / c < 1.0:
            knots.add(1.0 / c)
    for e in _density_edges(cd1.a, cd1.b):
        if 0.0 < e < 1.0:
            knots.add(e)
    edges = np.array(sorted(knots))
    x, w = _gl_rule()
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    integrand = _cdf2(cd2, _threshold_in_theta2(measure, nodes, c)) * _beta_pdf(
        cd1.a, cd1.b, nodes
    )
    return float(min(1.0, max(0.0, weights @ integrand)))


def _tail_fixed1(measure, v1, cd2, c, side):
    # W1 is a point mass; b(v1, W2) is continuous and increasing in W2
    # unless b is almost-surely constant
    if measure is Measure.RATIO and v1 == 0.0:
        return _const_tail(math.inf, c, side)
    if measure is Measure.ODDS_RATIO and v1 == 0.0:
        return _const_tail(math.inf, c, side)
    if measure is Measure.ODDS_RATIO and v1 == 1.0:
        return _const_tail(0.0, c, side)
    if math.isinf(c):
        le = 1.0 if c > 0 else 0.0
    else:
        thr = float(_threshold_in_theta2(measure, v1, c))
        le = float(betainc(cd2.a, cd2.b, thr))
    return le if side == "le" else 1.0 - le


def _tail_fixed2(measure, cd1, v2, c, side):
    # W2 is a point mass; b(W1, v2) is continuous and decreasing in W1
    if measure is Measure.RATIO and v2 == 0.0:
        return _const_tail(0.0, c, side)
    if measure is Measure.ODDS_RATIO and v2 == 0.0:
        return _const_tail(0.0, c, side)
    if measure is Measure.ODDS_RATIO and v2 == 1.0:
        return _const_tail(math.inf, c, side)
    if math.isinf(c):
        le = 1.0 if c > 0 else 0.0
    elif measure is Measure.DIFFERENCE:
        le = 1.0 - float(betainc(cd1.a, cd1.b, np.clip(v2 - c, 0.0, 1.0)))
    elif measure is Measure.RATIO:
        if c <= 0.0:
            le = 0.0  # v2 > 0 here, so the ratio is positive a.s.
        else:
            le = 1.0 - float(betainc(cd1.a, cd1.b, np.clip(v2 / c, 0.0, 1.0)))
    else:
        if c <= 0.0:
            le = 0.0
        else:
            t = (v2 / (1.0 - v2)) / c
            le = 1.0 - float(betainc(cd1.a, cd1.b, t / (1.0 + t)))
    return le if side == "le" else 1.0 - le


def _const_tail(value, c, side):
    ok = value <= c if side == "le" else value >= c
    return 1.0 if ok else 0.0


def meld_pvalue(data: TwoByTwoData, hyp: Hypothesis) -> float:
    """One-sided melded p-value matching the melded interval.

    alternative "greater" tests H0: beta <= beta0 through the lower
    melding (upper CD for group 1 with lower CD for group 2);
    alternative "less" mirrors it.
    """
    if not hyp.alternative.one_sided:
        raise DomainError("melded p-values are one-sided; combine centrally")
    md = MeldingDistributions.from_data(data)
    if hyp.alternative is Alternative.GREATER:
        return _tail(hyp.measure, md.upper1, md.lower2, hyp.beta0, "le")
    return _tail(hyp.measure, md.lower1, md.upper2, hyp.beta0, "ge")


def meld_pvalue_central(data: TwoByTwoData, measure: Measure, beta0: float) -> float:
    p_ge = meld_pvalue(data, Hypothesis(measure, beta0, Alternative.GREATER))
    p_le = meld_pvalue(data, Hypothesis(measure, beta0, Alternative.LESS))
    return min(1.0, 2.0 * p_ge, 2.0 * p_le)


def _meld_quantile(measure: Measure, cd1: BetaParams, cd2: BetaParams, q: float) -> float:
    """Smallest c with P[b(W1, W2) <= c] >= q, found by bisection."""
    if cd1.point_mass is not None and cd2.point_mass is not None:
        val = measure.evaluate(cd1.point_mass, cd2.point_mass)
        return val

    def G(c):
        return _tail(measure, cd1, cd2, c, "le")

    if measure is Measure.DIFFERENCE:
        lo, hi = -1.0, 1.0
        for _ in range(80):
            m = 0.5 * (lo + hi)
            if G(m) >= q:
                hi = m
            else:
                lo = m
        return hi
    # ratio / odds ratio on [0, inf)
    if G(0.0) >= q:
        return 0.0
    hi = 1.0
    for _ in range(60):
        if G(hi) >= q:
            break
        hi *= 4.0
        if hi > 1e12:
            return math.inf
    lo = 1e-15
    llo, lhi = math.log(lo), math.log(hi)
    for _ in range(100):
        m = 0.5 * (llo + lhi)
        if G(math.exp(m)) >= q:
            lhi = m
        else:
            llo = m
        if lhi - llo < 1e-10:
            break
    return math.exp(lhi)


def meld_ci(data: TwoByTwoData, measure: Measure, level: float) -> ConfidenceInterval:
    """Central melded interval for the measure at the given level."""
    if not 0.0 < level < 1.0:
        raise DomainError(f"level must be in (0, 1), got {level}")
    alpha2 = 0.5 * (1.0 - level)
    md = MeldingDistributions.from_data(data)
    lower = _meld_quantile(measure, md.upper1, md.lower2, alpha2)
    upper = _meld_quantile(measure, md.lower1, md.upper2, 1.0 - alpha2)
    if math.isnan(lower):
        lower = measure.bounds[0]
    if math.isnan(upper):
        upper = measure.bounds[1]
    lower = max(lower, measure.bounds[0])
    upper = min(upper, measure.bounds[1]) if math.isfinite(upper) else upper
    if lower > upper:
        lower = upper = 0.5 * (lower + upper)
    return ConfidenceInterval(lower=lower, upper=upper, level=level, central=True)
