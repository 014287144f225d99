"""Matched triples: estimates, confidence regions, and their diagnostics.

A p-value function inverts into a confidence region; the matching
interval is the smallest interval covering it.  Compatibility, coherence,
and nestedness checks verify the inferential agreements that make a
triple behave the way a textbook reader expects, and report every
violation they find.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from .core import ConfidenceInterval, DomainError, TwoByTwoData


@dataclass(frozen=True)
class ConfidenceRegion:
    """A union of disjoint open intervals {beta0 : p(x, beta0) > alpha}."""

    intervals: tuple[tuple[float, float], ...]
    level: float
    grid_resolution: float

    def contains(self, beta: float) -> bool:
        return any(lo <= beta <= hi for lo, hi in self.intervals)

    @property
    def empty(self) -> bool:
        return not self.intervals


class Decision(str, Enum):
    FAIL_TO_REJECT = "fail_to_reject"
    CONCLUDE_GREATER = "conclude_greater"
    CONCLUDE_LESS = "conclude_less"


@dataclass(frozen=True)
class DecisionOutcome:
    decision: Decision
    alpha: float


@dataclass(frozen=True)
class InferenceResult:
    """A full matched-triple report for one table."""

    estimate: float
    ci: ConfidenceInterval
    p_less: float
    p_greater: float
    p_two_sided: float
    method: str
    region: ConfidenceRegion | None = None
    estimate_clamped: bool = False


PValueFn = Callable[[TwoByTwoData, float], float]


def confidence_region(
    pfun: PValueFn,
    data: TwoByTwoData,
    level: float,
    beta_grid: np.ndarray,
    xtol: float = 1e-6,
) -> ConfidenceRegion:
    """Invert a p-value function over a grid into a confidence region.

    Each sign change of p - alpha between neighboring grid points is
    sharpened by bisection; runs of p > alpha become open intervals.
    Structure narrower than the grid spacing cannot be detected.
    """
    if not 0.0 < level < 1.0:
        raise DomainError(f"level must be in (0, 1), got {level}")
    alpha = 1.0 - level
    grid = np.asarray(beta_grid, dtype=float)
    if grid.ndim != 1 or len(grid) < 2:
        raise DomainError("beta_grid must be a 1-D grid with at least 2 points")
    vals = np.array([pfun(data, float(b)) for b in grid])
    above = vals > alpha

    def _cross(lo, hi, p_lo_above):
        # bisect between grid neighbors for the boundary of {p > alpha}
        a, b = lo, hi
        for _ in range(200):
            if b - a <= xtol * max(1.0, abs(a), abs(b)):
                break
            m = 0.5 * (a + b)
            if (pfun(data, m) > alpha) == p_lo_above:
                a = m
            else:
                b = m
        return 0.5 * (a + b)

    intervals = []
    i = 0
    k = len(grid)
    while i < k:
        if not above[i]:
            i += 1
            continue
        j = i
        while j + 1 < k and above[j + 1]:
            j += 1
        lo = grid[i] if i == 0 else _cross(grid[i - 1], grid[i], False)
        hi = grid[j] if j == k - 1 else _cross(grid[j], grid[j + 1], True)
        intervals.append((float(lo), float(hi)))
        i = j + 1
    resolution = float(np.max(np.diff(grid)))
    return ConfidenceRegion(tuple(intervals), level, resolution)


def matching_ci(region: ConfidenceRegion) -> ConfidenceInterval:
    """Smallest interval containing the region; holes are filled in."""
    if region.empty:
        raise DomainError("cannot build a matching interval for an empty region")
    lo = min(a for a, _ in region.intervals)
    hi = max(b for _, b in region.intervals)
    return ConfidenceInterval(
        lower=lo, upper=hi, level=region.level,
        central=False, holes_filled=len(region.intervals) > 1,
    )


@dataclass(frozen=True)
class CompatibilityViolation:
    alpha: float
    beta0: float
    p_value: float
    in_interval: bool


@dataclass(frozen=True)
class CompatibilityReport:
    compatible: bool
    violations: tuple[CompatibilityViolation, ...]
    checked: int


def check_compatibility(
    method,
    data: TwoByTwoData,
    levels: Sequence[float],
    beta_grid: np.ndarray,
    endpoint_slack: float = 1e-6,
) -> CompatibilityReport:
    """Verify p <= alpha exactly when beta0 sits outside the 1-alpha CI.

    ``method`` exposes ``pvalue(data, beta0)`` and ``ci(data, level)``.
    Grid points within ``endpoint_slack`` (relative) of an interval
    endpoint are skipped; everything else must agree, with the boundary
    convention that p = alpha rejects.
    """
    grid = np.asarray(beta_grid, dtype=float)
    pvals = np.array([method.pvalue(data, float(b)) for b in grid])
    violations = []
    checked = 0
    for level in levels:
        alpha = 1.0 - level
        ci = method.ci(data, level)
        for b, p in zip(grid, pvals):
            near_edge = any(
                abs(b - e) <= endpoint_slack * max(1.0, abs(e))
                for e in (ci.lower, ci.upper)
                if math.isfinite(e)
            )
            if near_edge:
                continue
            checked += 1
            rejects = p <= alpha
            inside = ci.contains(float(b))
            if rejects == inside:
                violations.append(
                    CompatibilityViolation(alpha, float(b), float(p), inside)
                )
    return CompatibilityReport(not violations, tuple(violations), checked)


@dataclass(frozen=True)
class NestednessReport:
    nested: bool
    violations: tuple[tuple[float, float], ...]  # (level_small, level_large)


def check_nestedness(method, data: TwoByTwoData, level_grid: Sequence[float]) -> NestednessReport:
    """Higher-confidence intervals must contain lower-confidence ones."""
    levels = sorted(level_grid)
    cis = [method.ci(data, lv) for lv in levels]
    bad = []
    tol = 1e-9
    for (l1, c1), (l2, c2) in zip(zip(levels, cis), zip(levels[1:], cis[1:])):
        if c2.lower > c1.lower + tol or c2.upper < c1.upper - tol:
            bad.append((l1, l2))
    return NestednessReport(not bad, tuple(bad))


@dataclass(frozen=True)
class CoherenceViolation:
    beta0_from: float
    beta0_to: float
    p_from: float
    p_to: float


@dataclass(frozen=True)
class CoherenceReport:
    coherent: bool
    violations: tuple[CoherenceViolation, ...]


def check_coherence(
    pfun: PValueFn,
    data: TwoByTwoData,
    beta0_grid: np.ndarray,
    alternative: str,
    beta_hat: float | None = None,
    tol: float = 1e-9,
) -> CoherenceReport:
    """One-sided: p must be monotone as the null space expands.

    alternative "less" (H0: beta >= beta0) requires p nonincreasing in
    beta0; "greater" nondecreasing.  Two-sided ("two_sided") requires
    directional coherence: p nonincreasing moving away from beta_hat.
    """
    grid = np.asarray(beta0_grid, dtype=float)
    vals = np.array([pfun(data, float(b)) for b in grid])
    bad = []

    def scan(idx, must_not_increase):
        for a, b in zip(idx[:-1], idx[1:]):
            rising = vals[b] > vals[a] + tol
            if rising == must_not_increase:
                bad.append(
                    CoherenceViolation(float(grid[a]), float(grid[b]),
                                       float(vals[a]), float(vals[b]))
                )

    idx = np.arange(len(grid))
    if alternative == "less":
        scan(idx, True)
    elif alternative == "greater":
        scan(idx[::-1], True)
    elif alternative == "two_sided":
        if beta_hat is None:
            beta_hat = float(grid[int(np.argmax(vals))])
        right = idx[grid >= beta_hat]
        left = idx[grid <= beta_hat][::-1]
        scan(right, True)
        scan(left, True)
    else:
        raise DomainError(f"unknown alternative {alternative!r}")
    return CoherenceReport(not bad, tuple(bad))


def three_decision(result: InferenceResult, alpha: float) -> DecisionOutcome:
    """Directional conclusion from a central triple at level alpha: each
    one-sided error is bounded by alpha/2."""
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must be in (0, 1), got {alpha}")
    if result.p_greater <= alpha / 2.0:
        return DecisionOutcome(Decision.CONCLUDE_GREATER, alpha)
    if result.p_less <= alpha / 2.0:
        return DecisionOutcome(Decision.CONCLUDE_LESS, alpha)
    return DecisionOutcome(Decision.FAIL_TO_REJECT, alpha)


def clamp_estimate(estimate: float, ci: ConfidenceInterval) -> tuple[float, bool]:
    """Keep the reported estimate inside its interval; undefined sample
    values (0/0 measures) collapse to the interval midpoint."""
    if math.isnan(estimate):
        lo = ci.lower
        hi = ci.upper
        if math.isinf(hi):
            return (lo + 1.0 if math.isinf(lo) else max(lo, 1.0)), True
        return 0.5 * (lo + hi), True
    if estimate < ci.lower:
        return ci.lower, True
    if estimate > ci.upper:
        return ci.upper, True
    return estimate, False
