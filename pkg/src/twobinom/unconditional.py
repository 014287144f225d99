"""Exact unconditional (Barnard-type) p-values and confidence limits.

A p-value is the supremum, over the null boundary, of the probability of
a tail event of an ordering statistic.  For convexity-certified orderings
the supremum over a one-sided null lies on the boundary between the
hypotheses, which reduces the search to one nuisance dimension; a runtime
guard falls back to a full two-dimensional search otherwise.

The boundary search contract: evaluate on a uniform grid in the nuisance
parameterization (``grid_points`` points), then golden-section refine
around the strongest local maxima.  The result is a certified lower bound
on the true supremum; the grid modulus diagnostic bounds what the grid
can miss.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import betaincinv

from ._kernels import binom_pmf_matrix, power_matrix, rank_tail_table, region_prob
from ._optim import golden_max, refine_max
from .core import (
    Alternative,
    ConfidenceInterval,
    DomainError,
    Hypothesis,
    Measure,
    TwoByTwoData,
)
from .distributions import binom_pmf_vector
from .orderings import SampleSpaceOrdering, constrained_mle, _ranks_from_floats, _finalize
from . import conditional as _conditional
from . import triples as _triples


@dataclass(frozen=True)
class UncondOptions:
    """Knobs for the supremum search and the optional adjustments."""

    berger_boos_gamma: float | None = None
    em_iterations: int = 0
    grid_points: int = 1001
    refine: bool = True
    force_full_region: bool = False

    def __post_init__(self):
        g = self.berger_boos_gamma
        if g is not None and not 0.0 < g < 1.0:
            raise DomainError(f"berger_boos_gamma must be in (0, 1), got {g}")
        if self.em_iterations not in (0, 1):
            raise DomainError("em_iterations must be 0 or 1")
        if self.grid_points < 11:
            raise DomainError("grid_points must be at least 11")


@dataclass(frozen=True)
class NullBoundary:
    """The curve {theta : b(theta) = beta0}, parameterized by theta1."""

    measure: Measure
    beta0: float

    def __post_init__(self):
        self.measure.require_feasible(self.beta0)

    def domain(self) -> tuple[float, float]:
        b0 = self.beta0
        if self.measure is Measure.DIFFERENCE:
            return (max(0.0, -b0), min(1.0, 1.0 - b0))
        if self.measure is Measure.RATIO:
            return (0.0, min(1.0, 1.0 / b0))
        return (0.0, 1.0)

    def theta2_of(self, theta1):
        t1 = np.asarray(theta1, dtype=float)
        b0 = self.beta0
        if self.measure is Measure.DIFFERENCE:
            t2 = t1 + b0
        elif self.measure is Measure.RATIO:
            t2 = b0 * t1
        else:
            t2 = b0 * t1 / (1.0 + t1 * (b0 - 1.0))
        return np.clip(t2, 0.0, 1.0)

    def theta1_of(self, theta2):
        t2 = np.asarray(theta2, dtype=float)
        b0 = self.beta0
        if self.measure is Measure.DIFFERENCE:
            t1 = t2 - b0
        elif self.measure is Measure.RATIO:
            t1 = t2 / b0
        else:
            t1 = t2 / (b0 - t2 * (b0 - 1.0))
        return np.clip(t1, 0.0, 1.0)


def _sorted_structure(ordering: SampleSpaceOrdering):
    ii, jj = np.nonzero(ordering.mask)
    rk = ordering.rank[ii, jj]
    order = np.argsort(rk, kind="stable")
    oi = ii[order].astype(np.int64)
    oj = jj[order].astype(np.int64)
    counts = np.bincount(rk, minlength=ordering.n_ranks)
    block_ends = np.cumsum(counts) - 1
    return oi, oj, block_ends


def _member_for_tail(ordering: SampleSpaceOrdering, rank_x: int, tail: str) -> np.ndarray:
    if tail == "le":
        member = (ordering.rank <= rank_x) & ordering.mask
    elif tail == "ge":
        member = (ordering.rank >= rank_x) & ordering.mask
    else:  # pragma: no cover
        raise DomainError(f"tail must be 'le' or 'ge', got {tail!r}")
    return member.astype(float)


def _cp_interval(x: int, n: int, level: float) -> tuple[float, float]:
    """Exact (Clopper-Pearson) interval for one binomial proportion."""
    alpha = 1.0 - level
    lo = 0.0 if x == 0 else float(betaincinv(x, n - x + 1, alpha / 2.0))
    hi = 1.0 if x == n else float(betaincinv(x + 1, n - x, 1.0 - alpha / 2.0))
    return lo, hi


def _bb_window(data: TwoByTwoData, boundary: NullBoundary, gamma: float) -> tuple[float, float]:
    """theta1-window of the nuisance confidence set C_gamma on the boundary.

    C_gamma is the Bonferroni rectangle of per-group Clopper-Pearson
    intervals (each at 1 - gamma/2, so joint coverage is at least
    1 - gamma) intersected with the boundary curve.  Restricting through
    both margins is what lets the adjustment cut off the far ends of the
    nuisance range.
    """
    lo_d, hi_d = boundary.domain()
    l1, h1 = _cp_interval(data.x1, data.n1, 1.0 - gamma / 2.0)
    l2, h2 = _cp_interval(data.x2, data.n2, 1.0 - gamma / 2.0)
    lo = max(l1, float(boundary.theta1_of(l2)), lo_d)
    hi = min(h1, float(boundary.theta1_of(h2)), hi_d)
    return lo, hi


def _boundary_scalar(memberf, boundary, n1, n2):
    def scalar(th):
        p1 = binom_pmf_vector(n1, th)
        p2 = binom_pmf_vector(n2, float(boundary.theta2_of(th)))
        return float(p1 @ memberf @ p2)

    return scalar


def _boundary_sup(memberf, boundary, n1, n2, opts, window=None):
    lo, hi = window if window is not None else boundary.domain()
    if lo > hi:
        return 0.0
    if lo == hi:
        return _boundary_scalar(memberf, boundary, n1, n2)(lo)
    thetas = np.linspace(lo, hi, opts.grid_points)
    P1 = binom_pmf_matrix(n1, thetas)
    P2 = binom_pmf_matrix(n2, np.asarray(boundary.theta2_of(thetas)))
    vals = region_prob(P1, P2, memberf)
    scalar = _boundary_scalar(memberf, boundary, n1, n2) if opts.refine else None
    return refine_max(thetas, vals, fn_scalar=scalar, refine=opts.refine).value


def _measure_table(measure: Measure, t1: np.ndarray, t2: np.ndarray) -> np.ndarray:
    """b(theta) on the product grid t1 x t2; nan where undefined."""
    a = t1[:, None]
    b = t2[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        if measure is Measure.DIFFERENCE:
            return b - a
        if measure is Measure.RATIO:
            return np.where((a == 0) & (b == 0), np.nan, b / a)
        oa = a / (1.0 - a)
        ob = b / (1.0 - b)
        out = ob / oa
        out = np.where((a == 0) & (b == 0), np.nan, out)
        out = np.where((a == 1) & (b == 1), np.nan, out)
        out = np.where((a == 0) & (b > 0), np.inf, out)
        out = np.where((a == 1) & (b < 1), 0.0, out)
        return out


def _full_region_sup(memberf, measure, beta0, null_side, n1, n2):
    """Two-dimensional supremum over one side of the null, for orderings
    without convexity certification.  Nested grid refinement."""
    lo1, hi1, lo2, hi2 = 0.0, 1.0, 0.0, 1.0
    best = 0.0
    g = 201
    for _ in range(3):
        t1 = np.linspace(lo1, hi1, g)
        t2 = np.linspace(lo2, hi2, g)
        P1 = binom_pmf_matrix(n1, t1)
        P2 = binom_pmf_matrix(n2, t2)
        M = power_matrix(P1, memberf, P2)
        B = _measure_table(measure, t1, t2)
        if null_side == "ge":
            feas = B >= beta0
        else:
            feas = B <= beta0
        feas &= ~np.isnan(B)
        if not feas.any():
            break
        vals = np.where(feas, M, -np.inf)
        i, j = np.unravel_index(int(np.argmax(vals)), vals.shape)
        best = max(best, float(vals[i, j]))
        span1 = (hi1 - lo1) / (g - 1)
        span2 = (hi2 - lo2) / (g - 1)
        lo1, hi1 = max(0.0, t1[i] - span1), min(1.0, t1[i] + span1)
        lo2, hi2 = max(0.0, t2[j] - span2), min(1.0, t2[j] + span2)
        g = 41
    return best


def _check_onesided(hyp: Hypothesis):
    if not hyp.alternative.one_sided:
        raise DomainError("this operation needs a one-sided alternative")


def uncond_pvalue_onesided(
    data: TwoByTwoData,
    hyp: Hypothesis,
    ordering: SampleSpaceOrdering,
    opts: UncondOptions = UncondOptions(),
) -> float:
    """Valid one-sided unconditional p-value under a fixed ordering.

    alternative="less" tests H0: beta >= beta0 through the lower tail of
    the ordering; "greater" tests H0: beta <= beta0 through the upper
    tail.  Points outside the informative set report p = 1.
    """
    _check_onesided(hyp)
    _check_grid(data, ordering)
    if ordering.two_sided:
        raise DomainError("one-sided p-values need a one-sided ordering")
    if opts.em_iterations:
        return em_adjust(data, hyp, ordering, opts)
    if not ordering.mask[data.x1, data.x2]:
        return 1.0
    tail = "le" if hyp.alternative is Alternative.LESS else "ge"
    memberf = _member_for_tail(ordering, ordering.rank_of(data.x1, data.x2), tail)
    return _sup_for_member(data, hyp, memberf, ordering, opts, tail)


def _sup_for_member(data, hyp, memberf, ordering, opts, tail) -> float:
    boundary = NullBoundary(hyp.measure, hyp.beta0)
    gamma = opts.berger_boos_gamma
    if opts.force_full_region or not ordering.bc_certified:
        null_side = "ge" if hyp.alternative is Alternative.LESS else "le"
        if gamma is not None:
            raise DomainError(
                "Berger-Boos restriction is only supported with the "
                "boundary search (convexity-certified orderings)"
            )
        return min(1.0, _full_region_sup(
            memberf, hyp.measure, hyp.beta0, null_side, data.n1, data.n2
        ))
    window = None
    if gamma is not None:
        window = _bb_window(data, boundary, gamma)
    sup = _boundary_sup(memberf, boundary, data.n1, data.n2, opts, window)
    if gamma is not None:
        sup = gamma + sup
    return min(1.0, sup)


def uncond_pvalue_twosided(
    data: TwoByTwoData,
    hyp: Hypothesis,
    ordering: SampleSpaceOrdering,
    opts: UncondOptions = UncondOptions(),
) -> float:
    """Two-sided unconditional p-value; the ordering must be two-sided
    (smaller T means more extreme) and the null is the boundary curve."""
    _check_grid(data, ordering)
    if not ordering.two_sided:
        raise DomainError("two-sided p-values need a two-sided ordering")
    if not ordering.mask[data.x1, data.x2]:
        return 1.0
    memberf = _member_for_tail(ordering, ordering.rank_of(data.x1, data.x2), "le")
    boundary = NullBoundary(hyp.measure, hyp.beta0)
    gamma = opts.berger_boos_gamma
    window = _bb_window(data, boundary, gamma) if gamma is not None else None
    sup = _boundary_sup(memberf, boundary, data.n1, data.n2, opts, window)
    if gamma is not None:
        sup = gamma + sup
    return min(1.0, sup)


def uncond_pvalue_central(
    data: TwoByTwoData,
    measure: Measure,
    beta0: float,
    ordering: SampleSpaceOrdering,
    opts: UncondOptions = UncondOptions(),
) -> float:
    """Central two-sided p-value: min(1, 2 p_less, 2 p_greater)."""
    p_le = uncond_pvalue_onesided(
        data, Hypothesis(measure, beta0, Alternative.LESS), ordering, opts
    )
    p_ge = uncond_pvalue_onesided(
        data, Hypothesis(measure, beta0, Alternative.GREATER), ordering, opts
    )
    return min(1.0, 2.0 * p_le, 2.0 * p_ge)


def _check_grid(data: TwoByTwoData, ordering: SampleSpaceOrdering):
    if (data.n1, data.n2) != (ordering.n1, ordering.n2):
        raise DomainError(
            f"ordering is for a {ordering.n1}x{ordering.n2} design, "
            f"data has n1={data.n1}, n2={data.n2}"
        )


def uncond_pvalues_table(
    ordering: SampleSpaceOrdering,
    measure: Measure,
    beta0: float,
    tail: str,
    opts: UncondOptions = UncondOptions(),
    refine_level: float | None = None,
    refine_band: float = 1e-3,
) -> np.ndarray:
    """p-values for every sample point at once.

    One sorted cumulative pass over the grid per boundary point gives the
    tail mass at every rank simultaneously; points whose grid p lands
    within ``refine_band`` of ``refine_level`` get the golden-section
    treatment so rejection sets are stable at the decision threshold.
    Uninformative points report exactly 1.
    """
    if tail not in ("le", "ge"):
        raise DomainError(f"tail must be 'le' or 'ge', got {tail!r}")
    boundary = NullBoundary(measure, beta0)
    lo_d, hi_d = boundary.domain()
    thetas = np.linspace(lo_d, hi_d, opts.grid_points)
    n1, n2 = ordering.n1, ordering.n2
    P1 = binom_pmf_matrix(n1, thetas)
    P2 = binom_pmf_matrix(n2, np.asarray(boundary.theta2_of(thetas)))
    oi, oj, block_ends = _sorted_structure(ordering)
    C = rank_tail_table(P1, P2, oi, oj, block_ends)
    if tail == "le":
        tail_table = C
    else:
        total = C[:, -1:]
        tail_table = total - np.concatenate(
            [np.zeros((C.shape[0], 1)), C[:, :-1]], axis=1
        )

    gamma = opts.berger_boos_gamma
    out = np.ones(ordering.shape)
    mask = ordering.mask

    if gamma is None:
        p_rank = tail_table.max(axis=0)
        arg = tail_table.argmax(axis=0)
        if opts.refine and refine_level is not None:
            near = np.flatnonzero(np.abs(p_rank - refine_level) <= refine_band)
            for r in near:
                i = int(arg[r])
                lo = thetas[max(i - 1, 0)]
                hi = thetas[min(i + 1, len(thetas) - 1)]
                memberf = _member_for_tail(ordering, int(r), tail)
                scalar = _boundary_scalar(memberf, boundary, n1, n2)
                _, v = golden_max(scalar, lo, hi, 1e-6)
                p_rank[r] = max(p_rank[r], v)
        out[mask] = np.minimum(1.0, p_rank[ordering.rank[mask]])
        return out

    # Berger-Boos: each point owns a nuisance window
    for i in range(n1 + 1):
        for j in range(n2 + 1):
            if not mask[i, j]:
                continue
            data_ij = TwoByTwoData(i, n1, j, n2)
            wlo, whi = _bb_window(data_ij, boundary, gamma)
            r = ordering.rank[i, j]
            if wlo > whi:
                out[i, j] = gamma
                continue
            a = int(np.searchsorted(thetas, wlo, side="left"))
            b = int(np.searchsorted(thetas, whi, side="right"))
            base = float(tail_table[a:b, r].max()) if b > a else 0.0
            if opts.refine and (
                refine_level is None
                or abs(gamma + base - refine_level) <= refine_band
            ):
                memberf = _member_for_tail(ordering, int(r), tail)
                scalar = _boundary_scalar(memberf, boundary, n1, n2)
                _, v = golden_max(scalar, wlo, whi, 1e-6)
                base = max(base, v)
            out[i, j] = min(1.0, gamma + base)
    return out


def boschloo(
    data: TwoByTwoData,
    beta0: float = 1.0,
    variant: str = "irwin",
    opts: UncondOptions = UncondOptions(),
    alternative: Alternative = Alternative.GREATER,
    mode: str = "full",
) -> float:
    """Unconditional p-value ordered by a conditional Fisher p-value.

    variant "irwin" or "central" gives a two-sided test of beta_or =
    beta0; "onesided" uses the one-sided conditional p for the given
    alternative.  Full-mode variants are uniformly below the matching
    conditional test's p-value.
    """
    ordering = boschloo_ordering(data.n1, data.n2, beta0, variant, alternative, mode)
    if variant == "onesided":
        hyp = Hypothesis(Measure.ODDS_RATIO, beta0, alternative)
        return uncond_pvalue_onesided(data, hyp, ordering, opts)
    hyp = Hypothesis(Measure.ODDS_RATIO, beta0, Alternative.TWO_SIDED_MINLIKE)
    return uncond_pvalue_twosided(data, hyp, ordering, opts)


def boschloo_ordering(
    n1: int,
    n2: int,
    beta0: float = 1.0,
    variant: str = "irwin",
    alternative: Alternative = Alternative.GREATER,
    mode: str = "full",
) -> SampleSpaceOrdering:
    """Ordering whose statistic is the conditional Fisher p-value."""
    if variant not in ("irwin", "central", "onesided"):
        raise DomainError(f"unknown Boschloo variant {variant!r}")
    p = np.empty((n1 + 1, n2 + 1))
    for i in range(n1 + 1):
        for j in range(n2 + 1):
            d = TwoByTwoData(i, n1, j, n2)
            if variant == "irwin":
                p[i, j] = _conditional.fisher_irwin(d, beta0, mode)
            elif variant == "central":
                p[i, j] = _conditional.fisher_central(d, beta0, mode)
            else:
                hyp = Hypothesis(Measure.ODDS_RATIO, beta0, alternative)
                p[i, j] = _conditional.fisher_onesided(d, hyp, mode)
    mask = np.ones((n1 + 1, n2 + 1), dtype=bool)
    if variant == "onesided":
        t = -p if alternative is Alternative.GREATER else p
        rank = _ranks_from_floats(t, mask)
        return _finalize(
            n1, n2, t, mask, rank,
            f"boschloo-{variant}-{alternative.value}-{mode}@{beta0:.6g}",
        )
    rank = _ranks_from_floats(p, mask)
    return _finalize(
        n1, n2, p, mask, rank,
        f"boschloo-{variant}-{mode}@{beta0:.6g}", two_sided=True, certify=False,
    )


def em_ordering(
    hyp: Hypothesis, ordering: SampleSpaceOrdering
) -> SampleSpaceOrdering:
    """Estimated-then-maximized ordering: the plug-in p-value at each
    point's null-boundary MLE becomes the new ordering statistic."""
    _check_onesided(hyp)
    n1, n2 = ordering.n1, ordering.n2
    t1m, t2m = constrained_mle(hyp.measure, n1, n2, hyp.beta0)
    P1 = binom_pmf_matrix(n1, t1m.ravel())
    P2 = binom_pmf_matrix(n2, t2m.ravel())
    oi, oj, block_ends = _sorted_structure(ordering)
    C = rank_tail_table(P1, P2, oi, oj, block_ends)
    ranks = ordering.rank.ravel()
    n_pts = ranks.size
    phat = np.ones(n_pts)
    informative = ordering.mask.ravel()
    tail_le = hyp.alternative is Alternative.LESS
    for k in range(n_pts):
        if not informative[k]:
            continue
        r = ranks[k]
        if tail_le:
            phat[k] = C[k, r]
        else:
            total = C[k, -1]
            phat[k] = total - (C[k, r - 1] if r > 0 else 0.0)
    phat = phat.reshape(ordering.shape)
    t = phat if tail_le else -phat
    rank = _ranks_from_floats(t, ordering.mask)
    return _finalize(
        n1, n2, t, ordering.mask, rank, f"em[{ordering.name}]"
    )


def em_adjust(
    data: TwoByTwoData,
    hyp: Hypothesis,
    ordering: SampleSpaceOrdering,
    opts: UncondOptions = UncondOptions(),
) -> float:
    """One estimated-and-maximized round on top of a base ordering."""
    base = em_ordering(hyp, ordering)
    inner = dataclasses.replace(opts, em_iterations=0)
    return uncond_pvalue_onesided(data, hyp, base, inner)


# ---------------------------------------------------------------------------
# confidence limits


@dataclass(frozen=True)
class OrderingFamily:
    """A beta0-indexed recipe for ordering functions."""

    name: str
    build: Callable[[int, int, float], SampleSpaceOrdering]
    two_sided: bool = False
    beta0_free: bool = False

    @classmethod
    def fixed(cls, ordering: SampleSpaceOrdering) -> "OrderingFamily":
        return cls(
            name=ordering.name,
            build=lambda n1, n2, beta0: ordering,
            two_sided=ordering.two_sided,
            beta0_free=True,
        )


@dataclass(frozen=True)
class UncondCIResult:
    ci: ConfidenceInterval
    region: "object | None"
    coherent: bool | None


def _bisect_monotone(pfn, target, a, b, pa_gt, increasing, iters=60):
    """Locate the crossing of a monotone p-value function with target.

    ``pa_gt`` states whether p(a) > target.  Returns the crossing point.
    """
    for _ in range(iters):
        m = 0.5 * (a + b)
        if (pfn(m) > target) == pa_gt:
            a = m
        else:
            b = m
    return 0.5 * (a + b)


_RATIO_CAP = 1e8


def _scan_scale(measure: Measure, lo, hi, k):
    if measure.log_scale:
        return np.geomspace(lo, hi, k)
    return np.linspace(lo, hi, k)


def uncond_ci(
    data: TwoByTwoData,
    measure: Measure,
    level: float,
    family: OrderingFamily | SampleSpaceOrdering,
    opts: UncondOptions = UncondOptions(),
    beta_grid: np.ndarray | None = None,
) -> UncondCIResult:
    """Invert unconditional p-values into a confidence interval.

    beta0-free convexity-certified orderings give monotone one-sided
    p-value curves, so each central limit comes from root finding.  For
    beta0-indexed families (score orderings) or two-sided orderings the
    p-value is scanned over a beta0 grid, the confidence region may be a
    union of intervals, and the matching interval is the smallest cover;
    non-monotone one-sided curves are flagged as incoherent.
    """
    if isinstance(family, SampleSpaceOrdering):
        family = OrderingFamily.fixed(family)
    if not 0.0 < level < 1.0:
        raise DomainError(f"level must be in (0, 1), got {level}")
    if family.beta0_free and not family.two_sided:
        return _ci_fixed_onesided(data, measure, level, family, opts)
    return _ci_region_scan(data, measure, level, family, opts, beta_grid)


def _ci_fixed_onesided(data, measure, level, family, opts):
    alpha2 = (1.0 - level) / 2.0
    ordering = family.build(data.n1, data.n2, measure.equality_value)

    def p_less(beta0):
        return uncond_pvalue_onesided(
            data, Hypothesis(measure, beta0, Alternative.LESS), ordering, opts
        )

    def p_greater(beta0):
        return uncond_pvalue_onesided(
            data, Hypothesis(measure, beta0, Alternative.GREATER), ordering, opts
        )

    lo_b, hi_b = measure.bounds
    if measure is Measure.DIFFERENCE:
        lo_edge, hi_edge = -1.0 + 1e-9, 1.0 - 1e-9
    else:
        lo_edge, hi_edge = 1.0 / _RATIO_CAP, _RATIO_CAP

    # upper limit: p_less is nonincreasing in beta0
    if p_less(hi_edge) > alpha2:
        upper = hi_b
    else:
        upper = _bisect_monotone(p_less, alpha2, lo_edge, hi_edge, True, False)
    # lower limit: p_greater is nondecreasing in beta0
    if p_greater(lo_edge) > alpha2:
        lower = lo_b
    else:
        lower = _bisect_monotone(p_greater, alpha2, hi_edge, lo_edge, True, True)
    ci = ConfidenceInterval(lower=min(lower, upper), upper=max(lower, upper),
                            level=level, central=True)
    return UncondCIResult(ci=ci, region=None, coherent=True)


def _default_beta_grid(data, measure, k=2001):
    if measure is Measure.DIFFERENCE:
        return np.linspace(-1.0 + 1e-9, 1.0 - 1e-9, k)
    num = (data.x2 + 0.5) / (data.n2 + 0.5)
    den = (data.x1 + 0.5) / (data.n1 + 0.5)
    center = num / den if measure is Measure.RATIO else (
        (num / (1 - num + 1e-12)) / (den / (1 - den + 1e-12))
    )
    lo = max(center / 1e6, 1e-8)
    hi = min(center * 1e6, 1e8)
    return np.geomspace(lo, hi, k)


def _ci_region_scan(data, measure, level, family, opts, beta_grid):
    alpha = 1.0 - level
    if beta_grid is None:
        beta_grid = _default_beta_grid(data, measure)
    beta_grid = np.asarray(beta_grid, dtype=float)

    if family.two_sided:
        def pfun(d, b0):
            ordering = family.build(d.n1, d.n2, b0)
            return uncond_pvalue_twosided(
                d, Hypothesis(measure, b0, Alternative.TWO_SIDED_MINLIKE), ordering, opts
            )
    else:
        def pfun(d, b0):
            ordering = family.build(d.n1, d.n2, b0)
            p_le = uncond_pvalue_onesided(
                d, Hypothesis(measure, b0, Alternative.LESS), ordering, opts
            )
            p_ge = uncond_pvalue_onesided(
                d, Hypothesis(measure, b0, Alternative.GREATER), ordering, opts
            )
            return min(1.0, 2.0 * p_le, 2.0 * p_ge)

    region = _triples.confidence_region(pfun, data, level, beta_grid)
    ci = _triples.matching_ci(region)
    ci = dataclasses.replace(ci, central=not family.two_sided)
    # non-coherence shows up as extra region pieces
    coherent = len(region.intervals) <= 1
    return UncondCIResult(ci=ci, region=region, coherent=coherent)
