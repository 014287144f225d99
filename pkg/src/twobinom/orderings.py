"""Sample-space ordering functions over the (n1+1) x (n2+1) grid.

An ordering assigns every informative sample point a real score T whose
larger values indicate stronger evidence that theta2 exceeds theta1 (for
two-sided orderings, smaller T means more extreme in either direction).
Exact ties are structural, so ranks are computed from integer or rational
keys wherever the statistic is rational in the counts; float statistics
fall back to tolerance clustering.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._kernels import binom_pmf_matrix, region_prob
from ._optim import refine_max
from .core import BudgetExceededError, DomainError, Measure, informative_mask
from .distributions import (
    NoncentralHypergeomParams,
    binom_pmf_vector,
    nchg_pmf_vector,
)

_TIE_RTOL = 1e-10


@dataclass(frozen=True)
class SampleSpaceOrdering:
    """Tabulated ordering over the sample grid with its tie structure."""

    n1: int
    n2: int
    t: np.ndarray
    mask: np.ndarray
    rank: np.ndarray
    n_ranks: int
    bc_certified: bool
    two_sided: bool
    name: str

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n1 + 1, self.n2 + 1)

    def rank_of(self, x1: int, x2: int) -> int:
        return int(self.rank[x1, x2])

    def is_informative(self, x1: int, x2: int) -> bool:
        return bool(self.mask[x1, x2])

    def with_mask(self, new_mask: np.ndarray, name: str | None = None) -> "SampleSpaceOrdering":
        """Restrict to a sub-mask, preserving the relative order and ties."""
        new_mask = np.asarray(new_mask, dtype=bool)
        if new_mask.shape != self.shape:
            raise DomainError("mask shape mismatch")
        if (new_mask & ~self.mask).any():
            raise DomainError("new mask must be a subset of the current mask")
        rank = np.full(self.shape, -1, dtype=np.int64)
        old = self.rank[new_mask]
        kept = np.unique(old)
        remap = {int(r): i for i, r in enumerate(kept)}
        rank[new_mask] = [remap[int(r)] for r in old]
        t = np.where(new_mask, self.t, np.nan)
        out = SampleSpaceOrdering(
            self.n1, self.n2, t, new_mask, rank, len(kept),
            False, self.two_sided, name or self.name,
        )
        return dataclasses.replace(out, bc_certified=check_bc(out).passed)


@dataclass(frozen=True)
class BCReport:
    passed: bool
    violation: tuple[tuple[int, int], tuple[int, int]] | None = None


def check_bc(ordering: SampleSpaceOrdering) -> BCReport:
    """Exhaustively verify the convexity conditions on informative points:
    T nondecreasing in x2 for fixed x1, nonincreasing in x1 for fixed x2.
    Returns the first violating pair on failure."""
    r = ordering.rank
    mask = ordering.mask
    n1, n2 = ordering.n1, ordering.n2
    for i in range(n1 + 1):
        cols = np.flatnonzero(mask[i])
        for a, b in zip(cols[:-1], cols[1:]):
            if r[i, b] < r[i, a]:
                return BCReport(False, ((i, int(a)), (i, int(b))))
    for j in range(n2 + 1):
        rows = np.flatnonzero(mask[:, j])
        for a, b in zip(rows[:-1], rows[1:]):
            if r[b, j] > r[a, j]:
                return BCReport(False, ((int(a), j), (int(b), j)))
    return BCReport(True, None)


def is_refinement(fine: SampleSpaceOrdering, coarse: SampleSpaceOrdering) -> bool:
    """True iff ``fine`` preserves every strict inequality of ``coarse``."""
    if fine.shape != coarse.shape or not np.array_equal(fine.mask, coarse.mask):
        raise DomainError("orderings must share the grid and mask")
    fr = fine.rank[fine.mask]
    cr = coarse.rank[coarse.mask]
    hi = np.full(coarse.n_ranks, -1, dtype=np.int64)
    lo = np.full(coarse.n_ranks, np.iinfo(np.int64).max, dtype=np.int64)
    np.maximum.at(hi, cr, fr)
    np.minimum.at(lo, cr, fr)
    return bool(np.all(hi[:-1] < lo[1:]))


def ordering_to_csv(ordering: SampleSpaceOrdering) -> str:
    """CSV grid: rows x1, columns x2, cells T (NA where masked out)."""
    lines = ["x1\\x2," + ",".join(str(j) for j in range(ordering.n2 + 1))]
    for i in range(ordering.n1 + 1):
        cells = []
        for j in range(ordering.n2 + 1):
            if ordering.mask[i, j]:
                cells.append(format(float(ordering.t[i, j]), ".10g"))
            else:
                cells.append("NA")
        lines.append(f"{i}," + ",".join(cells))
    return "\n".join(lines) + "\n"


def _finalize(n1, n2, t, mask, rank, name, two_sided=False, certify=True):
    n_ranks = int(rank.max()) + 1 if mask.any() else 0
    out = SampleSpaceOrdering(
        n1, n2, np.where(mask, t, np.nan), mask, rank, n_ranks, False, two_sided, name
    )
    if certify and not two_sided:
        out = dataclasses.replace(out, bc_certified=check_bc(out).passed)
    return out


def _ranks_from_keys(n1, n2, keys, mask):
    """Dense ranks from exactly comparable keys (ints/Fractions/tuples)."""
    pts = [(i, j) for i in range(n1 + 1) for j in range(n2 + 1) if mask[i, j]]
    pts.sort(key=lambda p: keys[p])
    rank = np.full((n1 + 1, n2 + 1), -1, dtype=np.int64)
    r = -1
    prev = None
    for p in pts:
        k = keys[p]
        if prev is None or k != prev:
            r += 1
            prev = k
        rank[p] = r
    return rank


def _ranks_from_floats(values, mask, rtol=_TIE_RTOL):
    """Dense ranks from a float table, clustering near-equal values.

    Two values tie when they differ by at most rtol * max(1, |values|);
    structural ties are exact or nearly so, everything else is separated
    by far more than the tolerance.
    """
    flat_idx = np.flatnonzero(mask.ravel())
    v = values.ravel()[flat_idx]
    order = np.argsort(v, kind="mergesort")
    rank_flat = np.empty(v.size, dtype=np.int64)
    r = 0
    anchor = v[order[0]]
    for pos, oi in enumerate(order):
        if pos > 0:
            cur = v[oi]
            if cur - anchor > rtol * max(1.0, abs(cur), abs(anchor)):
                r += 1
                anchor = cur
        rank_flat[oi] = r
    rank = np.full(values.shape, -1, dtype=np.int64).ravel()
    rank[flat_idx] = rank_flat
    return rank.reshape(values.shape)


# ---------------------------------------------------------------------------
# simple estimate-based orderings


def _diff_keys(n1, n2, tiebreak):
    keys = {}
    n = n1 + n2
    for i in range(n1 + 1):
        for j in range(n2 + 1):
            d = j * n1 - i * n2
            if tiebreak:
                s = i + j
                u = s * (n - s)
                k2 = -u if d > 0 else (u if d < 0 else 0)
                keys[(i, j)] = (d, k2)
            else:
                keys[(i, j)] = d
    return keys


def order_diff(n1: int, n2: int) -> SampleSpaceOrdering:
    """Order by the difference in sample proportions."""
    mask = np.ones((n1 + 1, n2 + 1), dtype=bool)
    rank = _ranks_from_keys(n1, n2, _diff_keys(n1, n2, False), mask)
    j = np.arange(n2 + 1)[None, :]
    i = np.arange(n1 + 1)[:, None]
    t = j / n2 - i / n1
    return _finalize(n1, n2, t, mask, rank, "diff")


def order_diff_tiebreak(n1: int, n2: int) -> SampleSpaceOrdering:
    """Difference ordering with pooled-Z tie breaking.

    Within each tie class of the plain difference ordering, points with a
    smaller pooled variance count as more extreme; mirror-symmetric pairs
    stay tied so the ordering keeps symmetry equivariance.
    """
    mask = np.ones((n1 + 1, n2 + 1), dtype=bool)
    rank = _ranks_from_keys(n1, n2, _diff_keys(n1, n2, True), mask)
    t = _pooled_z_table(n1, n2)
    return _finalize(n1, n2, t, mask, rank, "diff-tiebreak")


def _pooled_z_table(n1, n2):
    i = np.arange(n1 + 1)[:, None]
    j = np.arange(n2 + 1)[None, :]
    d = j / n2 - i / n1
    pooled = (i + j) / (n1 + n2)
    var = pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = d / np.sqrt(var)
    return np.where(var > 0, z, 0.0)


def order_wald_pooled(n1: int, n2: int) -> SampleSpaceOrdering:
    """Order the whole space by the pooled-variance Z statistic.

    Z is defined as 0 when the pooled variance vanishes (all successes or
    all failures).
    """
    mask = np.ones((n1 + 1, n2 + 1), dtype=bool)
    n = n1 + n2
    keys = {}
    for i in range(n1 + 1):
        for j in range(n2 + 1):
            d = j * n1 - i * n2
            s = i + j
            u = s * (n - s)
            if u == 0 or d == 0:
                keys[(i, j)] = Fraction(0)
            else:
                keys[(i, j)] = Fraction(d * abs(d), u)
    rank = _ranks_from_keys(n1, n2, keys, mask)
    return _finalize(n1, n2, _pooled_z_table(n1, n2), mask, rank, "wald-pooled")


def order_estimate(n1: int, n2: int, measure: Measure) -> SampleSpaceOrdering:
    """Order by the sample estimate of the measure, with tie breaking.

    Uninformative corner points are masked out.  Ties within an estimate
    class are refined by the pooled-variance standardized statistic on the
    measure's (log) scale; the all-zero / all-infinite estimate classes
    are refined by the difference key.
    """
    if measure is Measure.DIFFERENCE:
        ord_ = order_diff_tiebreak(n1, n2)
        return dataclasses.replace(ord_, name="estimate-tiebreak:difference")
    mask = informative_mask(measure, n1, n2)
    n = n1 + n2
    keys = {}
    t = np.full((n1 + 1, n2 + 1), np.nan)
    for i in range(n1 + 1):
        for j in range(n2 + 1):
            if not mask[i, j]:
                continue
            d = j * n1 - i * n2
            s = i + j
            u = s * (n - s)
            if measure is Measure.RATIO:
                infinite = i == 0 and j > 0
                primary = None if infinite else Fraction(j * n1, i * n2)
            else:
                num = j * (n1 - i)
                den = i * (n2 - j)
                infinite = den == 0
                primary = None if infinite else Fraction(num, den)
            if infinite:
                keys[(i, j)] = (1, Fraction(0), d)
                t[i, j] = math.inf
            else:
                if primary > 1:
                    k2 = s if measure is Measure.RATIO else u
                elif primary < 1:
                    k2 = -s if measure is Measure.RATIO else -u
                else:
                    k2 = 0
                if primary == 0:
                    k2 = d if measure is Measure.ODDS_RATIO else -s
                keys[(i, j)] = (0, primary, k2)
                t[i, j] = float(primary)
    rank = _ranks_from_keys(n1, n2, keys, mask)
    return _finalize(n1, n2, t, mask, rank, f"estimate-tiebreak:{measure.value}")


# ---------------------------------------------------------------------------
# score orderings


def constrained_mle(measure: Measure, n1: int, n2: int, beta0: float):
    """Null-boundary maximum-likelihood (theta1, theta2) per sample point.

    Returns two (n1+1, n2+1) tables.  Under the equality null these are
    the pooled proportion.
    """
    measure.require_feasible(beta0)
    i = np.arange(n1 + 1, dtype=float)[:, None] * np.ones((1, n2 + 1))
    j = np.ones((n1 + 1, 1)) * np.arange(n2 + 1, dtype=float)[None, :]
    if measure is Measure.DIFFERENCE:
        t1 = _mle_difference(i, j, n1, n2, beta0)
        return t1, t1 + beta0
    if measure is Measure.RATIO:
        t1 = _mle_ratio(i, j, n1, n2, beta0)
        return t1, beta0 * t1
    t2 = _mle_oddsratio(i, j, n1, n2, beta0)
    t1 = t2 / (beta0 + t2 * (1.0 - beta0))
    return t1, t2


def _mle_difference(x1, x2, n1, n2, delta):
    # profile log-likelihood in theta1 is strictly concave; bisect on its
    # derivative inside the feasible interval, clamping at the ends
    lo = max(0.0, -delta)
    hi = min(1.0, 1.0 - delta)
    eps = 1e-13

    def deriv(t1):
        t2 = t1 + delta
        with np.errstate(divide="ignore", invalid="ignore"):
            out = (
                np.where(x1 > 0, x1 / t1, 0.0)
                - np.where(n1 - x1 > 0, (n1 - x1) / (1.0 - t1), 0.0)
                + np.where(x2 > 0, x2 / t2, 0.0)
                - np.where(n2 - x2 > 0, (n2 - x2) / (1.0 - t2), 0.0)
            )
        return out

    a = np.full(x1.shape, lo + eps)
    b = np.full(x1.shape, hi - eps)
    fa = deriv(a)
    fb = deriv(b)
    at_lo = fa <= 0
    at_hi = fb >= 0
    for _ in range(80):
        m = 0.5 * (a + b)
        fm = deriv(m)
        left = fm > 0
        a = np.where(left, m, a)
        b = np.where(left, b, m)
    t1 = 0.5 * (a + b)
    t1 = np.where(at_lo, lo, t1)
    t1 = np.where(at_hi & ~at_lo, hi, t1)
    return t1


def _mle_ratio(x1, x2, n1, n2, rho):
    # quadratic from the profile score equation; stable smaller root
    s = x1 + x2
    a = rho * (n1 + n2)
    b = -(n1 + x2 + rho * (n2 + x1))
    c = s
    disc = np.maximum(b * b - 4.0 * a * c, 0.0)
    t1 = 2.0 * c / (-b + np.sqrt(disc))
    return np.clip(t1, 0.0, min(1.0, 1.0 / rho))


def _mle_oddsratio(x1, x2, n1, n2, psi):
    s = x1 + x2
    if psi == 1.0:
        return s / (n1 + n2)
    A = n2 * (psi - 1.0)
    B = -(n1 + n2 * psi + s * (psi - 1.0))
    C = s * psi
    disc = np.maximum(B * B - 4.0 * A * C, 0.0)
    q = -0.5 * (B - np.sqrt(disc))  # B < 0 always, so -B + sqrt(disc) > 0
    r1 = q / A
    r2 = np.where(q != 0, C / q, np.inf)
    in01 = lambda r: (r >= -1e-12) & (r <= 1.0 + 1e-12)
    t2 = np.where(in01(r1), r1, r2)
    t2 = np.where(s == 0, 0.0, t2)
    t2 = np.where(s == n1 + n2, 1.0, t2)
    return np.clip(t2, 0.0, 1.0)


def score_z_table(measure: Measure, n1: int, n2: int, beta0: float) -> np.ndarray:
    """Constrained-MLE score statistic; positive favors theta2 > theta1
    relative to the null.  Defined as 0 when the null variance vanishes."""
    i = np.arange(n1 + 1, dtype=float)[:, None] * np.ones((1, n2 + 1))
    j = np.ones((n1 + 1, 1)) * np.arange(n2 + 1, dtype=float)[None, :]
    p1h = i / n1
    p2h = j / n2
    t1, t2 = constrained_mle(measure, n1, n2, beta0)
    if measure is Measure.DIFFERENCE:
        num = p2h - p1h - beta0
        var = t1 * (1.0 - t1) / n1 + t2 * (1.0 - t2) / n2
    elif measure is Measure.RATIO:
        num = p2h - beta0 * p1h
        var = beta0 * beta0 * t1 * (1.0 - t1) / n1 + t2 * (1.0 - t2) / n2
    else:
        v1 = n1 * t1 * (1.0 - t1)
        v2 = n2 * t2 * (1.0 - t2)
        with np.errstate(divide="ignore", invalid="ignore"):
            z = (j - n2 * t2) * np.sqrt(1.0 / v1 + 1.0 / v2)
        return np.where((v1 > 0) & (v2 > 0), z, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = num / np.sqrt(var)
    return np.where(var > 0, z, 0.0)


def order_score(n1: int, n2: int, measure: Measure, beta0: float) -> SampleSpaceOrdering:
    """Score-statistic ordering for the null at beta0.

    At the equality null the induced ranking coincides with the pooled-Z
    ordering.
    """
    z = score_z_table(measure, n1, n2, beta0)
    mask = informative_mask(measure, n1, n2)
    rank = _ranks_from_floats(z, mask)
    return _finalize(
        n1, n2, z, mask, rank, f"score:{measure.value}@{beta0:.6g}"
    )


def order_score_twosided(n1: int, n2: int, measure: Measure, beta0: float) -> SampleSpaceOrdering:
    """Squared-score two-sided ordering (smaller T is more extreme)."""
    z = score_z_table(measure, n1, n2, beta0)
    t = -(z * z)
    mask = informative_mask(measure, n1, n2)
    rank = _ranks_from_floats(t, mask)
    return _finalize(
        n1, n2, t, mask, rank,
        f"score2:{measure.value}@{beta0:.6g}", two_sided=True, certify=False,
    )


# ---------------------------------------------------------------------------
# conditional mid-p ordering


def order_fisher_midp(n1: int, n2: int, direction: str = "greater") -> SampleSpaceOrdering:
    """Order by the one-sided conditional mid-p value at the equality null.

    T is the lower-tail mid-p of X2 given the diagonal total, so larger T
    favors theta2 > theta1; direction="less" reverses the sign.
    """
    if direction not in ("greater", "less"):
        raise DomainError(f"direction must be 'greater' or 'less', got {direction!r}")
    t = np.empty((n1 + 1, n2 + 1))
    for s in range(n1 + n2 + 1):
        params = NoncentralHypergeomParams(s, n1, n2, 1.0)
        lo, hi = params.support
        w = nchg_pmf_vector(params)
        mid_lower = np.concatenate(([0.0], np.cumsum(w)[:-1])) + 0.5 * w
        for x2 in range(lo, hi + 1):
            x1 = s - x2
            t[x1, x2] = mid_lower[x2 - lo]
    if direction == "less":
        t = -t
    mask = np.ones((n1 + 1, n2 + 1), dtype=bool)
    rank = _ranks_from_floats(t, mask)
    return _finalize(n1, n2, t, mask, rank, f"fisher-midp:{direction}")


# ---------------------------------------------------------------------------
# CSM orderings


def _bc_candidates(member: np.ndarray, bottom: bool) -> list[tuple[int, int]]:
    """Points whose addition keeps the growing region convex."""
    n1p, n2p = member.shape
    out = []
    for i in range(n1p):
        for j in range(n2p):
            if member[i, j]:
                continue
            if bottom:
                ok = (i + 1 >= n1p or member[i + 1, j]) and (j == 0 or member[i, j - 1])
            else:
                ok = (i == 0 or member[i - 1, j]) and (j + 1 >= n2p or member[i, j + 1])
            if ok:
                out.append((i, j))
    return out


def _equality_sup(memberf, n1, n2, P1, P2, thetas, refine):
    vals = region_prob(P1, P2, memberf)

    def scalar(th):
        p1 = binom_pmf_vector(n1, th)
        p2 = binom_pmf_vector(n2, th)
        return float(p1 @ memberf @ p2)

    return refine_max(thetas, vals, fn_scalar=scalar if refine else None,
                      refine=refine).value


def order_csm(
    n1: int,
    n2: int,
    variant: str = "bottom_up",
    grid_points: int = 1001,
    refine: bool = True,
    max_points: int = 2000,
) -> SampleSpaceOrdering:
    """Iteratively constructed convexity-symmetry-maximum ordering.

    Starting from the most extreme point ([n1, 0] bottom-up, [0, n2]
    top-down, the mirror pair for two_sided), repeatedly admit the
    convexity-preserving candidate whose cumulative region has the
    smallest supremum probability over theta1 = theta2, admitting all
    tied minimizers at the same rank.
    """
    if variant not in ("bottom_up", "top_down", "two_sided"):
        raise DomainError(f"unknown CSM variant {variant!r}")
    n_points = (n1 + 1) * (n2 + 1)
    if n_points > max_points:
        raise BudgetExceededError(
            f"CSM ordering over {n_points} sample points exceeds the budget "
            f"of {max_points}; raise max_points to override"
        )
    thetas = np.linspace(0.0, 1.0, grid_points)
    P1 = binom_pmf_matrix(n1, thetas)
    P2 = binom_pmf_matrix(n2, thetas)
    member = np.zeros((n1 + 1, n2 + 1), dtype=bool)
    rank = np.full((n1 + 1, n2 + 1), -1, dtype=np.int64)

    def admit(points, r):
        for p in points:
            member[p] = True
            rank[p] = r

    mirror = lambda p: (n1 - p[0], n2 - p[1])
    if variant == "bottom_up":
        admit([(n1, 0)], 0)
    elif variant == "top_down":
        admit([(0, n2)], 0)
    else:
        start = {(n1, 0), mirror((n1, 0))}
        admit(sorted(start), 0)

    next_rank = 1
    memberf = member.astype(float)
    while not member.all():
        if variant == "two_sided":
            cands = _bc_candidates(member, bottom=True)
            groups = sorted({tuple(sorted({c, mirror(c)})) for c in cands})
        else:
            bottom = variant == "bottom_up"
            groups = [(c,) for c in _bc_candidates(member, bottom=bottom)]
        best = math.inf
        pvals = []
        for g in groups:
            for p in g:
                memberf[p] = 1.0
            v = _equality_sup(memberf, n1, n2, P1, P2, thetas, refine)
            for p in g:
                memberf[p] = 0.0
            pvals.append(v)
            best = min(best, v)
        tol = 1e-9 * max(1.0, best)
        chosen = [g for g, v in zip(groups, pvals) if v <= best + tol]
        for g in chosen:
            admit(g, next_rank)
            for p in g:
                memberf[p] = 1.0
        next_rank += 1

    if variant == "top_down":
        rank = (next_rank - 1) - rank
    flat = rank[rank >= 0]
    # densify: tie admission can skip rank labels
    kept = np.unique(flat)
    remap = np.zeros(kept.max() + 1, dtype=np.int64)
    remap[kept] = np.arange(len(kept))
    rank = np.where(rank >= 0, remap[np.clip(rank, 0, None)], -1)

    mask = np.ones((n1 + 1, n2 + 1), dtype=bool)
    two_sided = variant == "two_sided"
    t = rank.astype(float)
    return _finalize(
        n1, n2, t, mask, rank, f"csm:{variant}",
        two_sided=two_sided, certify=not two_sided,
    )


def csm_orderings_equivalent(a: SampleSpaceOrdering, b: SampleSpaceOrdering) -> bool:
    """Whether two CSM constructions produced the same ranking."""
    if a.shape != b.shape:
        raise DomainError("orderings must share the grid")
    return bool(np.array_equal(a.rank, b.rank))
