import dataclasses
import math

import numpy as np
import pytest

from twobinom.core import (
    Alternative,
    DomainError,
    Hypothesis,
    Measure,
    TwoByTwoData,
)
from twobinom.conditional import fisher_irwin
from twobinom.distributions import binom_pmf_vector
from twobinom.orderings import (
    order_diff,
    order_diff_tiebreak,
    order_estimate,
    order_fisher_midp,
    order_score,
)
from twobinom.unconditional import (
    NullBoundary,
    OrderingFamily,
    UncondOptions,
    boschloo,
    boschloo_ordering,
    em_adjust,
    em_ordering,
    uncond_ci,
    uncond_pvalue_onesided,
    uncond_pvalue_twosided,
    uncond_pvalues_table,
)

from _naive import naive_uncond_pvalue

GRID_ONLY = UncondOptions(refine=False)


class TestBasics:
    def test_masked_point_reports_one(self):
        ordering = order_estimate(5, 6, Measure.RATIO)
        hyp = Hypothesis(Measure.RATIO, 1.0, Alternative.GREATER)
        assert uncond_pvalue_onesided(
            TwoByTwoData(0, 5, 0, 6), hyp, ordering
        ) == 1.0

    def test_most_extreme_point_closed_form(self):
        # the lone rejection point has probability theta^4 (1-theta)^4,
        # maximized at one half
        ordering = order_diff(4, 4)
        hyp = Hypothesis(Measure.DIFFERENCE, 0.0, Alternative.LESS)
        p = uncond_pvalue_onesided(TwoByTwoData(4, 4, 0, 4), hyp, ordering)
        assert p == pytest.approx(0.5**8, abs=1e-10)

    def test_deepest_null_point_is_one(self):
        ordering = order_diff(4, 4)
        hyp = Hypothesis(Measure.DIFFERENCE, 0.0, Alternative.LESS)
        p = uncond_pvalue_onesided(TwoByTwoData(0, 4, 4, 4), hyp, ordering)
        assert p == 1.0

    def test_two_sided_needs_two_sided_ordering(self):
        hyp = Hypothesis(Measure.DIFFERENCE, 0.0, Alternative.TWO_SIDED_MINLIKE)
        with pytest.raises(DomainError):
            uncond_pvalue_twosided(
                TwoByTwoData(2, 4, 3, 4), hyp, order_diff(4, 4)
            )


class TestRefinementDominance:
    def test_pointwise_at_eight(self):
        coarse = order_diff(8, 8)
        fine = order_diff_tiebreak(8, 8)
        for tail in ("le", "ge"):
            pc = uncond_pvalues_table(coarse, Measure.DIFFERENCE, 0.0, tail, GRID_ONLY)
            pf = uncond_pvalues_table(fine, Measure.DIFFERENCE, 0.0, tail, GRID_ONLY)
            assert (pf <= pc + 1e-12).all()

    def test_exhaustive_small_designs(self):
        for n1, n2 in [(3, 5), (6, 4), (7, 7)]:
            coarse = order_diff(n1, n2)
            fine = order_diff_tiebreak(n1, n2)
            for tail in ("le", "ge"):
                pc = uncond_pvalues_table(
                    coarse, Measure.DIFFERENCE, 0.0, tail, GRID_ONLY)
                pf = uncond_pvalues_table(
                    fine, Measure.DIFFERENCE, 0.0, tail, GRID_ONLY)
                assert (pf <= pc + 1e-12).all()


class TestBoschloo:
    def test_dominates_fisher_irwin(self):
        n1 = n2 = 8
        ordering = boschloo_ordering(n1, n2, 1.0, "irwin")
        table = uncond_pvalues_table(
            ordering, Measure.ODDS_RATIO, 1.0, "le", GRID_ONLY)
        for x1 in range(n1 + 1):
            for x2 in range(n2 + 1):
                p_cond = fisher_irwin(TwoByTwoData(x1, n1, x2, n2), 1.0)
                assert table[x1, x2] <= p_cond + 1e-10

    def test_single_point_value(self):
        d = TwoByTwoData(7, 8, 2, 8)
        p_b = boschloo(d, 1.0, "irwin")
        assert p_b <= fisher_irwin(d, 1.0) + 1e-12
        assert 0.0 < p_b <= 1.0

    def test_deepest_point_is_one(self):
        # the conditional p-value equals 1 at the modal point, so the
        # unconditional version also reports 1 there
        n1 = n2 = 6
        ordering = boschloo_ordering(n1, n2, 1.0, "irwin")
        d = TwoByTwoData(3, 6, 3, 6)
        hyp = Hypothesis(Measure.ODDS_RATIO, 1.0, Alternative.TWO_SIDED_MINLIKE)
        assert uncond_pvalue_twosided(d, hyp, ordering) == pytest.approx(1.0, abs=1e-9)


class TestMonotonicity:
    def test_p_monotone_in_beta0_fixed_ordering(self):
        ordering = order_diff_tiebreak(6, 5)
        d = TwoByTwoData(2, 6, 4, 5)
        grid = np.linspace(-0.9, 0.9, 101)
        p_less = [
            uncond_pvalue_onesided(
                d, Hypothesis(Measure.DIFFERENCE, b, Alternative.LESS),
                ordering, GRID_ONLY)
            for b in grid
        ]
        p_greater = [
            uncond_pvalue_onesided(
                d, Hypothesis(Measure.DIFFERENCE, b, Alternative.GREATER),
                ordering, GRID_ONLY)
            for b in grid
        ]
        assert all(b <= a + 1e-9 for a, b in zip(p_less, p_less[1:]))
        assert all(b >= a - 1e-9 for a, b in zip(p_greater, p_greater[1:]))


class TestBergerBoos:
    def test_output_at_least_gamma(self):
        gamma = 1e-4
        opts = UncondOptions(berger_boos_gamma=gamma)
        ordering = order_diff_tiebreak(6, 6)
        for x1, x2 in [(0, 6), (3, 3), (6, 0)]:
            p = uncond_pvalue_onesided(
                TwoByTwoData(x1, 6, x2, 6),
                Hypothesis(Measure.DIFFERENCE, 0.0, Alternative.GREATER),
                ordering, opts,
            )
            assert p >= gamma

    def test_validity_with_adjustment(self):
        gamma = 1e-3
        alpha = 0.05
        n1 = n2 = 6
        ordering = order_diff_tiebreak(n1, n2)
        opts = UncondOptions(berger_boos_gamma=gamma)
        table = uncond_pvalues_table(
            ordering, Measure.DIFFERENCE, 0.0, "ge", opts, refine_level=alpha)
        R = (table <= alpha).astype(float)
        for th in np.linspace(0.01, 0.99, 41):
            p1 = binom_pmf_vector(n1, th)
            p2 = binom_pmf_vector(n2, th)
            assert float(p1 @ R @ p2) <= alpha + 2e-4

    def test_not_supported_without_boundary_search(self):
        ordering = dataclasses.replace(order_diff(4, 4), bc_certified=False)
        opts = UncondOptions(berger_boos_gamma=0.01)
        with pytest.raises(DomainError):
            uncond_pvalue_onesided(
                TwoByTwoData(1, 4, 3, 4),
                Hypothesis(Measure.DIFFERENCE, 0.0, Alternative.GREATER),
                ordering, opts,
            )


class TestEstimatedMaximized:
    def test_valid_size_small_design(self):
        alpha = 0.05
        n1 = n2 = 6
        base = order_diff_tiebreak(n1, n2)
        hyp = Hypothesis(Measure.DIFFERENCE, 0.0, Alternative.GREATER)
        ordering = em_ordering(hyp, base)
        table = uncond_pvalues_table(
            ordering, Measure.DIFFERENCE, 0.0, "ge",
            UncondOptions(), refine_level=alpha)
        R = (table <= alpha).astype(float)
        for th in np.linspace(0.01, 0.99, 41):
            p1 = binom_pmf_vector(n1, th)
            p2 = binom_pmf_vector(n2, th)
            assert float(p1 @ R @ p2) <= alpha + 2e-4

    def test_comparison_table_reported(self):
        # no fixed inequality holds pointwise; just tabulate both
        n1 = n2 = 8
        base = order_diff(n1, n2)
        hyp = Hypothesis(Measure.DIFFERENCE, 0.0, Alternative.GREATER)
        em = em_ordering(hyp, base)
        p_base = uncond_pvalues_table(base, Measure.DIFFERENCE, 0.0, "ge", GRID_ONLY)
        p_em = uncond_pvalues_table(em, Measure.DIFFERENCE, 0.0, "ge", GRID_ONLY)
        diff = p_em - p_base
        assert np.isfinite(diff).all()
        assert (p_em >= 0).all() and (p_em <= 1).all()

    def test_em_adjust_entry_point(self):
        d = TwoByTwoData(1, 5, 4, 6)
        hyp = Hypothesis(Measure.DIFFERENCE, 0.0, Alternative.GREATER)
        p = em_adjust(d, hyp, order_diff_tiebreak(5, 6))
        assert 0.0 < p <= 1.0


class TestNaiveOracle:
    @pytest.mark.parametrize(
        "n1,n2,measure,beta0",
        [
            (3, 2, Measure.DIFFERENCE, 0.0),
            (3, 2, Measure.DIFFERENCE, 0.2),
            (4, 5, Measure.DIFFERENCE, 0.0),
            (4, 4, Measure.RATIO, 1.5),
            (5, 3, Measure.ODDS_RATIO, 2.0),
        ],
    )
    def test_matches_independent_bruteforce(self, n1, n2, measure, beta0):
        if measure is Measure.DIFFERENCE:
            ordering = order_diff_tiebreak(n1, n2)
        else:
            ordering = order_estimate(n1, n2, measure)
        n_grid = 201
        opts = UncondOptions(grid_points=n_grid, refine=False)
        for tail, alt in (("le", Alternative.LESS), ("ge", Alternative.GREATER)):
            table = uncond_pvalues_table(ordering, measure, beta0, tail, opts)
            for x1 in range(n1 + 1):
                for x2 in range(n2 + 1):
                    want = naive_uncond_pvalue(
                        x1, n1, x2, n2, ordering.rank, ordering.mask,
                        measure.value, beta0, tail, n_grid,
                    )
                    assert table[x1, x2] == pytest.approx(min(1.0, want), abs=1e-10)


class TestFullRegionFallback:
    def test_uncertified_ordering_uses_full_search(self):
        ordering = order_diff_tiebreak(4, 4)
        broken = dataclasses.replace(ordering, bc_certified=False)
        d = TwoByTwoData(1, 4, 4, 4)
        hyp = Hypothesis(Measure.DIFFERENCE, 0.0, Alternative.GREATER)
        p_boundary = uncond_pvalue_onesided(d, hyp, ordering)
        p_full = uncond_pvalue_onesided(d, hyp, broken)
        # convexity puts the supremum on the boundary, so both agree
        assert p_full == pytest.approx(p_boundary, abs=2e-4)
        # forcing the full search on a certified ordering takes the same path
        p_forced = uncond_pvalue_onesided(
            d, hyp, ordering, UncondOptions(force_full_region=True))
        assert p_forced == pytest.approx(p_boundary, abs=2e-4)


class TestConfidenceLimits:
    def test_tiebreak_interval_inside_plain_interval(self):
        n1 = n2 = 8
        fam_fine = OrderingFamily.fixed(order_diff_tiebreak(n1, n2))
        fam_coarse = OrderingFamily.fixed(order_diff(n1, n2))
        opts = UncondOptions(grid_points=501)
        for x1 in range(0, n1 + 1, 2):
            for x2 in range(0, n2 + 1, 2):
                d = TwoByTwoData(x1, n1, x2, n2)
                fine = uncond_ci(d, Measure.DIFFERENCE, 0.95, fam_fine, opts).ci
                coarse = uncond_ci(d, Measure.DIFFERENCE, 0.95, fam_coarse, opts).ci
                assert fine.lower >= coarse.lower - 1e-6
                assert fine.upper <= coarse.upper + 1e-6

    def test_degenerate_zero_tables_interval_contains_zero(self):
        d = TwoByTwoData(0, 6, 0, 6)
        fam = OrderingFamily.fixed(order_diff_tiebreak(6, 6))
        res = uncond_ci(d, Measure.DIFFERENCE, 0.95, fam, UncondOptions(grid_points=301))
        assert res.ci.lower <= 0.0 <= res.ci.upper

    def test_masked_table_full_range(self):
        d = TwoByTwoData(0, 6, 0, 6)
        fam = OrderingFamily.fixed(order_estimate(6, 6, Measure.RATIO))
        res = uncond_ci(d, Measure.RATIO, 0.95, fam, UncondOptions(grid_points=301))
        assert res.ci.lower == 0.0
        assert math.isinf(res.ci.upper)

    def test_midp_ordering_interval_for_ratio(self):
        from twobinom.core import informative_mask

        base = order_fisher_midp(6, 6).with_mask(informative_mask(Measure.RATIO, 6, 6))
        d = TwoByTwoData(2, 6, 5, 6)
        res = uncond_ci(d, Measure.RATIO, 0.95, OrderingFamily.fixed(base),
                        UncondOptions(grid_points=301))
        assert 0.0 < res.ci.lower < d.estimate(Measure.RATIO) < res.ci.upper
