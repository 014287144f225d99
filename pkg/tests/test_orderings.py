import dataclasses
import math

import numpy as np
import pytest

from twobinom.core import BudgetExceededError, DomainError, Measure
from twobinom.orderings import (
    SampleSpaceOrdering,
    check_bc,
    csm_orderings_equivalent,
    is_refinement,
    order_csm,
    order_diff,
    order_diff_tiebreak,
    order_estimate,
    order_fisher_midp,
    order_score,
    order_wald_pooled,
    ordering_to_csv,
    _bc_candidates,
)


def _mirror_rank_reversed(ordering):
    n1, n2 = ordering.n1, ordering.n2
    top = ordering.n_ranks - 1
    for i in range(n1 + 1):
        for j in range(n2 + 1):
            if not ordering.mask[i, j]:
                continue
            mi, mj = n1 - i, n2 - j
            if ordering.rank[mi, mj] != top - ordering.rank[i, j]:
                return False
    return True


class TestDiffOrdering:
    def test_four_way_tie(self):
        od = order_diff(8, 8)
        assert od.t[0, 5] == pytest.approx(5 / 8)
        r = od.rank
        assert r[0, 5] == r[1, 6] == r[2, 7] == r[3, 8]

    def test_unique_minimum(self):
        od = order_diff(6, 4)
        assert (od.rank == 0).sum() == 1
        assert od.rank[6, 0] == 0

    def test_bc_certified(self):
        assert order_diff(9, 7).bc_certified

    def test_symmetry_equivariance(self):
        assert _mirror_rank_reversed(order_diff(8, 8))
        assert _mirror_rank_reversed(order_diff(9, 7))


class TestTiebreak:
    def test_pairs_stay_tied_but_separate(self):
        tb = order_diff_tiebreak(8, 8)
        r = tb.rank
        assert r[0, 5] == r[3, 8]
        assert r[1, 6] == r[2, 7]
        assert r[0, 5] != r[1, 6]

    def test_refines_diff(self):
        assert is_refinement(order_diff_tiebreak(8, 8), order_diff(8, 8))
        assert not is_refinement(order_diff(8, 8), order_diff_tiebreak(8, 8))

    def test_self_refinement(self):
        od = order_diff(5, 7)
        assert is_refinement(od, od)

    def test_bc_still_met(self):
        assert order_diff_tiebreak(8, 8).bc_certified
        assert order_diff_tiebreak(12, 5).bc_certified

    def test_bc_and_refinement_sweep(self):
        for n1 in range(1, 13):
            for n2 in range(1, 13):
                fine = order_diff_tiebreak(n1, n2)
                assert fine.bc_certified, (n1, n2)
                assert is_refinement(fine, order_diff(n1, n2)), (n1, n2)

    def test_symmetry_equivariance(self):
        assert _mirror_rank_reversed(order_diff_tiebreak(8, 8))
        assert _mirror_rank_reversed(order_diff_tiebreak(9, 4))


class TestWaldPooled:
    def test_degenerate_variance_is_zero(self):
        ow = order_wald_pooled(6, 5)
        assert ow.t[6, 5] == 0.0
        assert ow.t[0, 0] == 0.0

    def test_extreme_point_is_max(self):
        ow = order_wald_pooled(8, 8)
        assert ow.rank[0, 8] == ow.n_ranks - 1

    def test_sign_matches_difference(self):
        ow = order_wald_pooled(7, 5)
        for i in range(8):
            for j in range(6):
                d = j / 5 - i / 7
                z = ow.t[i, j]
                if d > 0:
                    assert z > 0
                elif d < 0:
                    assert z < 0
                else:
                    assert z == 0


class TestScore:
    def test_equality_matches_pooled_ranking(self):
        ow = order_wald_pooled(9, 7)
        osc = order_score(9, 7, Measure.DIFFERENCE, 0.0)
        assert np.array_equal(osc.rank, ow.rank)

    def test_equality_matches_pooled_ranking_ratio_or(self):
        ow = order_wald_pooled(9, 7)
        for meas in (Measure.RATIO, Measure.ODDS_RATIO):
            osc = order_score(9, 7, meas, 1.0)
            m = osc.mask
            a = osc.rank[m]
            b = ow.rank[m]
            # same dense ranking on the informative points
            _, ia = np.unique(a, return_inverse=True)
            _, ib = np.unique(b, return_inverse=True)
            assert np.array_equal(ia, ib)

    def test_infeasible_beta0(self):
        with pytest.raises(DomainError):
            order_score(5, 5, Measure.DIFFERENCE, 1.0)
        with pytest.raises(DomainError):
            order_score(5, 5, Measure.RATIO, 0.0)

    def test_bc_at_general_beta0(self):
        assert order_score(8, 6, Measure.DIFFERENCE, 0.2).bc_certified
        assert order_score(8, 6, Measure.RATIO, 1.5).bc_certified
        assert order_score(8, 6, Measure.ODDS_RATIO, 2.0).bc_certified


class TestFisherMidp:
    def test_refines_within_diagonal(self):
        om = order_fisher_midp(7, 6)
        for s in range(1, 13):
            prev = None
            for x2 in range(max(0, s - 7), min(s, 6) + 1):
                x1 = s - x2
                cur = om.t[x1, x2]
                if prev is not None:
                    assert cur > prev
                prev = cur

    def test_bc_certified_at_ten(self):
        assert order_fisher_midp(10, 10).bc_certified

    def test_direction_flip(self):
        og = order_fisher_midp(5, 4, "greater")
        ol = order_fisher_midp(5, 4, "less")
        assert np.array_equal(ol.rank, og.n_ranks - 1 - og.rank)


class TestEstimateOrdering:
    def test_ratio_masks_double_zero(self):
        oe = order_estimate(6, 5, Measure.RATIO)
        assert not oe.mask[0, 0]
        assert oe.mask.sum() == 7 * 6 - 1

    def test_oddsratio_masks_both_corners(self):
        oe = order_estimate(6, 5, Measure.ODDS_RATIO)
        assert not oe.mask[0, 0]
        assert not oe.mask[6, 5]

    def test_difference_masks_nothing(self):
        oe = order_estimate(6, 5, Measure.DIFFERENCE)
        assert oe.mask.all()
        assert np.array_equal(oe.rank, order_diff_tiebreak(6, 5).rank)

    def test_bc_certified(self):
        for meas in Measure:
            assert order_estimate(7, 5, meas).bc_certified, meas

    def test_ratio_not_symmetry_equivariant(self):
        # mirroring the data does not reverse the ranking for the ratio
        oe = order_estimate(8, 8, Measure.RATIO)
        assert not _mirror_rank_reversed(oe)

    def test_oddsratio_symmetry_equivariant(self):
        assert _mirror_rank_reversed(order_estimate(8, 8, Measure.ODDS_RATIO))
        assert _mirror_rank_reversed(order_estimate(9, 5, Measure.ODDS_RATIO))


class TestCheckBC:
    def test_constructed_counterexample(self):
        od = order_diff(5, 4)
        rank = od.rank.copy()
        rank[0, 4] = -0  # will be replaced below
        # force the global maximum point to look like the minimum
        rank[0, 4] = 0
        broken = dataclasses.replace(od, rank=rank)
        report = check_bc(broken)
        assert not report.passed
        assert report.violation is not None
        (a, b) = report.violation
        # the violating pair involves the tampered point's row or column
        assert a[0] == 0 or b[0] == 0 or a[1] == 4 or b[1] == 4

    def test_mask_mismatch_rejected(self):
        with pytest.raises(DomainError):
            is_refinement(
                order_estimate(5, 4, Measure.RATIO), order_diff(5, 4)
            )


class TestCSM:
    def test_first_region_and_candidates(self):
        member = np.zeros((6, 5), dtype=bool)
        member[5, 0] = True
        assert _bc_candidates(member, bottom=True) == [(4, 0), (5, 1)]

    def test_bottom_up_start(self):
        cs = order_csm(5, 4, grid_points=301)
        assert cs.rank[5, 0] == 0
        assert cs.bc_certified

    def test_top_down_start(self):
        cs = order_csm(5, 4, variant="top_down", grid_points=301)
        assert cs.rank[0, 4] == cs.n_ranks - 1
        assert cs.bc_certified

    def test_two_sided_symmetric_ranks(self):
        cs = order_csm(5, 4, variant="two_sided", grid_points=301)
        assert cs.two_sided
        for i in range(6):
            for j in range(5):
                assert cs.rank[i, j] == cs.rank[5 - i, 4 - j]

    def test_comparison_utility(self):
        bu = order_csm(4, 4, grid_points=301)
        td = order_csm(4, 4, variant="top_down", grid_points=301)
        result = csm_orderings_equivalent(bu, td)
        assert isinstance(result, bool)

    def test_budget_guard(self):
        with pytest.raises(BudgetExceededError):
            order_csm(80, 80)


class TestExportAndMask:
    def test_csv_grid(self):
        oe = order_estimate(3, 2, Measure.RATIO)
        csv = ordering_to_csv(oe)
        lines = csv.strip().split("\n")
        assert lines[0] == "x1\\x2,0,1,2"
        assert len(lines) == 5
        assert lines[1].split(",")[1] == "NA"  # the [0,0] cell

    def test_with_mask_preserves_order(self):
        base = order_fisher_midp(5, 4)
        from twobinom.core import informative_mask

        masked = base.with_mask(informative_mask(Measure.RATIO, 5, 4))
        assert not masked.mask[0, 0]
        # relative order preserved among kept points
        keep = masked.mask
        a = base.rank[keep]
        b = masked.rank[keep]
        assert np.array_equal(np.argsort(a, kind="stable"), np.argsort(b, kind="stable"))
