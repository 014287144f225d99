import math

import numpy as np
import pytest

from twobinom.core import ConfidenceInterval, DomainError, Measure, TwoByTwoData
from twobinom.catalog import make_method
from twobinom.conditional import fisher_central
from twobinom.triples import (
    ConfidenceRegion,
    Decision,
    InferenceResult,
    check_coherence,
    check_compatibility,
    check_nestedness,
    clamp_estimate,
    confidence_region,
    matching_ci,
    three_decision,
)

D = TwoByTwoData(8, 14, 1, 7)


class TestConfidenceRegion:
    def test_two_island_pfun(self):
        # an analytic p-value surface with two separated bumps
        def pfun(_data, b):
            return max(math.exp(-((b - 0.3) ** 2) / 0.001),
                       0.4 * math.exp(-((b - 0.8) ** 2) / 0.0005))

        grid = np.linspace(0.0, 1.0, 801)
        region = confidence_region(pfun, D, 0.90, grid)
        assert len(region.intervals) == 2
        (a1, b1), (a2, b2) = region.intervals
        # analytic crossings of each bump with alpha = 0.1
        w1 = math.sqrt(-0.001 * math.log(0.1))
        w2 = math.sqrt(-0.0005 * math.log(0.25))
        assert a1 == pytest.approx(0.3 - w1, abs=1e-5)
        assert b1 == pytest.approx(0.3 + w1, abs=1e-5)
        assert a2 == pytest.approx(0.8 - w2, abs=1e-5)
        assert b2 == pytest.approx(0.8 + w2, abs=1e-5)

    def test_level_to_one_gives_full_range(self):
        # as the level rises toward 1 the region swallows the whole grid
        pfun = lambda _d, b: 0.5
        grid = np.linspace(-1, 1, 11)
        region = confidence_region(pfun, D, 0.99, grid)
        assert region.intervals == ((-1.0, 1.0),)
        # and an unattainable level empties it
        assert confidence_region(pfun, D, 0.25, grid).intervals == ()

    def test_matching_ci_fills_holes(self):
        region = ConfidenceRegion(((0.1, 0.4), (0.6, 0.7)), 0.95, 0.01)
        ci = matching_ci(region)
        assert ci.lower == 0.1 and ci.upper == 0.7
        assert ci.holes_filled

    def test_matching_ci_single_interval_identity(self):
        region = ConfidenceRegion(((0.2, 0.9),), 0.95, 0.01)
        ci = matching_ci(region)
        assert (ci.lower, ci.upper) == (0.2, 0.9)
        assert not ci.holes_filled

    def test_empty_region_rejected(self):
        with pytest.raises(DomainError):
            matching_ci(ConfidenceRegion((), 0.95, 0.01))


class TestCompatibility:
    def test_central_fisher_triple_compatible(self):
        method = make_method("fisher-central", Measure.ODDS_RATIO)
        grid = np.geomspace(0.002, 30, 101)
        report = check_compatibility(method, D, [0.90, 0.95], grid)
        assert report.compatible, report.violations[:3]
        assert report.checked > 150

    def test_fisher_irwin_incompatibility_found(self):
        method = make_method("fisher-irwin", Measure.ODDS_RATIO)
        data = TwoByTwoData(30, 494, 7, 262)
        grid = np.geomspace(0.9, 1.1, 81)
        report = check_compatibility(method, data, [0.95], grid)
        assert not report.compatible
        # the filled-in hole contains the equality null
        assert any(abs(v.beta0 - 1.0) < 0.02 and v.in_interval
                   for v in report.violations)

    def test_boundary_convention_reject_at_alpha(self):
        class Stub:
            def pvalue(self, _d, b):
                return 0.05

            def ci(self, _d, level):
                return ConfidenceInterval(10.0, 11.0, level)

        report = check_compatibility(Stub(), D, [0.95], np.array([1.0, 2.0]))
        # p = alpha rejects, and both grid points sit outside the interval
        assert report.compatible


class TestNestedness:
    def test_melded_nested(self):
        method = make_method("melded", Measure.DIFFERENCE)
        report = check_nestedness(method, D, [0.8, 0.9, 0.95, 0.99])
        assert report.nested

    def test_conditional_nested(self):
        method = make_method("fisher-central", Measure.ODDS_RATIO)
        report = check_nestedness(method, D, [0.8, 0.9, 0.95, 0.99])
        assert report.nested

    def test_alpha_dependent_mock_violates(self):
        class NonNested:
            def ci(self, _d, level):
                # deliberately pathological: higher confidence narrows one end
                if level >= 0.95:
                    return ConfidenceInterval(-0.442, 1.0, level)
                return ConfidenceInterval(-0.467, 1.0, level)

        report = check_nestedness(NonNested(), D, [0.90, 0.96])
        assert not report.nested
        assert report.violations == ((0.90, 0.96),)


class TestCoherence:
    def test_monotone_pfun_coherent(self):
        pfun = lambda _d, b: min(1.0, math.exp(-3 * b))
        grid = np.linspace(0.0, 1.0, 51)
        assert check_coherence(pfun, D, grid, "less").coherent

    def test_constructed_violation_reported(self):
        def pfun(_d, b):
            return 0.03 if abs(b - 0.5) < 0.05 else max(0.01, 1 - b)

        grid = np.linspace(0.0, 1.0, 101)
        report = check_coherence(pfun, D, grid, "less")
        assert not report.coherent
        assert report.violations

    def test_two_sided_directional(self):
        beta_hat = 0.3

        def pfun(_d, b):
            return math.exp(-((b - beta_hat) ** 2))

        grid = np.linspace(-1, 1, 81)
        report = check_coherence(pfun, D, grid, "two_sided", beta_hat=beta_hat)
        assert report.coherent

    def test_conditional_one_sided_coherent(self):
        from twobinom.conditional import fisher_onesided
        from twobinom.core import Alternative, Hypothesis, Measure

        def pfun(d, b):
            return fisher_onesided(
                d, Hypothesis(Measure.ODDS_RATIO, b, Alternative.LESS))

        grid = np.geomspace(0.01, 100, 101)
        assert check_coherence(pfun, D, grid, "less").coherent


class TestThreeDecision:
    def _result(self, p_less, p_greater):
        return InferenceResult(
            estimate=0.2,
            ci=ConfidenceInterval(-0.1, 0.5, 0.95),
            p_less=p_less,
            p_greater=p_greater,
            p_two_sided=min(1.0, 2 * min(p_less, p_greater)),
            method="stub",
        )

    def test_small_less_tail_concludes_less(self):
        out = three_decision(self._result(0.01, 0.99), 0.05)
        assert out.decision is Decision.CONCLUDE_LESS

    def test_both_large_fails_to_reject(self):
        out = three_decision(self._result(0.4, 0.7), 0.05)
        assert out.decision is Decision.FAIL_TO_REJECT

    def test_worked_example_fails_to_reject(self):
        p_c = fisher_central(D, 1.0)
        assert p_c == pytest.approx(0.157, abs=5e-4)
        from twobinom.conditional import fisher_onesided
        from twobinom.core import Alternative, Hypothesis

        res = InferenceResult(
            estimate=D.estimate(Measure.ODDS_RATIO),
            ci=ConfidenceInterval(0.002, 1.62, 0.95),
            p_less=fisher_onesided(
                D, Hypothesis(Measure.ODDS_RATIO, 1.0, Alternative.LESS)),
            p_greater=fisher_onesided(
                D, Hypothesis(Measure.ODDS_RATIO, 1.0, Alternative.GREATER)),
            p_two_sided=p_c,
            method="fisher-central",
        )
        assert three_decision(res, 0.05).decision is Decision.FAIL_TO_REJECT


class TestEstimateClamping:
    def test_inside_untouched(self):
        ci = ConfidenceInterval(0.1, 0.9, 0.95)
        assert clamp_estimate(0.5, ci) == (0.5, False)

    def test_undefined_lands_inside(self):
        ci = ConfidenceInterval(0.0, math.inf, 0.95)
        est, clamped = clamp_estimate(float("nan"), ci)
        assert clamped and ci.lower <= est
