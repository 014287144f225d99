import math

import numpy as np
import pytest

from twobinom.core import Measure, TwoByTwoData
from twobinom.catalog import make_method
from twobinom.opchar import (
    OperatingGrid,
    band_summary,
    exact_power,
    exact_size,
    expected_ci_length,
    midp_size_census,
    power_grid,
)


class TestExactPower:
    def test_one_sided_fisher_closed_form(self):
        m = make_method("fisher-onesided", Measure.ODDS_RATIO)
        power = exact_power(m, 4, 4, 0.2, 0.9, 0.025, "greater")
        assert power == pytest.approx((1 - 0.2) ** 4 * 0.9**4, abs=1e-10)
        assert power == pytest.approx(0.4096 * 0.6561, abs=1e-6)

    def test_power_nonmonotone_in_n2_for_fisher(self):
        m = make_method("fisher-onesided", Measure.ODDS_RATIO)
        p44 = exact_power(m, 4, 4, 0.2, 0.9, 0.025, "greater")
        p45 = exact_power(m, 4, 5, 0.2, 0.9, 0.025, "greater")
        assert p45 == pytest.approx((1 - 0.2) ** 4 * 0.9**5, abs=1e-10)
        assert p45 < p44

    def test_two_sided_score_reference_powers(self):
        m = make_method("uncond-score", Measure.DIFFERENCE)
        p97 = exact_power(m, 9, 7, 0.4, 0.9, 0.05, "two_sided_minlike", 0.0)
        p98 = exact_power(m, 9, 8, 0.4, 0.9, 0.05, "two_sided_minlike", 0.0)
        assert p97 == pytest.approx(0.619, abs=5e-3)
        assert p98 == pytest.approx(0.537, abs=5e-3)
        assert p97 > p98

    def test_size_bounded_under_null(self):
        m = make_method("fisher-central", Measure.ODDS_RATIO)
        for th in (0.2, 0.5, 0.8):
            assert exact_power(m, 6, 6, th, th, 0.05, "two_sided_central") <= 0.05


class TestExactSize:
    def test_central_fisher_valid(self):
        m = make_method("fisher-central", Measure.ODDS_RATIO)
        rep = exact_size(m, 8, 8, 0.05, alternative="two_sided_central",
                         measure=Measure.DIFFERENCE)
        assert rep.size <= 0.05 + 1e-12

    def test_alpha_zero_size_zero(self):
        m = make_method("fisher-central", Measure.ODDS_RATIO)
        rep = exact_size(m, 5, 5, 1e-12, alternative="two_sided_central",
                         measure=Measure.DIFFERENCE)
        assert rep.size <= 1e-12

    def test_midp_exceedance_reported(self):
        m = make_method("fisher-irwin", Measure.ODDS_RATIO, midp=True)
        census = midp_size_census(m, range(3, 7), np.linspace(0.1, 0.9, 9))
        assert 0.0 <= census["fraction_within_nominal"] <= 1.0
        assert census["scenarios"] == 16 * 9


class TestPowerDominance:
    def test_boschloo_rejections_contain_fisher(self):
        alpha = 0.05
        for n1, n2 in [(5, 5), (6, 4), (8, 8)]:
            mb = make_method("boschloo", Measure.ODDS_RATIO, variant="irwin")
            mf = make_method("fisher-irwin", Measure.ODDS_RATIO)
            Rb = mb.rejection_set(n1, n2, alpha, 1.0, "two_sided_minlike")
            Rf = mf.rejection_set(n1, n2, alpha, 1.0, "two_sided_minlike")
            assert (Rb | ~Rf).all()  # Rf subset of Rb

    def test_power_ordering_on_grid(self):
        mb = make_method("boschloo", Measure.ODDS_RATIO, variant="irwin")
        mf = make_method("fisher-irwin", Measure.ODDS_RATIO)
        for t1 in (0.2, 0.5):
            for t2 in (0.6, 0.9):
                pb = exact_power(mb, 6, 6, t1, t2, 0.05, "two_sided_minlike", 1.0)
                pf = exact_power(mf, 6, 6, t1, t2, 0.05, "two_sided_minlike", 1.0)
                assert pb >= pf - 1e-12


class TestPowerGrid:
    def test_method_vs_itself_all_zero(self):
        m = make_method("fisher-central", Measure.ODDS_RATIO)
        grid = np.linspace(0.1, 0.9, 9)
        og = power_grid((m, m), 5, 5, 0.05, grid, "two_sided_central")
        assert np.allclose(og.values, 0.0)
        summary = band_summary(og)
        assert summary["fraction_within_band"] == 1.0

    def test_csv_format(self):
        m = make_method("fisher-central", Measure.ODDS_RATIO)
        og = power_grid(m, 4, 4, 0.05, np.array([0.25, 0.5, 0.75]),
                        "two_sided_central")
        lines = og.to_csv().strip().split("\n")
        assert lines[0].startswith("theta1\\theta2,")
        assert len(lines) == 4
        assert len(lines[1].split(",")) == 4


class TestExpectedLength:
    def test_four_table_hand_oracle(self):
        # n1 = n2 = 1: enumerate the four tables by hand
        m = make_method("melded", Measure.DIFFERENCE)
        t1, t2, level = 0.3, 0.6, 0.9
        want = 0.0
        for x1 in (0, 1):
            for x2 in (0, 1):
                w = (t1 if x1 else 1 - t1) * (t2 if x2 else 1 - t2)
                ci = m.ci(TwoByTwoData(x1, 1, x2, 1), level)
                want += w * (ci.upper - ci.lower)
        got = expected_ci_length(m, 1, 1, t1, t2, level)
        assert not got.truncated
        assert got.value == pytest.approx(want, abs=1e-12)

    def test_melded_shorter_than_conditional_derived(self):
        from twobinom.conditional import conditional_ci_oddsratio, santner_diff_bound
        from twobinom.core import ConfidenceInterval

        class CondDerived:
            """Difference interval implied by the conditional odds-ratio
            interval through the extremal-difference transform."""

            def ci(self, data, level):
                cond = conditional_ci_oddsratio(data, level)
                upper = santner_diff_bound(cond.upper)
                if cond.lower <= 0:
                    lower = -1.0
                else:
                    lower = -santner_diff_bound(1.0 / cond.lower)
                return ConfidenceInterval(lower, upper, level)

        m = make_method("melded", Measure.DIFFERENCE)
        got_m = expected_ci_length(m, 12, 15, 0.3, 0.6, 0.95)
        got_c = expected_ci_length(CondDerived(), 12, 15, 0.3, 0.6, 0.95)
        assert got_m.value <= got_c.value

    def test_level_toward_one_covers_range(self):
        m = make_method("melded", Measure.DIFFERENCE)
        l95 = expected_ci_length(m, 3, 3, 0.5, 0.5, 0.95).value
        l999 = expected_ci_length(m, 3, 3, 0.5, 0.5, 0.999).value
        assert l999 > l95
        assert l999 > 1.5  # approaching the full width of 2

    def test_infinite_length_flagging(self):
        m = make_method("melded", Measure.RATIO)
        res = expected_ci_length(m, 3, 3, 0.5, 0.5, 0.95)
        assert math.isinf(res.value)
        res_t = expected_ci_length(m, 3, 3, 0.5, 0.5, 0.95, truncate_at=100.0)
        assert res_t.truncated and math.isfinite(res_t.value)
