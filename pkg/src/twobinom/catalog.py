"""Named method catalog: one place that wires orderings, conditional,
melded, and unconditional machinery into the method identifiers the CLI
and the operating-characteristic sweeps use.

Each method object knows how to produce p-values, confidence intervals
(where the method supports them), and whole-sample-space rejection sets
(cached per design/level/null for power work).
"""

from __future__ import annotations

import dataclasses
from functools import lru_cache

import numpy as np

from . import conditional, melded, triples, unconditional
from .core import (
    Alternative,
    ConfidenceInterval,
    DomainError,
    Hypothesis,
    Measure,
    TwoByTwoData,
    UnsupportedCombinationError,
)
from .orderings import (
    SampleSpaceOrdering,
    order_csm,
    order_diff,
    order_diff_tiebreak,
    order_estimate,
    order_fisher_midp,
    order_score,
    order_score_twosided,
    order_wald_pooled,
)
from .core import informative_mask
from .unconditional import (
    OrderingFamily,
    UncondOptions,
    boschloo_ordering,
    em_ordering,
    uncond_ci,
    uncond_pvalue_onesided,
    uncond_pvalue_twosided,
    uncond_pvalues_table,
)

METHOD_IDS = (
    "fisher-onesided",
    "fisher-central",
    "fisher-irwin",
    "blaker",
    "melded",
    "uncond-diff",
    "uncond-diff-tb",
    "uncond-z-pooled",
    "uncond-estimate",
    "uncond-midp-fisher",
    "uncond-score",
    "boschloo",
    "csm",
)

_CONDITIONAL_IDS = ("fisher-onesided", "fisher-central", "fisher-irwin", "blaker")
_FIXED_ORDERING_IDS = (
    "uncond-diff", "uncond-diff-tb", "uncond-z-pooled",
    "uncond-estimate", "uncond-midp-fisher",
)

_REJECTION_CACHE: dict = {}


def _as_alternative(alt) -> Alternative:
    if isinstance(alt, Alternative):
        return alt
    try:
        return Alternative(str(alt))
    except ValueError:
        raise DomainError(
            f"unknown alternative {alt!r}; choose from "
            f"{[a.value for a in Alternative]}"
        ) from None


@lru_cache(maxsize=512)
def _fixed_ordering(method_id: str, measure: Measure, n1: int, n2: int,
                    csm_variant: str | None = None,
                    csm_max_points: int = 2000) -> SampleSpaceOrdering:
    if method_id == "uncond-diff":
        base = order_diff(n1, n2)
    elif method_id == "uncond-diff-tb":
        base = order_diff_tiebreak(n1, n2)
    elif method_id == "uncond-z-pooled":
        base = order_wald_pooled(n1, n2)
    elif method_id == "uncond-estimate":
        return order_estimate(n1, n2, measure)
    elif method_id == "uncond-midp-fisher":
        base = order_fisher_midp(n1, n2)
    elif method_id == "csm":
        base = order_csm(n1, n2, csm_variant or "bottom_up",
                         max_points=csm_max_points)
    else:  # pragma: no cover
        raise DomainError(f"no fixed ordering for {method_id}")
    mask = informative_mask(measure, n1, n2)
    if not mask.all():
        return base.with_mask(mask)
    return base


class Method:
    """A configured inference method from the catalog."""

    def __init__(
        self,
        method_id: str,
        measure: Measure = Measure.DIFFERENCE,
        midp: bool = False,
        berger_boos: float | None = None,
        em: bool = False,
        variant: str | None = None,
        grid_points: int = 1001,
        csm_max_points: int = 2000,
    ):
        if method_id not in METHOD_IDS:
            raise DomainError(
                f"unknown method {method_id!r}; supported methods: "
                f"{', '.join(METHOD_IDS)}"
            )
        measure = Measure(measure)
        if method_id in _CONDITIONAL_IDS and measure is not Measure.ODDS_RATIO:
            # conditional tests reduce to one parameter only for the odds
            # ratio; at equality nulls other measures coincide, so accept
            # them but general beta0 will be rejected downstream
            pass
        if method_id in ("uncond-diff", "uncond-diff-tb", "uncond-z-pooled") and (
            measure is not Measure.DIFFERENCE
        ):
            raise DomainError(f"{method_id} orders by the rate difference; "
                              f"use measure=difference")
        if midp and method_id in ("melded", *_FIXED_ORDERING_IDS, "uncond-score", "csm"):
            if method_id != "uncond-midp-fisher":
                raise DomainError(
                    f"--midp does not apply to {method_id}; mid-p variants "
                    "exist for the conditional tests and boschloo, and "
                    "uncond-midp-fisher uses the mid-p ordering"
                )
        if (berger_boos is not None or em) and method_id in (
            *_CONDITIONAL_IDS, "melded"
        ):
            raise DomainError(
                "Berger-Boos and E+M adjustments apply to unconditional "
                f"methods, not {method_id}"
            )
        if em and method_id in ("csm", "boschloo"):
            raise DomainError(f"E+M is not supported for {method_id}")
        if method_id == "boschloo" and variant not in (None, "irwin", "central", "onesided"):
            raise DomainError(f"unknown boschloo variant {variant!r}")
        if method_id == "csm" and variant not in (None, "bottom_up", "top_down", "two_sided"):
            raise DomainError(f"unknown csm variant {variant!r}")
        self.id = method_id
        self.measure = measure
        self.midp = midp
        self.variant = variant or ("irwin" if method_id == "boschloo" else None) or (
            "bottom_up" if method_id == "csm" else None
        )
        self.opts = UncondOptions(
            berger_boos_gamma=berger_boos,
            em_iterations=1 if em else 0,
            grid_points=grid_points,
        )
        self.csm_max_points = csm_max_points

    # -- identity ----------------------------------------------------------

    @property
    def name(self) -> str:
        bits = [self.id]
        if self.variant and self.id in ("boschloo", "csm"):
            bits.append(self.variant)
        if self.midp:
            bits.append("midp")
        if self.opts.berger_boos_gamma is not None:
            bits.append(f"bb{self.opts.berger_boos_gamma:g}")
        if self.opts.em_iterations:
            bits.append("em")
        return "-".join(bits)

    @property
    def cache_key(self):
        return (
            self.id, self.measure.value, self.midp, self.variant,
            self.opts.berger_boos_gamma, self.opts.em_iterations,
            self.opts.grid_points,
        )

    @property
    def central(self) -> bool:
        return self.id in (
            "fisher-onesided", "fisher-central", "melded",
            *_FIXED_ORDERING_IDS,
        )

    def default_beta0(self) -> float:
        return self.measure.equality_value

    # -- p-values ----------------------------------------------------------

    def pvalue(
        self,
        data: TwoByTwoData,
        beta0: float | None = None,
        alternative=None,
    ) -> float:
        """p-value at the null beta0; the default alternative is the
        method's canonical two-sided form."""
        beta0 = self.default_beta0() if beta0 is None else beta0
        alt = self._normalize_alt(alternative)
        mode = "mid" if self.midp else "full"

        if self.id in _CONDITIONAL_IDS:
            return self._conditional_pvalue(data, beta0, alt, mode)
        if self.id == "melded":
            if alt.one_sided:
                return melded.meld_pvalue(data, Hypothesis(self.measure, beta0, alt))
            return melded.meld_pvalue_central(data, self.measure, beta0)
        if self.id == "boschloo":
            if self.variant == "onesided":
                if not alt.one_sided:
                    p_lo = unconditional.boschloo(
                        data, beta0, "onesided", self.opts, Alternative.LESS, mode)
                    p_hi = unconditional.boschloo(
                        data, beta0, "onesided", self.opts, Alternative.GREATER, mode)
                    return min(1.0, 2.0 * p_lo, 2.0 * p_hi)
                return unconditional.boschloo(
                    data, beta0, "onesided", self.opts, alt, mode)
            return unconditional.boschloo(data, beta0, self.variant, self.opts, alt, mode)
        if self.id == "uncond-score":
            return self._score_pvalue(data, beta0, alt)
        # fixed-ordering unconditional methods (incl. csm)
        ordering = self._ordering(data.n1, data.n2)
        if self.id == "csm" and self.variant == "two_sided":
            if alt.one_sided:
                raise DomainError("two-sided CSM produces two-sided p-values")
            return uncond_pvalue_twosided(
                data, Hypothesis(self.measure, beta0, alt), ordering, self.opts
            )
        if alt.one_sided:
            return uncond_pvalue_onesided(
                data, Hypothesis(self.measure, beta0, alt), ordering, self.opts
            )
        if alt is Alternative.TWO_SIDED_CENTRAL:
            p_lo = uncond_pvalue_onesided(
                data, Hypothesis(self.measure, beta0, Alternative.LESS),
                ordering, self.opts)
            p_hi = uncond_pvalue_onesided(
                data, Hypothesis(self.measure, beta0, Alternative.GREATER),
                ordering, self.opts)
            return min(1.0, 2.0 * p_lo, 2.0 * p_hi)
        raise DomainError(
            f"{self.id} supports one-sided and central alternatives, "
            f"not {alt.value}"
        )

    def _normalize_alt(self, alternative) -> Alternative:
        if alternative is None:
            if self.id in ("fisher-irwin", "blaker"):
                return Alternative.TWO_SIDED_MINLIKE
            if self.id == "boschloo" and self.variant in ("irwin", "central"):
                return Alternative.TWO_SIDED_MINLIKE
            if self.id == "csm" and self.variant == "two_sided":
                return Alternative.TWO_SIDED_MINLIKE
            return Alternative.TWO_SIDED_CENTRAL
        return _as_alternative(alternative)

    def _conditional_pvalue(self, data, beta0, alt, mode):
        if self.id == "fisher-irwin":
            return conditional.fisher_irwin(data, beta0, mode)
        if self.id == "blaker":
            return conditional.blaker(data, beta0, mode)
        if self.id == "fisher-central" or (
            self.id == "fisher-onesided" and not alt.one_sided
        ):
            return conditional.fisher_central(data, beta0, mode)
        hyp = Hypothesis(self.measure, beta0, alt)
        return conditional.fisher_onesided(data, hyp, mode)

    def _score_pvalue(self, data, beta0, alt):
        if alt.one_sided:
            ordering = order_score(data.n1, data.n2, self.measure, beta0)
            return uncond_pvalue_onesided(
                data, Hypothesis(self.measure, beta0, alt), ordering, self.opts
            )
        if alt is Alternative.TWO_SIDED_CENTRAL:
            p_lo = self._score_pvalue(data, beta0, Alternative.LESS)
            p_hi = self._score_pvalue(data, beta0, Alternative.GREATER)
            return min(1.0, 2.0 * p_lo, 2.0 * p_hi)
        ordering = order_score_twosided(data.n1, data.n2, self.measure, beta0)
        return uncond_pvalue_twosided(
            data, Hypothesis(self.measure, beta0, alt), ordering, self.opts
        )

    def _ordering(self, n1, n2) -> SampleSpaceOrdering:
        base = _fixed_ordering(
            self.id, self.measure, n1, n2, self.variant, self.csm_max_points
        )
        return base

    # -- confidence intervals ----------------------------------------------

    def ci(self, data: TwoByTwoData, level: float,
           beta_grid: np.ndarray | None = None) -> ConfidenceInterval:
        return self.ci_with_region(data, level, beta_grid)[0]

    def ci_with_region(self, data, level, beta_grid=None):
        """Interval plus the confidence region it covers (None when the
        region is the interval itself by construction)."""
        if self.id in ("fisher-onesided", "fisher-central"):
            if self.measure is not Measure.ODDS_RATIO:
                raise UnsupportedCombinationError(
                    "conditional intervals exist for the odds ratio; use "
                    "melded or unconditional methods for other measures"
                )
            mode = "mid" if self.midp else "full"
            return conditional.conditional_ci_oddsratio(data, level, mode), None
        if self.id in ("fisher-irwin", "blaker", "boschloo"):
            if self.measure is not Measure.ODDS_RATIO:
                raise UnsupportedCombinationError(
                    f"{self.id} inverts over the odds ratio; use melded or "
                    "unconditional methods for other measures"
                )
            grid = self._region_grid(data, beta_grid)
            region = triples.confidence_region(
                lambda d, b: self.pvalue(d, b), data, level, grid
            )
            return triples.matching_ci(region), region
        if self.id == "melded":
            return melded.meld_ci(data, self.measure, level), None
        if self.id == "csm":
            raise UnsupportedCombinationError(
                "csm ships as a p-value method; no matching interval is "
                "published for it (use melded or uncond-* for intervals)"
            )
        if self.id == "uncond-score":
            # invert the squared statistic, the usual non-central variant
            fam = OrderingFamily(
                name="score",
                build=lambda n1, n2, b0: order_score_twosided(
                    n1, n2, self.measure, b0),
                two_sided=True,
                beta0_free=False,
            )
            res = uncond_ci(data, self.measure, level, fam, self.opts,
                            beta_grid=beta_grid)
            return res.ci, res.region
        ordering = self._ordering(data.n1, data.n2)
        res = uncond_ci(data, self.measure, level,
                        OrderingFamily.fixed(ordering), self.opts)
        return res.ci, res.region

    def _region_grid(self, data, beta_grid):
        if beta_grid is not None:
            return np.asarray(beta_grid, dtype=float)
        return unconditional._default_beta_grid(data, self.measure)

    # -- rejection sets ------------------------------------------------------

    def rejection_set(
        self,
        n1: int,
        n2: int,
        alpha: float,
        beta0: float | None = None,
        alternative=None,
    ) -> np.ndarray:
        """Boolean rejection indicator over the sample grid; cached."""
        beta0 = self.default_beta0() if beta0 is None else beta0
        alt = self._normalize_alt(alternative)
        key = (self.cache_key, n1, n2, alpha, beta0, alt)
        hit = _REJECTION_CACHE.get(key)
        if hit is not None:
            return hit
        table = self.pvalues_table(n1, n2, beta0, alt, alpha_hint=alpha)
        out = table <= alpha
        _REJECTION_CACHE[key] = out
        return out

    def pvalues_table(
        self, n1: int, n2: int, beta0: float | None = None,
        alternative=None, alpha_hint: float | None = None,
    ) -> np.ndarray:
        """p-values for the whole sample space at one null value."""
        beta0 = self.default_beta0() if beta0 is None else beta0
        alt = self._normalize_alt(alternative)
        mode = "mid" if self.midp else "full"

        if self.id in _CONDITIONAL_IDS or self.id == "melded":
            out = np.empty((n1 + 1, n2 + 1))
            for i in range(n1 + 1):
                for j in range(n2 + 1):
                    d = TwoByTwoData(i, n1, j, n2)
                    if self.id == "melded":
                        if alt.one_sided:
                            out[i, j] = melded.meld_pvalue(
                                d, Hypothesis(self.measure, beta0, alt))
                        else:
                            out[i, j] = melded.meld_pvalue_central(
                                d, self.measure, beta0)
                    else:
                        out[i, j] = self._conditional_pvalue(d, beta0, alt, mode)
            return out

        if self.id == "boschloo":
            variant = self.variant
            b_alt = alt if variant == "onesided" else Alternative.GREATER
            ordering = boschloo_ordering(n1, n2, beta0, variant, b_alt, mode)
            if variant == "onesided":
                if not alt.one_sided:
                    raise DomainError(
                        "boschloo onesided rejection sets need a one-sided "
                        "alternative")
                # the ordering statistic is signed toward the alternative
                tail = "ge" if alt is Alternative.GREATER else "le"
                return self._uncond_table(ordering, beta0, tail, alpha_hint)
            return self._uncond_table(ordering, beta0, "le", alpha_hint)

        if self.id == "uncond-score":
            if alt is Alternative.TWO_SIDED_MINLIKE:
                ordering = order_score_twosided(n1, n2, self.measure, beta0)
                return self._uncond_table(ordering, beta0, "le", alpha_hint)
            if alt is Alternative.TWO_SIDED_CENTRAL:
                ordering = order_score(n1, n2, self.measure, beta0)
                half = None if alpha_hint is None else alpha_hint / 2.0
                p_lo = self._uncond_table(ordering, beta0, "le", half)
                p_hi = self._uncond_table(ordering, beta0, "ge", half)
                return np.minimum(1.0, 2.0 * np.minimum(p_lo, p_hi))
            ordering = order_score(n1, n2, self.measure, beta0)
            tail = "le" if alt is Alternative.LESS else "ge"
            return self._uncond_table(ordering, beta0, tail, alpha_hint)

        ordering = self._ordering(n1, n2)
        if self.opts.em_iterations:
            if not alt.one_sided and alt is not Alternative.TWO_SIDED_CENTRAL:
                raise DomainError("E+M applies to one-sided or central tests")

        if self.id == "csm" and self.variant == "two_sided":
            if alt.one_sided:
                raise DomainError("two-sided CSM has no one-sided p-values")
            return self._uncond_table(ordering, beta0, "le", alpha_hint)
        if alt.one_sided:
            tail = "le" if alt is Alternative.LESS else "ge"
            ordering = self._maybe_em(ordering, beta0, alt)
            return self._uncond_table(ordering, beta0, tail, alpha_hint)
        if alt is Alternative.TWO_SIDED_CENTRAL:
            half = None if alpha_hint is None else alpha_hint / 2.0
            o_lo = self._maybe_em(ordering, beta0, Alternative.LESS)
            o_hi = self._maybe_em(ordering, beta0, Alternative.GREATER)
            p_lo = self._uncond_table(o_lo, beta0, "le", half)
            p_hi = self._uncond_table(o_hi, beta0, "ge", half)
            return np.minimum(1.0, 2.0 * np.minimum(p_lo, p_hi))
        raise DomainError(f"{self.id} does not produce {alt.value} tables")

    def _maybe_em(self, ordering, beta0, alt):
        if not self.opts.em_iterations:
            return ordering
        return em_ordering(Hypothesis(self.measure, beta0, alt), ordering)

    def _uncond_table(self, ordering, beta0, tail, alpha_hint):
        opts = dataclasses.replace(self.opts, em_iterations=0)
        return uncond_pvalues_table(
            ordering, self.measure, beta0, tail, opts,
            refine_level=alpha_hint,
        )


def make_method(method_id: str, measure=Measure.DIFFERENCE, **kwargs) -> Method:
    return Method(method_id, Measure(measure), **kwargs)
