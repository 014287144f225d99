"""Shared value types: observed tables, effect measures, hypotheses, intervals."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np


class DomainError(ValueError):
    """An argument is outside the domain an operation supports."""


class UnsupportedCombinationError(ValueError):
    """A valid-looking request that this method cannot serve."""


class BudgetExceededError(RuntimeError):
    """A computation would exceed the configured compute budget."""


class Measure(str, Enum):
    """Effect measure comparing theta2 against theta1."""

    DIFFERENCE = "difference"
    RATIO = "ratio"
    ODDS_RATIO = "oddsratio"

    @property
    def equality_value(self) -> float:
        """The parameter value at which theta1 = theta2."""
        return 0.0 if self is Measure.DIFFERENCE else 1.0

    @property
    def bounds(self) -> tuple[float, float]:
        if self is Measure.DIFFERENCE:
            return (-1.0, 1.0)
        return (0.0, math.inf)

    @property
    def log_scale(self) -> bool:
        """Whether grids over this measure should be log spaced."""
        return self is not Measure.DIFFERENCE

    def evaluate(self, theta1: float, theta2: float) -> float:
        """b(theta): increasing in theta2, decreasing in theta1.

        Returns nan where the measure is undefined (0/0 or inf/inf) and
        +inf where only the denominator vanishes.
        """
        if self is Measure.DIFFERENCE:
            return theta2 - theta1
        if self is Measure.RATIO:
            if theta1 == 0.0:
                return math.nan if theta2 == 0.0 else math.inf
            return theta2 / theta1
        odds1 = _odds(theta1)
        odds2 = _odds(theta2)
        if odds1 == 0.0:
            return math.nan if odds2 == 0.0 else math.inf
        if math.isinf(odds1):
            return math.nan if math.isinf(odds2) else 0.0
        return odds2 / odds1

    def feasible(self, beta0: float) -> bool:
        """True when beta0 lies strictly inside the measure's range."""
        lo, hi = self.bounds
        return lo < beta0 < hi

    def require_feasible(self, beta0: float) -> None:
        if not self.feasible(beta0):
            raise DomainError(
                f"beta0={beta0!r} is outside the open range {self.bounds} "
                f"of measure {self._value_}"
            )


def _odds(theta: float) -> float:
    if theta >= 1.0:
        return math.inf
    return theta / (1.0 - theta)


class Alternative(str, Enum):
    LESS = "less"
    GREATER = "greater"
    TWO_SIDED_CENTRAL = "two_sided_central"
    TWO_SIDED_MINLIKE = "two_sided_minlike"
    TWO_SIDED_BLAKER = "two_sided_blaker"

    @property
    def one_sided(self) -> bool:
        return self in (Alternative.LESS, Alternative.GREATER)


@dataclass(frozen=True)
class TwoByTwoData:
    """Counts from two independent binomials: x1/n1 and x2/n2."""

    x1: int
    n1: int
    x2: int
    n2: int

    def __post_init__(self):
        for name in ("x1", "n1", "x2", "n2"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)):
                raise DomainError(f"{name} must be an integer, got {v!r}")
        if self.n1 < 1:
            raise DomainError(f"n1 must be >= 1, got {self.n1}")
        if self.n2 < 1:
            raise DomainError(f"n2 must be >= 1, got {self.n2}")
        if not 0 <= self.x1 <= self.n1:
            raise DomainError(f"x1 must satisfy 0 <= x1 <= n1={self.n1}, got {self.x1}")
        if not 0 <= self.x2 <= self.n2:
            raise DomainError(f"x2 must satisfy 0 <= x2 <= n2={self.n2}, got {self.x2}")

    @property
    def theta1_hat(self) -> float:
        return self.x1 / self.n1

    @property
    def theta2_hat(self) -> float:
        return self.x2 / self.n2

    @property
    def s(self) -> int:
        """Total number of successes, x1 + x2."""
        return self.x1 + self.x2

    def estimate(self, measure: Measure) -> float:
        """Sample value of the measure; may be 0, inf, or nan at corners."""
        return measure.evaluate(self.theta1_hat, self.theta2_hat)

    def mirrored(self) -> "TwoByTwoData":
        """Swap group labels together with success/failure labels."""
        return TwoByTwoData(self.n1 - self.x1, self.n1, self.n2 - self.x2, self.n2)

    def swapped(self) -> "TwoByTwoData":
        """Swap the two groups."""
        return TwoByTwoData(self.x2, self.n2, self.x1, self.n1)


@dataclass(frozen=True)
class Hypothesis:
    """A null boundary value for one effect measure plus a tail direction."""

    measure: Measure
    beta0: float
    alternative: Alternative

    def __post_init__(self):
        self.measure.require_feasible(self.beta0)

    @property
    def at_equality(self) -> bool:
        return self.beta0 == self.measure.equality_value


@dataclass(frozen=True)
class ConfidenceInterval:
    lower: float
    upper: float
    level: float
    central: bool = True
    holes_filled: bool = False

    def __post_init__(self):
        if not 0.0 < self.level < 1.0:
            raise DomainError(f"level must be in (0, 1), got {self.level}")
        if self.lower > self.upper:
            raise DomainError(f"lower={self.lower} exceeds upper={self.upper}")

    def contains(self, beta: float) -> bool:
        return self.lower <= beta <= self.upper

    def length(self) -> float:
        return self.upper - self.lower


def informative_mask(measure: Measure, n1: int, n2: int) -> np.ndarray:
    """Boolean (n1+1, n2+1) grid of sample points that carry information
    about the measure.  [0,0] is uninformative for the ratio; [0,0] and
    [n1,n2] are uninformative for the odds ratio."""
    mask = np.ones((n1 + 1, n2 + 1), dtype=bool)
    if measure is Measure.RATIO:
        mask[0, 0] = False
    elif measure is Measure.ODDS_RATIO:
        mask[0, 0] = False
        mask[n1, n2] = False
    return mask
