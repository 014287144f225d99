"""Exact inference for the two-sample binomial problem.

Valid (non-asymptotic) p-values, confidence intervals, melded intervals,
triple diagnostics, and exact operating characteristics for conditional,
unconditional, and melded methods.
"""

__version__ = "0.1.0"

from ._backend import backend_name
from .core import (
    Alternative,
    BudgetExceededError,
    ConfidenceInterval,
    DomainError,
    Hypothesis,
    Measure,
    TwoByTwoData,
    UnsupportedCombinationError,
    informative_mask,
)
from .catalog import METHOD_IDS, Method, make_method

__all__ = [
    "Alternative",
    "BudgetExceededError",
    "ConfidenceInterval",
    "DomainError",
    "Hypothesis",
    "Measure",
    "Method",
    "METHOD_IDS",
    "TwoByTwoData",
    "UnsupportedCombinationError",
    "backend_name",
    "informative_mask",
    "make_method",
]
