"""Desk-scale numerics for weighted weak-type inequalities in one dimension.

Exact operator actions on step functions, weighted weak L^p norms, A_p
constants, Rubio de Francia weights, sparse operators and exponent fits.
"""

from .errors import (
    AplabError,
    DomainError,
    InsufficientData,
    InsufficientVariation,
    InvalidArgument,
    InvalidWeight,
    SingularPointError,
    ToleranceNotMet,
)
from .funcs1d import ProfileFunction, StepFunction1D, indicator, integrate, transform

__version__ = "0.1.0"

__all__ = [
    "AplabError",
    "DomainError",
    "InsufficientData",
    "InsufficientVariation",
    "InvalidArgument",
    "InvalidWeight",
    "SingularPointError",
    "ToleranceNotMet",
    "ProfileFunction",
    "StepFunction1D",
    "indicator",
    "integrate",
    "transform",
]
