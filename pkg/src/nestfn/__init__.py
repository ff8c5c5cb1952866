"""Nested production function V(K, L, K/L): evaluation, audits and calibration."""

from .errors import (
    DomainError,
    FormMismatch,
    InvalidParameters,
    NestFnError,
    NonPositiveBracket,
    NumericalBreakdown,
    ZeroMarginalProduct,
)
from .model import (
    EvalBreakdown,
    Gradient,
    Hessian2,
    InputPoint,
    Parameters,
    elasticity_k,
    elasticity_l,
    eval_f,
    eval_v,
    gradient,
    hessian,
    homogeneity_degree,
    substitution_elasticity,
)
from .special_cases import Form, SpecialCaseForm, classify_special_case, reduced_eval

__version__ = "0.1.0"
