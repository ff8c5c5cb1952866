"""Parameter restrictions that collapse the nest, and their reduced closed forms.

Each reduced form is obtained by substituting the restriction into the general
formula and simplifying; they are used to cross-check ``eval_v``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import FormMismatch, NonPositiveBracket
from .model import InputPoint, Parameters

DEFAULT_TOL = 1e-9


class Form(str, enum.Enum):
    GENERAL_NESTED = "GeneralNested"
    DELTA_ZERO = "DeltaZero"
    DELTA_ONE = "DeltaOne"
    SIGMA_ZERO = "SigmaZero"
    SIGMA_ONE = "SigmaOne"
    PURE_CAPITAL_INTENSIVE = "PureCapitalIntensive"
    PURE_LABOR_INTENSIVE = "PureLaborIntensive"
    PLAIN_CES = "PlainCES"


@dataclass(frozen=True)
class SpecialCaseForm:
    tag: Form
    tolerance_used: float = DEFAULT_TOL


def _near(a, b, tol):
    return abs(a - b) <= tol


def _constraints(tag: Form):
    return {
        Form.GENERAL_NESTED: lambda P, t: True,
        Form.DELTA_ZERO: lambda P, t: _near(P.delta, 0.0, t),
        Form.DELTA_ONE: lambda P, t: _near(P.delta, 1.0, t),
        Form.SIGMA_ZERO: lambda P, t: _near(P.sigma, 0.0, t),
        Form.SIGMA_ONE: lambda P, t: _near(P.sigma, 1.0, t),
        Form.PURE_CAPITAL_INTENSIVE: lambda P, t: _near(P.delta, 1.0, t) and _near(P.sigma, 1.0, t),
        Form.PURE_LABOR_INTENSIVE: lambda P, t: _near(P.delta, 1.0, t) and _near(P.sigma, 0.0, t),
        Form.PLAIN_CES: lambda P, t: _near(P.p, P.q, t),
    }[tag]


# most specific first
_PRECEDENCE = (
    Form.PURE_CAPITAL_INTENSIVE,
    Form.PURE_LABOR_INTENSIVE,
    Form.PLAIN_CES,
    Form.SIGMA_ZERO,
    Form.SIGMA_ONE,
    Form.DELTA_ZERO,
    Form.DELTA_ONE,
)


def matches(params: Parameters, form: SpecialCaseForm) -> bool:
    return _constraints(form.tag)(params, form.tolerance_used)


def classify_special_case(params: Parameters, tol: float = DEFAULT_TOL) -> SpecialCaseForm:
    if not tol > 0:
        raise ValueError("tol must be positive")
    for tag in _PRECEDENCE:
        if _constraints(tag)(params, tol):
            return SpecialCaseForm(tag, tol)
    return SpecialCaseForm(Form.GENERAL_NESTED, tol)


def _check(value, what):
    if not (value > 0 and math.isfinite(value)):
        raise NonPositiveBracket(f"{what} = {value!r} is not positive")
    return value


def reduced_eval(params: Parameters, x: InputPoint, form: SpecialCaseForm) -> float:
    """Evaluate V through the closed form that ``form`` reduces it to."""
    if not matches(params, form):
        raise FormMismatch(f"parameters {params.as_dict()} do not satisfy {form.tag.value}")
    A, s, d, p, q = params.A, params.sigma, params.delta, params.p, params.q
    K, L = x.K, x.L
    tag = form.tag

    if tag in (Form.SIGMA_ZERO, Form.PURE_LABOR_INTENSIVE):
        return A * K / L
    if tag is Form.PURE_CAPITAL_INTENSIVE:
        return A / K
    if tag is Form.SIGMA_ONE:
        h = _check(d * K ** (-q) + (1.0 - d) * L ** (-q), "h")
        return A * h ** (1.0 / q)
    if tag is Form.DELTA_ZERO:
        # h^(-p/q) = L^p
        b = _check(s * L**p + (1.0 - s) * (L / K) ** p, "bracket")
        return A * b ** (-1.0 / p)
    if tag is Form.DELTA_ONE:
        # h^(-p/q) = K^p
        b = _check(s * K**p + (1.0 - s) * (L / K) ** p, "bracket")
        return A * b ** (-1.0 / p)
    if tag is Form.PLAIN_CES:
        h = _check(d * K ** (-q) + (1.0 - d) * L ** (-q), "h")
        b = _check(s / h + (1.0 - s) * (L / K) ** q, "bracket")
        return A * b ** (-1.0 / q)

    h = _check(d * K ** (-q) + (1.0 - d) * L ** (-q), "h")
    b = _check(s * h ** (-p / q) + (1.0 - s) * (K / L) ** (-p), "bracket")
    return A * b ** (-1.0 / p)
