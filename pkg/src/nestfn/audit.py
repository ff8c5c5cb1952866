"""Check published closed forms against independently computed quantities.

Every printed expression is evaluated verbatim, including the ones known to be
wrong; nothing here feeds back into evaluation. An expression that is undefined
at the requested point (e.g. a negative base raised to a fractional power) is
recorded with its error message instead of aborting the audit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import FormulaDomainError, NestFnError
from .model import (
    InputPoint,
    Parameters,
    elasticity_k,
    elasticity_l,
    eval_v,
    hessian,
    homogeneity_degree,
)
from .special_cases import Form, SpecialCaseForm, reduced_eval

UNIT_POINT = InputPoint(1.0, 1.0)


@dataclass(frozen=True)
class AuditEntry:
    paper_value: float | None
    computed_value: float | None
    abs_deviation: float | None
    error: str | None = None

    def as_dict(self) -> dict:
        return {
            "paper_value": self.paper_value,
            "computed_value": self.computed_value,
            "abs_deviation": self.abs_deviation,
            "error": self.error,
        }


def _real_pow(base, exponent, what):
    if base < 0 and not float(exponent).is_integer():
        raise FormulaDomainError(f"{what}: negative base {base:.6g} raised to non-integer power {exponent:.6g}")
    if base == 0 and exponent < 0:
        raise FormulaDomainError(f"{what}: zero raised to negative power")
    return base**exponent


def printed_elasticity_k(P: Parameters, x: InputPoint) -> float:
    """Capital elasticity as printed, with its (-1/p)^(1+p) factor."""
    A, s, d, p, q = P.A, P.sigma, P.delta, P.p, P.q
    K, L = x.K, x.L
    h = d * K ** (-q) + (1 - d) * L ** (-q)
    bracket = (
        -s * d * K ** (-q - p) * _real_pow(h, -p / q - 1, "h power") * (p / q)
        + (1 - s) * p * (K / L) ** (-p - 1) * (L / K**2)
    )
    factor = _real_pow(-1.0 / p, 1 + p, "(-1/p)^(1+p)")
    v = eval_v(P, x).v
    return A * bracket * factor * (K / v)


def printed_elasticity_l(P: Parameters, x: InputPoint) -> float:
    return (1 - P.q) * (1 - P.sigma) * (x.K / x.L) ** (-P.p)


def printed_second_partials(P: Parameters, x: InputPoint) -> tuple[float, float, float]:
    A, s, d, p, q = P.A, P.sigma, P.delta, P.p, P.q
    K, L = x.K, x.L
    c = -A * (p / q) * s
    hkk = c * (d * (q - 1) * K ** (-q - 2) * L**q + (1 - d) * q * K ** (-q) * L ** (q - 2))
    hkl = c * (d * q * K ** (-q - 1) * L ** (q - 1) + (1 - d) * q * K ** (-q) * L ** (-q))
    hll = c * (d * q * K ** (1 - q) * L ** (-q - 2) + (1 - d) * (q - 1) * K**q * L ** (-q - 2))
    return hkk, hkl, hll


def printed_eigenvalues(P: Parameters) -> tuple[float, float]:
    """Eigenvalues as printed for the unit point (K, L) = (1, 1)."""
    A, s, d, p, q = P.A, P.sigma, P.delta, P.p, P.q
    lam1 = -A * (p / q) * s * (d + 1 - d) * q
    return lam1, lam1 * (1 - q)


def _entry(printed, computed) -> AuditEntry:
    try:
        printed_value = float(printed())
    except (FormulaDomainError, ZeroDivisionError, OverflowError, ValueError) as exc:
        printed_value, err = None, str(exc) or type(exc).__name__
    else:
        err = None if math.isfinite(printed_value) else "printed expression is not finite"
        if err:
            printed_value = None
    try:
        value = float(computed())
    except NestFnError as exc:
        return AuditEntry(printed_value, None, None, f"{type(exc).__name__}: {exc}")
    if printed_value is None:
        return AuditEntry(None, value, None, err)
    return AuditEntry(printed_value, value, abs(printed_value - value))


def _reduction(P, x, form, **constraint):
    Q = P.with_(**constraint)
    return reduced_eval(Q, x, SpecialCaseForm(form))


def audit_paper_formulas(params: Parameters, x: InputPoint) -> dict[str, AuditEntry]:
    """Map of formula id to its printed value, the independent value and their gap.

    Reduction rows substitute the restriction into ``params`` before evaluating
    both sides, so they are defined for any parameter set.
    """
    P = params
    eval_v(P, x)
    A, s, d, p, q = P.A, P.sigma, P.delta, P.p, P.q
    K, L = x.K, x.L
    hess = lambda pt: hessian(P, pt)  # noqa: E731
    printed_h = lambda: printed_second_partials(P, x)  # noqa: E731

    record = {
        "elasticity_k_closed_form": _entry(lambda: printed_elasticity_k(P, x), lambda: elasticity_k(P, x)),
        "elasticity_l_closed_form": _entry(lambda: printed_elasticity_l(P, x), lambda: elasticity_l(P, x)),
        "hessian_kk": _entry(lambda: printed_h()[0], lambda: hess(x).hkk),
        "hessian_kl": _entry(lambda: printed_h()[1], lambda: 0.5 * (hess(x).hkl + hess(x).hlk)),
        "hessian_ll": _entry(lambda: printed_h()[2], lambda: hess(x).hll),
        "eigenvalue_1_at_unit": _entry(lambda: printed_eigenvalues(P)[0], lambda: hess(UNIT_POINT).eig1),
        "eigenvalue_2_at_unit": _entry(lambda: printed_eigenvalues(P)[1], lambda: hess(UNIT_POINT).eig2),
        "homogeneity_degree_one": _entry(lambda: 1.0, lambda: homogeneity_degree(P, x)),
        "homogeneity_scaling_minus_p": _entry(lambda: -p, lambda: homogeneity_degree(P, x)),
        "sigma_zero_reduction": _entry(
            lambda: A * (L / K) ** p, lambda: _reduction(P, x, Form.SIGMA_ZERO, sigma=0.0)
        ),
        "sigma_one_reduction": _entry(
            lambda: A * _real_pow(d * K ** (-q) + (1 - d) * L ** (-q), 1 / q, "h^(1/q)"),
            lambda: _reduction(P, x, Form.SIGMA_ONE, sigma=1.0),
        ),
        "capital_intensive_reduction": _entry(
            lambda: A * (K ** (-q) + L ** (-q)) ** (-p / q),
            lambda: _reduction(P, x, Form.PURE_CAPITAL_INTENSIVE, sigma=1.0, delta=1.0),
        ),
        "labor_intensive_reduction": _entry(
            lambda: A * (K / L) ** (-p),
            lambda: _reduction(P, x, Form.PURE_LABOR_INTENSIVE, sigma=0.0, delta=1.0),
        ),
        "equal_curvature_reduction": _entry(
            lambda: A
            * _real_pow(s * _real_pow(d * L + (1 - d) * K, -1.0, "inverse") + (1 - s) * (L / K) ** q, 1 / q, "outer"),
            lambda: _reduction(P, x, Form.PLAIN_CES, p=q),
        ),
    }
    return record


def audit_as_dict(record: dict[str, AuditEntry]) -> dict:
    return {key: entry.as_dict() for key, entry in record.items()}
