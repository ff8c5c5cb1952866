"""Evaluation and pointwise calculus of the nested capital/labor/intensity function.

    V(K, L) = A * [sigma * h^(-p/q) + (1 - sigma) * (K/L)^(-p)]^(-1/p)
    h(K, L) = delta * K^(-q) + (1 - delta) * L^(-q)

Everything here is a pure function of its arguments. The ``*_arrays`` kernels
broadcast over numpy arrays and back the scalar API; scans and estimation use
them directly.
"""

from __future__ import annotations

import math
import os
from dataclasses import InitVar, dataclass, replace
from typing import NamedTuple

import numpy as np

from .errors import (
    DomainError,
    InvalidParameters,
    NonPositiveBracket,
    NumericalBreakdown,
    ZeroMarginalProduct,
)

MIN_ABS_CURVATURE = 1e-3
WEIGHT_RANGE = (0.0, 2.0)
HESSIAN_REL_STEP = 1e-5


def strict_from_env() -> bool:
    return os.environ.get("NESTFN_STRICT", "").strip() not in ("", "0", "false", "False")


@dataclass(frozen=True)
class Parameters:
    """One instance of the production function.

    ``strict`` is construction-only: it additionally requires |p|, |q| <= 1 and
    sigma, delta in [0, 1].
    """

    A: float
    sigma: float
    delta: float
    p: float
    q: float
    strict: InitVar[bool] = False

    def __post_init__(self, strict):
        for name in ("A", "sigma", "delta", "p", "q"):
            value = getattr(self, name)
            if not isinstance(value, (int, float, np.floating, np.integer)) or not math.isfinite(value):
                raise InvalidParameters(f"{name} must be a finite real, got {value!r}")
            object.__setattr__(self, name, float(value))
        if self.A <= 0:
            raise InvalidParameters(f"A must be positive, got {self.A}")
        lo, hi = (0.0, 1.0) if strict else WEIGHT_RANGE
        for name in ("sigma", "delta"):
            value = getattr(self, name)
            if not lo <= value <= hi:
                raise InvalidParameters(f"{name} must lie in [{lo}, {hi}], got {value}")
        for name in ("p", "q"):
            value = getattr(self, name)
            if abs(value) < MIN_ABS_CURVATURE:
                raise InvalidParameters(f"|{name}| must be at least {MIN_ABS_CURVATURE}, got {value}")
            if strict and abs(value) > 1.0:
                raise InvalidParameters(f"|{name}| must be at most 1 in strict mode, got {value}")

    def as_dict(self) -> dict:
        return {"A": self.A, "sigma": self.sigma, "delta": self.delta, "p": self.p, "q": self.q}

    def as_vector(self) -> np.ndarray:
        return np.array([self.A, self.sigma, self.delta, self.p, self.q])

    @classmethod
    def from_dict(cls, data, strict=False) -> "Parameters":
        return cls(data["A"], data["sigma"], data["delta"], data["p"], data["q"], strict=strict)

    def with_(self, **changes) -> "Parameters":
        return replace(self, **changes)


@dataclass(frozen=True)
class InputPoint:
    K: float
    L: float

    def __post_init__(self):
        for name in ("K", "L"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0:
                raise DomainError(f"{name} must be a positive finite real, got {value!r}")
            object.__setattr__(self, name, float(value))


@dataclass(frozen=True)
class EvalBreakdown:
    h_value: float
    ratio_term: float
    bracket: float
    v: float


@dataclass(frozen=True)
class Gradient:
    dV_dK: float
    dV_dL: float


@dataclass(frozen=True)
class Hessian2:
    hkk: float
    hkl: float
    hlk: float
    hll: float
    eig1: float
    eig2: float


class SubstitutionElasticity(NamedTuple):
    value: float
    degenerate: bool


# -- array kernels ---------------------------------------------------------


def _pieces(A, sigma, delta, p, q, K, L):
    with np.errstate(all="ignore"):
        h = delta * K ** (-q) + (1.0 - delta) * L ** (-q)
        ratio = (K / L) ** (-p)
        inner = h ** (-p / q)
        bracket = sigma * inner + (1.0 - sigma) * ratio
        v = A * bracket ** (-1.0 / p)
    return h, ratio, inner, bracket, v


def eval_arrays(A, sigma, delta, p, q, K, L):
    """Vectorized V. Entries where h <= 0 or the bracket <= 0 come back NaN."""
    h, _, _, bracket, v = _pieces(A, sigma, delta, p, q, K, L)
    ok = (h > 0) & (bracket > 0)
    return np.where(ok, v, np.nan)


def gradient_arrays(A, sigma, delta, p, q, K, L):
    """Vectorized (V, dV/dK, dV/dL); invalid entries are NaN.

    With B the bracket,
        dV/dK = -(V/B) [sigma*delta*h^(-p/q-1) K^(-q-1) - (1-sigma) (K/L)^(-p) / K]
        dV/dL = -(V/B) [sigma*(1-delta)*h^(-p/q-1) L^(-q-1) + (1-sigma) (K/L)^(-p) / L]
    """
    h, ratio, inner, bracket, v = _pieces(A, sigma, delta, p, q, K, L)
    with np.errstate(all="ignore"):
        ok = (h > 0) & (bracket > 0)
        scale = np.where(ok, -v / bracket, np.nan)
        inner_h = inner / h
        dk = scale * (sigma * delta * inner_h * K ** (-q - 1.0) - (1.0 - sigma) * ratio / K)
        dl = scale * (sigma * (1.0 - delta) * inner_h * L ** (-q - 1.0) + (1.0 - sigma) * ratio / L)
    return np.where(ok, v, np.nan), dk, dl


def log_elasticity_arrays(A, sigma, delta, p, q, K, L):
    """Vectorized (eps_K, eps_L); computed without forming V."""
    h, ratio, inner, bracket, _ = _pieces(A, sigma, delta, p, q, K, L)
    with np.errstate(all="ignore"):
        ok = (h > 0) & (bracket > 0)
        inner_h = inner / h
        ek = -(sigma * delta * inner_h * K ** (-q) - (1.0 - sigma) * ratio) / bracket
        el = -(sigma * (1.0 - delta) * inner_h * L ** (-q) + (1.0 - sigma) * ratio) / bracket
    return np.where(ok, ek, np.nan), np.where(ok, el, np.nan)


def _unpack(params):
    return params.A, params.sigma, params.delta, params.p, params.q


def _point(x):
    # numpy scalars so that invalid powers give NaN rather than complex results
    return np.float64(x.K), np.float64(x.L)


# -- scalar API ------------------------------------------------------------


def eval_v(params: Parameters, x: InputPoint) -> EvalBreakdown:
    h, ratio, _, bracket, v = _pieces(*_unpack(params), *_point(x))
    if not h > 0:
        raise NonPositiveBracket(f"inner aggregate h = {h:.6g} is not positive at K={x.K}, L={x.L}")
    if not bracket > 0:
        raise NonPositiveBracket(f"bracket = {bracket:.6g} is not positive at K={x.K}, L={x.L}")
    if not math.isfinite(v):
        raise NumericalBreakdown(f"V overflowed at K={x.K}, L={x.L}")
    return EvalBreakdown(float(h), float(ratio), float(bracket), float(v))


def eval_f(params: Parameters, x: InputPoint) -> float:
    """The auxiliary two-input map: h(K, L) + (K/L)^(-p), taken exactly as written."""
    d, q, p = params.delta, params.q, params.p
    K, L = _point(x)
    return float(d * K ** (-q) + (1.0 - d) * L ** (-q) + (K / L) ** (-p))


def gradient(params: Parameters, x: InputPoint) -> Gradient:
    eval_v(params, x)
    _, dk, dl = gradient_arrays(*_unpack(params), *_point(x))
    return Gradient(float(dk), float(dl))


def elasticity_k(params: Parameters, x: InputPoint) -> float:
    eval_v(params, x)
    ek, _ = log_elasticity_arrays(*_unpack(params), *_point(x))
    return float(ek)


def elasticity_l(params: Parameters, x: InputPoint) -> float:
    eval_v(params, x)
    _, el = log_elasticity_arrays(*_unpack(params), *_point(x))
    return float(el)


def symmetric_eigenvalues(a: float, b: float, c: float) -> tuple[float, float]:
    """Eigenvalues (larger first) of [[a, b], [b, c]]."""
    mean = 0.5 * (a + c)
    radius = math.hypot(0.5 * (a - c), b)
    return mean + radius, mean - radius


def hessian_arrays(A, sigma, delta, p, q, K, L, rel_step=HESSIAN_REL_STEP):
    """Vectorized (hkk, hkl, hlk, hll) by central differences of the analytic gradient.

    hkl differentiates dV/dK in L and hlk differentiates dV/dL in K, so the two
    mixed partials are independent estimates. NaN wherever a stencil point is invalid.
    """
    K = np.asarray(K, dtype=float)
    L = np.asarray(L, dtype=float)
    hk, hl = rel_step * K, rel_step * L
    Ks = np.stack([K + hk, K - hk, K, K])
    Ls = np.stack([L, L, L + hl, L - hl])
    _, dk, dl = gradient_arrays(A, sigma, delta, p, q, Ks, Ls)
    hkk = (dk[0] - dk[1]) / (2 * hk)
    hkl = (dk[2] - dk[3]) / (2 * hl)
    hlk = (dl[0] - dl[1]) / (2 * hk)
    hll = (dl[2] - dl[3]) / (2 * hl)
    return hkk, hkl, hlk, hll


def hessian(params: Parameters, x: InputPoint, rel_step: float = HESSIAN_REL_STEP) -> Hessian2:
    """Second derivatives at ``x``; eigenvalues come from the symmetrized matrix."""
    eval_v(params, x)
    parts = [float(a) for a in hessian_arrays(*_unpack(params), *_point(x), rel_step)]
    if not all(math.isfinite(a) for a in parts):
        raise NumericalBreakdown(f"finite-difference stencil leaves the domain at K={x.K}, L={x.L}")
    hkk, hkl, hlk, hll = parts
    eig1, eig2 = symmetric_eigenvalues(hkk, 0.5 * (hkl + hlk), hll)
    return Hessian2(hkk, hkl, hlk, hll, eig1, eig2)


RAY_LOG_STEP = 1e-4


def ray_degree_arrays(A, sigma, delta, p, q, K, L, step=RAY_LOG_STEP):
    """Vectorized d ln V(lam K, lam L) / d ln lam at lam = 1 (central difference in ln lam)."""
    up, down = math.exp(step), math.exp(-step)
    v_up = eval_arrays(A, sigma, delta, p, q, K * up, L * up)
    v_down = eval_arrays(A, sigma, delta, p, q, K * down, L * down)
    with np.errstate(all="ignore"):
        return np.log(v_up / v_down) / (2 * step)


def homogeneity_degree(params: Parameters, x: InputPoint, step: float = RAY_LOG_STEP) -> float:
    """Local returns-to-scale: the log-derivative of output along the ray through ``x``."""
    up, down = math.exp(step), math.exp(-step)
    v_up = eval_v(params, InputPoint(x.K * up, x.L * up)).v
    v_down = eval_v(params, InputPoint(x.K * down, x.L * down)).v
    return math.log(v_up / v_down) / (2 * step)


def substitution_elasticity(
    params: Parameters, x: InputPoint, zero_tol: float = 1e-12, degenerate_tol: float = 1e-7
) -> SubstitutionElasticity:
    """Direct elasticity of substitution d ln(K/L) / d ln(MRTS) along the isoquant.

    Uses the two-input form
        -F_K F_L (K F_K + L F_L) / (K L (F_KK F_L^2 - 2 F_KL F_K F_L + F_LL F_K^2)).
    When the curvature term vanishes relative to its own size the isoquant has no
    curvature information (e.g. rays when sigma = 0) and ``degenerate`` is set.
    """
    v = eval_v(params, x).v
    g = gradient(params, x)
    fk, fl = g.dV_dK, g.dV_dL
    if abs(fk) * x.K <= zero_tol * abs(v) or abs(fl) * x.L <= zero_tol * abs(v):
        raise ZeroMarginalProduct(f"marginal product vanishes at K={x.K}, L={x.L}")
    H = hessian(params, x)
    fkl = 0.5 * (H.hkl + H.hlk)
    terms = (H.hkk * fl * fl, -2.0 * fkl * fk * fl, H.hll * fk * fk)
    curvature = sum(terms)
    size = sum(abs(t) for t in terms)
    numerator = -fk * fl * (x.K * fk + x.L * fl)
    degenerate = size == 0.0 or abs(curvature) <= degenerate_tol * size
    with np.errstate(all="ignore"):
        value = float(np.float64(numerator) / np.float64(x.K * x.L * curvature))
    return SubstitutionElasticity(value, degenerate)
