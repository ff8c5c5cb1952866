"""Region scans for positivity, returns to scale, curvature and monotonicity.

Grid scans enumerate K-major (all L values for the first K, then the next K);
random scans draw from a seeded counter-based stream. Each scan is a pure
function of ``(params, cfg)``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .audit import printed_eigenvalues
from .errors import NestFnError, ScanBudgetExceeded
from .model import (
    InputPoint,
    Parameters,
    eval_arrays,
    gradient_arrays,
    hessian,
    hessian_arrays,
    homogeneity_degree,
    log_elasticity_arrays,
    ray_degree_arrays,
)
from .rng import make_rng

HOMOGENEITY_SPREAD_TOL = 1e-6
DEGREE_ONE_TOL = 1e-6
NSD_REL_TOL = 1e-6
DEFAULT_BUDGET = 10_000_000

__all__ = [
    "ScanConfig",
    "DiagnosticsReport",
    "homogeneity_degree",
    "homogeneity_scan",
    "positivity_scan",
    "concavity_scan",
    "monotonicity_scan",
    "run_all",
]


@dataclass(frozen=True)
class ScanConfig:
    k_range: tuple[float, float] = (0.5, 10.0)
    l_range: tuple[float, float] = (0.5, 10.0)
    grid: int = 8
    samples: int = 10_000
    seed: int = 0
    log_spacing: bool = True
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        for name in ("k_range", "l_range"):
            lo, hi = getattr(self, name)
            if not (0 < lo <= hi and math.isfinite(hi)):
                raise ValueError(f"{name} must be a positive interval, got {(lo, hi)}")
            object.__setattr__(self, name, (float(lo), float(hi)))
        if self.grid < 2:
            raise ValueError("grid must be at least 2")
        if self.samples < 1:
            raise ValueError("samples must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    def check_budget(self):
        if self.grid * self.grid + self.samples > self.budget:
            raise ScanBudgetExceeded(
                f"grid^2 + samples = {self.grid**2 + self.samples} exceeds budget {self.budget}"
            )

    def grid_points(self) -> tuple[np.ndarray, np.ndarray]:
        space = np.geomspace if self.log_spacing else np.linspace
        ks = space(*self.k_range, self.grid)
        ls = space(*self.l_range, self.grid)
        K, L = np.meshgrid(ks, ls, indexing="ij")
        return K.ravel(), L.ravel()

    def random_points(self) -> tuple[np.ndarray, np.ndarray]:
        # K and L interleaved: draws 2i and 2i+1 of the stream make point i
        raw = make_rng(self.seed).random((self.samples, 2))
        if self.log_spacing:
            lk, ll = np.log(self.k_range), np.log(self.l_range)
            K = np.exp(lk[0] + raw[:, 0] * (lk[1] - lk[0]))
            L = np.exp(ll[0] + raw[:, 1] * (ll[1] - ll[0]))
        else:
            K = self.k_range[0] + raw[:, 0] * (self.k_range[1] - self.k_range[0])
            L = self.l_range[0] + raw[:, 1] * (self.l_range[1] - self.l_range[0])
        return K, L


@dataclass
class PositivitySection:
    checked: int
    violations: int
    first_violation: dict | None


@dataclass
class HomogeneitySection:
    points_checked: int
    degree_min: float
    degree_max: float
    is_homogeneous: bool
    claimed_degree_one: bool


@dataclass
class ConcavitySection:
    points_checked: int
    negative_semidefinite_count: int
    max_eig_over_region: float
    breakdowns: int
    unit_point_eigenvalues: dict = field(default_factory=dict)


@dataclass
class MonotonicitySection:
    points_checked: int
    share_dVdK_positive: float
    share_dVdL_positive: float


@dataclass
class DiagnosticsReport:
    positivity: PositivitySection
    homogeneity: HomogeneitySection
    concavity: ConcavitySection
    monotonicity: MonotonicitySection
    euler_identity_max_abs_err: float

    def as_dict(self) -> dict:
        return asdict(self)


def _args(params):
    return params.A, params.sigma, params.delta, params.p, params.q


def homogeneity_scan(params: Parameters, cfg: ScanConfig) -> HomogeneitySection:
    cfg.check_budget()
    K, L = cfg.grid_points()
    deg = ray_degree_arrays(*_args(params), K, L)
    finite = deg[np.isfinite(deg)]
    if finite.size == 0:
        return HomogeneitySection(0, math.nan, math.nan, False, False)
    lo, hi = float(finite.min()), float(finite.max())
    is_hom = finite.size == deg.size and hi - lo <= HOMOGENEITY_SPREAD_TOL
    degree_one = is_hom and abs(0.5 * (lo + hi) - 1.0) <= DEGREE_ONE_TOL
    return HomogeneitySection(int(finite.size), lo, hi, bool(is_hom), bool(degree_one))


def positivity_scan(params: Parameters, cfg: ScanConfig) -> PositivitySection:
    cfg.check_budget()
    K, L = cfg.random_points()
    v = eval_arrays(*_args(params), K, L)
    bad = ~(np.isfinite(v) & (v > 0))
    idx = np.flatnonzero(bad)
    first = {"K": float(K[idx[0]]), "L": float(L[idx[0]])} if idx.size else None
    return PositivitySection(int(K.size), int(idx.size), first)


def concavity_scan(params: Parameters, cfg: ScanConfig) -> ConcavitySection:
    """Hessian eigenvalues over the grid, plus the printed unit-point eigenvalues."""
    cfg.check_budget()
    K, L = cfg.grid_points()
    v = eval_arrays(*_args(params), K, L)
    hkk, hkl, hlk, hll = hessian_arrays(*_args(params), K, L)
    off = 0.5 * (hkl + hlk)
    mean = 0.5 * (hkk + hll)
    radius = np.hypot(0.5 * (hkk - hll), off)
    eig1, eig2 = mean + radius, mean - radius
    ok = np.isfinite(v) & np.isfinite(eig1) & np.isfinite(eig2)
    scale = np.maximum(np.abs(eig1), np.abs(eig2))
    nsd = ok & (eig1 <= NSD_REL_TOL * scale)
    max_eig = float(eig1[ok].max()) if ok.any() else math.nan

    lam1, lam2 = printed_eigenvalues(params)
    unit = {"paper_eig1": lam1, "paper_eig2": lam2, "computed_eig1": None, "computed_eig2": None}
    try:
        H = hessian(params, InputPoint(1.0, 1.0))
        unit["computed_eig1"], unit["computed_eig2"] = H.eig1, H.eig2
    except NestFnError:
        pass
    return ConcavitySection(int(ok.sum()), int(nsd.sum()), max_eig, int((~ok).sum()), unit)


def monotonicity_scan(params: Parameters, cfg: ScanConfig) -> MonotonicitySection:
    cfg.check_budget()
    K, L = cfg.grid_points()
    v, dk, dl = gradient_arrays(*_args(params), K, L)
    ok = np.isfinite(v) & np.isfinite(dk) & np.isfinite(dl)
    n = int(ok.sum())
    if n == 0:
        return MonotonicitySection(0, math.nan, math.nan)
    return MonotonicitySection(n, float((dk[ok] > 0).sum() / n), float((dl[ok] > 0).sum() / n))


def euler_identity_error(params: Parameters, cfg: ScanConfig) -> float:
    """Largest |eps_K + eps_L - ray degree| over the grid (an identity for any V)."""
    K, L = cfg.grid_points()
    ek, el = log_elasticity_arrays(*_args(params), K, L)
    deg = ray_degree_arrays(*_args(params), K, L)
    err = np.abs(ek + el - deg)
    err = err[np.isfinite(err)]
    return float(err.max()) if err.size else math.nan


def run_all(params: Parameters, cfg: ScanConfig) -> DiagnosticsReport:
    cfg.check_budget()
    return DiagnosticsReport(
        positivity=positivity_scan(params, cfg),
        homogeneity=homogeneity_scan(params, cfg),
        concavity=concavity_scan(params, cfg),
        monotonicity=monotonicity_scan(params, cfg),
        euler_identity_max_abs_err=euler_identity_error(params, cfg),
    )
