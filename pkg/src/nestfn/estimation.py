"""Multistart Nelder-Mead least squares for (A, sigma, delta, p, q).

The search runs in coordinates (log A, sigma, delta, p, q). Every trial point
is projected onto the box before it is scored; p and q are additionally pushed
out of the excluded band around zero, keeping their sign. Trial points where
any prediction is undefined score +inf.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .data_io import Panel, ReportDocument, fit_payload
from .errors import AllStartsFailed, NestFnError, NonPositiveBracket, TooFewObservations
from .model import MIN_ABS_CURVATURE, InputPoint, Parameters, eval_arrays, substitution_elasticity
from .rng import make_rng

N_FREE = 5
NAMES = ("A", "sigma", "delta", "p", "q")
DEFAULT_BOUNDS = {
    "A": (1e-6, 1e6),
    "sigma": (0.0, 2.0),
    "delta": (0.0, 2.0),
    "p": (-1.0, 1.0),
    "q": (-1.0, 1.0),
}


@dataclass(frozen=True)
class FitConfig:
    n_starts: int = 32
    seed: int = 0
    max_iters_per_start: int = 2000
    objective_tol: float = 1e-12
    param_tol: float = 1e-10
    bounds: dict = field(default_factory=lambda: dict(DEFAULT_BOUNDS))
    min_abs_curvature: float = MIN_ABS_CURVATURE
    include_user_starts: tuple = ()

    def __post_init__(self):
        if self.n_starts < 0:
            raise ValueError("n_starts must be non-negative")
        if self.n_starts + len(self.include_user_starts) < 1:
            raise ValueError("need at least one start")
        missing = set(NAMES) - set(self.bounds)
        if missing:
            raise ValueError(f"bounds missing for {sorted(missing)}")
        for name, (lo, hi) in self.bounds.items():
            if not lo <= hi:
                raise ValueError(f"empty bound for {name}: {(lo, hi)}")
        if self.bounds["A"][0] <= 0:
            raise ValueError("lower bound on A must be positive")
        for name in ("sigma", "delta"):
            lo, hi = self.bounds[name]
            if lo < 0 or hi > 2:
                raise ValueError(f"{name} bounds must lie within [0, 2]")
        for name in ("p", "q"):
            lo, hi = self.bounds[name]
            if max(abs(lo), abs(hi)) < self.min_abs_curvature:
                raise ValueError(f"{name} bounds leave no admissible value")
        object.__setattr__(self, "include_user_starts", tuple(self.include_user_starts))


@dataclass(frozen=True)
class FitStatistics:
    rss: float
    r_squared: float  # NaN when the panel has no variance
    std_error: float
    substitution_elasticity: float  # NaN when undefined at the median point

    @property
    def r_squared_defined(self) -> bool:
        return not math.isnan(self.r_squared)


@dataclass(frozen=True)
class FitResult:
    params: Parameters
    rss: float
    r_squared: float
    std_error: float
    substitution_elasticity: float
    converged: bool
    n_iterations: int
    best_start_index: int
    n_obs: int
    start_rss: tuple = ()


@dataclass(frozen=True)
class ResidualVector:
    values: np.ndarray

    @property
    def rss(self) -> float:
        return float(np.dot(self.values, self.values))

    def __len__(self):
        return len(self.values)


# -- predictions and statistics ------------------------------------------


def predict(params: Parameters, panel: Panel) -> np.ndarray:
    v = eval_arrays(params.A, params.sigma, params.delta, params.p, params.q, panel.K, panel.L)
    bad = np.flatnonzero(~np.isfinite(v))
    if bad.size:
        row = int(bad[0])
        raise NonPositiveBracket(f"output undefined at panel row {row}", row=row)
    return v


def residuals(params: Parameters, panel: Panel) -> ResidualVector:
    return ResidualVector(panel.V - predict(params, panel))


def _median_substitution_elasticity(params, panel) -> float:
    x = InputPoint(float(np.median(panel.K)), float(np.median(panel.L)))
    try:
        value, degenerate = substitution_elasticity(params, x)
    except NestFnError:
        return math.nan
    return math.nan if degenerate else value


def fit_statistics(params: Parameters, panel: Panel) -> FitStatistics:
    n = len(panel)
    if n <= N_FREE:
        raise TooFewObservations(f"std_error needs more than {N_FREE} observations, got {n}")
    rss = residuals(params, panel).rss
    V = panel.V
    centered = V - V.mean()
    tss = float(np.dot(centered, centered))
    r2 = 1.0 - rss / tss if tss > 0 else math.nan
    return FitStatistics(rss, r2, math.sqrt(rss / (n - N_FREE)), _median_substitution_elasticity(params, panel))


# -- search space ---------------------------------------------------------


class _Space:
    """Map between search coordinates and admissible parameter vectors."""

    def __init__(self, cfg: FitConfig):
        b = cfg.bounds
        self.lo = np.array([math.log(b["A"][0]), b["sigma"][0], b["delta"][0], b["p"][0], b["q"][0]])
        self.hi = np.array([math.log(b["A"][1]), b["sigma"][1], b["delta"][1], b["p"][1], b["q"][1]])
        self.min_abs = cfg.min_abs_curvature

    def project(self, z: np.ndarray) -> np.ndarray:
        z = np.clip(z, self.lo, self.hi)
        for i in (3, 4):
            if abs(z[i]) < self.min_abs:
                sign = -1.0 if z[i] < 0 else 1.0
                candidate = sign * self.min_abs
                if not self.lo[i] <= candidate <= self.hi[i]:
                    candidate = -candidate
                z[i] = candidate
        return z

    def to_params(self, z: np.ndarray) -> Parameters:
        z = self.project(np.array(z, dtype=float))
        return Parameters(math.exp(z[0]), z[1], z[2], z[3], z[4])

    def to_coords(self, P: Parameters) -> np.ndarray:
        return np.array([math.log(P.A), P.sigma, P.delta, P.p, P.q])

    def from_unit(self, u: np.ndarray) -> np.ndarray:
        """Map the unit cube onto the box; p and q skip the band around zero."""
        z = self.lo + u * (self.hi - self.lo)
        m = self.min_abs
        for i in (3, 4):
            lo, hi = self.lo[i], self.hi[i]
            if lo < m and hi > -m:
                neg = max(0.0, min(hi, -m) - lo)
                pos = max(0.0, hi - max(lo, m))
                t = u[i] * (neg + pos)
                z[i] = lo + t if t < neg else max(lo, m) + (t - neg)
        return self.project(z)


def latin_hypercube(n: int, d: int, rng: np.random.Generator) -> np.ndarray:
    """n points in [0, 1)^d with exactly one point per 1/n slab in every dimension."""
    u = np.empty((n, d))
    for j in range(d):
        u[:, j] = (rng.permutation(n) + rng.random(n)) / n
    return u


# -- Nelder-Mead -----------------------------------------------------------


@dataclass
class _LocalResult:
    z: np.ndarray
    f: float
    converged: bool
    iterations: int


def nelder_mead(func, x0, steps, max_iters=2000, objective_tol=1e-12, param_tol=1e-10) -> _LocalResult:
    """Adaptive-coefficient Nelder-Mead.

    Stops when the simplex values agree to ``objective_tol`` relative to the best
    value, or every vertex lies within ``param_tol`` (max-norm) of the best one.
    """
    n = len(x0)
    alpha, gamma, rho, shrink = 1.0, 1.0 + 2.0 / n, 0.75 - 0.5 / n, 1.0 - 1.0 / n
    simplex = np.empty((n + 1, n))
    simplex[0] = x0
    for i in range(n):
        vertex = np.array(x0, dtype=float)
        vertex[i] += steps[i]
        simplex[i + 1] = vertex
    fvals = np.array([func(v) for v in simplex])

    it = 0
    converged = False
    while True:
        order = np.argsort(fvals, kind="stable")
        simplex, fvals = simplex[order], fvals[order]
        f_best, f_worst = fvals[0], fvals[-1]
        if math.isfinite(f_worst) and f_worst - f_best <= objective_tol * abs(f_best):
            converged = True
            break
        if np.max(np.abs(simplex[1:] - simplex[0])) <= param_tol:
            converged = True
            break
        if it >= max_iters:
            break
        it += 1

        centroid = simplex[:-1].mean(axis=0)
        xr = centroid + alpha * (centroid - simplex[-1])
        fr = func(xr)
        if fr < fvals[0]:
            xe = centroid + gamma * (xr - centroid)
            fe = func(xe)
            if fe < fr:
                simplex[-1], fvals[-1] = xe, fe
            else:
                simplex[-1], fvals[-1] = xr, fr
            continue
        if fr < fvals[-2]:
            simplex[-1], fvals[-1] = xr, fr
            continue
        if fr < fvals[-1]:
            xc = centroid + rho * (xr - centroid)
            fc = func(xc)
            if fc <= fr:
                simplex[-1], fvals[-1] = xc, fc
                continue
        else:
            xc = centroid + rho * (simplex[-1] - centroid)
            fc = func(xc)
            if fc < fvals[-1]:
                simplex[-1], fvals[-1] = xc, fc
                continue
        for i in range(1, n + 1):
            simplex[i] = simplex[0] + shrink * (simplex[i] - simplex[0])
            fvals[i] = func(simplex[i])

    order = np.argsort(fvals, kind="stable")
    return _LocalResult(simplex[order[0]].copy(), float(fvals[order[0]]), converged, it)


# -- multistart fit --------------------------------------------------------


def _objective(space: _Space, K, L, V):
    def rss(z):
        zz = space.project(np.array(z, dtype=float))
        pred = eval_arrays(math.exp(zz[0]), zz[1], zz[2], zz[3], zz[4], K, L)
        r = V - pred
        value = float(np.dot(r, r))
        return value if math.isfinite(value) else math.inf

    return rss


def start_points(cfg: FitConfig) -> list[np.ndarray]:
    """Latin-hypercube starts (indices 0..n_starts-1), then user starts, in coordinates."""
    space = _Space(cfg)
    rng = make_rng(cfg.seed)
    starts = []
    if cfg.n_starts:
        for u in latin_hypercube(cfg.n_starts, N_FREE, rng):
            starts.append(space.from_unit(u))
    for P in cfg.include_user_starts:
        starts.append(space.project(space.to_coords(P)))
    return starts


def fit(panel: Panel, cfg: FitConfig) -> FitResult:
    n = len(panel)
    if n <= N_FREE:
        raise TooFewObservations(f"need at least {N_FREE + 1} observations, got {n}")
    space = _Space(cfg)
    objective = _objective(space, panel.K, panel.L, panel.V)
    steps = 0.05 * (space.hi - space.lo)

    results = []
    for z0 in start_points(cfg):
        # step toward the interior so the first simplex stays inside the box
        toward = np.where(z0 + steps > space.hi, -steps, steps)
        res = nelder_mead(
            objective, z0, toward, cfg.max_iters_per_start, cfg.objective_tol, cfg.param_tol
        )
        res.z = space.project(res.z)
        results.append(res)

    finite = [i for i, r in enumerate(results) if math.isfinite(r.f)]
    if not finite:
        raise AllStartsFailed("every start stayed in a region where the output is undefined")
    best = min(finite, key=lambda i: (results[i].f, i))
    winner = results[best]
    params = space.to_params(winner.z)
    stats = fit_statistics(params, panel)
    return FitResult(
        params=params,
        rss=stats.rss,
        r_squared=stats.r_squared,
        std_error=stats.std_error,
        substitution_elasticity=stats.substitution_elasticity,
        converged=winner.converged,
        n_iterations=winner.iterations,
        best_start_index=best,
        n_obs=n,
        start_rss=tuple(r.f for r in results),
    )


def fit_report_document(result: FitResult, industry_code: str | None, seed: int | None) -> ReportDocument:
    P = result.params
    payload = fit_payload(
        industry_code=industry_code,
        r_squared=result.r_squared,
        std_error=result.std_error,
        substitution_elasticity=result.substitution_elasticity,
        delta=P.delta,
        sigma=P.sigma,
        p=P.p,
        q=P.q,
        A=P.A,
        rss=result.rss,
        converged=result.converged,
        n_obs=result.n_obs,
        n_iterations=result.n_iterations,
        best_start_index=result.best_start_index,
        seed=seed,
    )
    return ReportDocument("fit", payload)
