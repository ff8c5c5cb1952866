"""Acceptance criteria, one test per criterion.

Run with ``pytest tests/test_acceptance.py``; the terminal summary prints one
PASS/FAIL line per criterion together with the measured figures.
"""

import json
import math
import time
from dataclasses import asdict
from decimal import Decimal

import numpy as np
import pytest

from nestfn.audit import audit_paper_formulas
from nestfn.data_io import (
    Observation,
    Panel,
    ReportDocument,
    SynthSpec,
    fit_payload,
    synth_panel,
    write_report_json,
)
from nestfn.diagnostics import ScanConfig, homogeneity_scan, positivity_scan
from nestfn.estimation import FitConfig, fit, fit_report_document, predict
from nestfn.model import (
    InputPoint,
    Parameters,
    elasticity_k,
    elasticity_l,
    eval_arrays,
    eval_v,
    gradient,
    hessian,
    homogeneity_degree,
)
from nestfn.rng import make_rng
from nestfn.special_cases import Form, SpecialCaseForm, reduced_eval

import oracles
from helpers import random_interior

POINTS_SEED = 2024
TRUE = Parameters(2.0, 0.8, 0.6, 0.4, 0.7)
# cube root of machine epsilon: balances truncation and roundoff in a central difference
FD_REL_STEP = 6e-6

criterion = pytest.mark.criterion


@pytest.fixture(scope="module")
def points():
    return random_interior(POINTS_SEED, 1000)


# -- report builders reused by the determinism criterion --------------------


def positivity_report() -> bytes:
    n = 100_000
    u = make_rng(4).random((n, 8))
    sign = lambda col: np.where(col < 0.5, 1.0, -1.0)  # noqa: E731
    sigma, delta = u[:, 0], u[:, 1]
    p = (0.1 + 0.9 * u[:, 2]) * sign(u[:, 4])
    q = (0.1 + 0.9 * u[:, 3]) * sign(u[:, 5])
    K = np.exp(math.log(0.1) + u[:, 6] * math.log(1000.0))
    L = np.exp(math.log(0.1) + u[:, 7] * math.log(1000.0))
    A = 0.5 + 2.0 * u[:, 0] * u[:, 1]
    v = eval_arrays(A, sigma, delta, p, q, K, L)
    undefined = int(np.sum(~np.isfinite(v)))
    nonpositive = int(np.sum(np.isfinite(v) & (v <= 0)))
    scan = positivity_scan(
        Parameters(1.0, 0.5, 0.5, 0.5, 0.5),
        ScanConfig(k_range=(0.1, 100.0), l_range=(0.1, 100.0), samples=n, seed=4),
    )
    payload = {
        "random_parameter_sweep": {"draws": n, "nonpositive": nonpositive, "domain_errors": undefined},
        "fixed_parameter_scan": asdict(scan),
    }
    return write_report_json(ReportDocument("diagnostics", payload))


HOMOGENEITY_CASES = {
    "sigma_0": Parameters(1.0, 0.0, 0.5, 0.5, 0.5),
    "sigma_1": Parameters(1.0, 1.0, 0.5, 0.5, 0.5),
    "sigma_half": Parameters(1.0, 0.5, 0.5, 0.5, 0.5),
}


def homogeneity_report() -> bytes:
    cfg = ScanConfig(k_range=(0.5, 10.0), l_range=(0.5, 10.0), grid=8, samples=1, seed=7)
    payload = {name: asdict(homogeneity_scan(P, cfg)) for name, P in HOMOGENEITY_CASES.items()}
    return write_report_json(ReportDocument("diagnostics", payload))


def roundtrip_fit():
    panel = synth_panel(SynthSpec(TRUE, 250, (0.5, 10.0), (0.5, 10.0), 0.0, seed=42))
    train, holdout = panel.split(200)
    result = fit(train, FitConfig(n_starts=32, seed=7, include_user_starts=(TRUE,)))
    return result, holdout, write_report_json(fit_report_document(result, "SYN", 7))


def noisy_fit():
    panel = synth_panel(SynthSpec(TRUE, 500, (0.5, 10.0), (0.5, 10.0), 0.05, seed=11))
    result = fit(panel, FitConfig(n_starts=32, seed=11))
    return result, write_report_json(fit_report_document(result, "SYN", 11))


_first_run = {}


def _cached(name, builder):
    if name not in _first_run:
        _first_run[name] = builder()
    return _first_run[name]


# -- criteria ----------------------------------------------------------------


@criterion(1, "gradient matches central differences")
def test_gradient_correctness(points, record_property):
    start = time.perf_counter()
    worst = 0.0
    for P, x in points:
        g = gradient(P, x)
        fk, fl = oracles.central_gradient(P, x.K, x.L, rel_step=FD_REL_STEP)
        worst = max(worst, abs(g.dV_dK - fk) / abs(fk), abs(g.dV_dL - fl) / abs(fl))
    elapsed = time.perf_counter() - start
    record_property("detail", f"max componentwise rel err {worst:.2e} (<= 1e-6), {elapsed:.3f}s (<= 1s)")
    assert worst <= 1e-6
    assert elapsed <= 1.0


@criterion(2, "Euler-ray identity")
def test_euler_ray_identity(points, record_property):
    worst = 0.0
    for P, x in points:
        worst = max(worst, abs(elasticity_k(P, x) + elasticity_l(P, x) - homogeneity_degree(P, x)))
    record_property("detail", f"max |eps_K + eps_L - ray degree| {worst:.2e} (<= 1e-8)")
    assert worst <= 1e-8


REDUCTIONS = [
    (Form.SIGMA_ZERO, lambda P: P.with_(sigma=0.0)),
    (Form.SIGMA_ONE, lambda P: P.with_(sigma=1.0)),
    (Form.DELTA_ZERO, lambda P: P.with_(delta=0.0)),
    (Form.DELTA_ONE, lambda P: P.with_(delta=1.0)),
    (Form.PURE_CAPITAL_INTENSIVE, lambda P: P.with_(sigma=1.0, delta=1.0)),
    (Form.PURE_LABOR_INTENSIVE, lambda P: P.with_(sigma=0.0, delta=1.0)),
    (Form.PLAIN_CES, lambda P: P.with_(p=P.q)),
]


@criterion(3, "reduced forms equal the general formula")
def test_reduction_equivalence(record_property):
    worst = {}
    for i, (tag, constrain) in enumerate(REDUCTIONS):
        err = 0.0
        for P, x in random_interior(POINTS_SEED + 1 + i, 1000):
            P = constrain(P)
            want = eval_v(P, x).v
            err = max(err, abs(reduced_eval(P, x, SpecialCaseForm(tag)) - want) / abs(want))
        worst[tag.value] = err
    record_property("detail", f"max rel err {max(worst.values()):.2e} over 7 x 1000 points (<= 1e-12)")
    assert max(worst.values()) <= 1e-12, worst


@criterion(4, "positivity over 1e5 draws")
def test_positivity(record_property):
    start = time.perf_counter()
    data = _cached("positivity", positivity_report)
    elapsed = time.perf_counter() - start
    payload = json.loads(data)["payload"]
    sweep, scan = payload["random_parameter_sweep"], payload["fixed_parameter_scan"]
    record_property(
        "detail",
        f"nonpositive {sweep['nonpositive']}, domain errors {sweep['domain_errors']}, "
        f"scan violations {scan['violations']}, {elapsed:.3f}s (<= 2s)",
    )
    assert sweep["draws"] == 100_000 and scan["checked"] == 100_000
    assert sweep["nonpositive"] == 0 and sweep["domain_errors"] == 0
    assert scan["violations"] == 0
    assert elapsed <= 2.0


@criterion(5, "homogeneity degree audit")
def test_homogeneity(record_property):
    report = json.loads(_cached("homogeneity", homogeneity_report))["payload"]
    s0, s1, mixed = report["sigma_0"], report["sigma_1"], report["sigma_half"]
    spread = mixed["degree_max"] - mixed["degree_min"]
    record_property(
        "detail",
        f"sigma=0 [{s0['degree_min']:.1e}, {s0['degree_max']:.1e}], "
        f"sigma=1 [{s1['degree_min']:.10f}, {s1['degree_max']:.10f}], mixed spread {spread:.3f}",
    )
    for section in (s0, s1):
        assert section["degree_max"] - section["degree_min"] <= 1e-8
    assert abs(s0["degree_min"]) <= 1e-8 and abs(s0["degree_max"]) <= 1e-8
    assert abs(s1["degree_min"] + 1) <= 1e-8 and abs(s1["degree_max"] + 1) <= 1e-8
    assert spread > 0.01
    assert not any(section["claimed_degree_one"] for section in report.values())


@criterion(6, "Hessian symmetry and closed-form check")
def test_hessian_quality(record_property):
    worst_sym = 0.0
    for P, x in random_interior(POINTS_SEED + 20, 100):
        H = hessian(P, x)
        scale = max(abs(H.hkk), abs(H.hkl), abs(H.hlk), abs(H.hll))
        worst_sym = max(worst_sym, abs(H.hkl - H.hlk) / scale)
    worst_exact = 0.0
    for P, x in random_interior(POINTS_SEED + 21, 100):
        P = P.with_(sigma=0.0)
        H = hessian(P, x)
        A, K, L = P.A, x.K, x.L
        exact = (0.0, -A / L**2, -A / L**2, 2 * A * K / L**3)
        scale = max(abs(e) for e in exact)
        got = (H.hkk, H.hkl, H.hlk, H.hll)
        worst_exact = max(worst_exact, max(abs(g - e) for g, e in zip(got, exact)) / scale)
    record_property("detail", f"symmetry {worst_sym:.2e} (<= 1e-5), collapse {worst_exact:.2e} (<= 1e-4)")
    assert worst_sym <= 1e-5
    assert worst_exact <= 1e-4


@criterion(7, "printed-formula audit")
def test_formula_audit(record_property):
    for P, x in random_interior(POINTS_SEED + 30, 100):
        audit_paper_formulas(P, x)
    labor = audit_paper_formulas(Parameters(1.0, 0.5, 0.5, 0.5, 0.5), InputPoint(4.0, 1.0))[
        "elasticity_l_closed_form"
    ].abs_deviation
    collapse = audit_paper_formulas(Parameters(1.0, 0.0, 0.5, 0.5, 0.5), InputPoint(2.0, 1.0))[
        "sigma_zero_reduction"
    ].abs_deviation
    record_property("detail", f"labor elasticity dev {labor:.6f}, sigma=0 reduction dev {collapse:.6f}")
    assert labor == pytest.approx(0.8826, abs=1e-3)
    assert collapse == pytest.approx(1.2929, abs=1e-3)


@criterion(8, "noiseless round-trip fit")
def test_roundtrip_fit(record_property):
    start = time.perf_counter()
    result, holdout, data = roundtrip_fit()
    elapsed = time.perf_counter() - start
    _first_run.setdefault("roundtrip", data)
    rel = np.max(np.abs(predict(result.params, holdout) / holdout.V - 1.0))
    record_property(
        "detail",
        f"rss {result.rss:.2e}, 1-R2 {1 - result.r_squared:.2e}, holdout rel {rel:.2e}, {elapsed:.1f}s (<= 30s)",
    )
    assert result.rss <= 1e-10
    assert result.r_squared >= 1 - 1e-9
    assert rel <= 1e-6
    assert elapsed <= 30.0


@criterion(9, "noisy fit sanity")
def test_noisy_fit(record_property):
    result, data = noisy_fit()
    _first_run.setdefault("noisy", data)
    payload = json.loads(data)["payload"]
    record_property("detail", f"R2 {result.r_squared:.4f}, converged {payload['converged']}")
    assert result.converged
    assert result.r_squared >= 0.90
    for key in ("r_squared", "std_error", "substitution_elasticity", "delta", "sigma", "rss", "converged"):
        assert payload[key] is not None, key
    assert payload["converged"] == "Achieved"


@criterion(10, "byte-identical reports on repeat")
def test_determinism(record_property):
    first = {
        "positivity": _cached("positivity", positivity_report),
        "homogeneity": _cached("homogeneity", homogeneity_report),
        "roundtrip": _cached("roundtrip", lambda: roundtrip_fit()[2]),
        "noisy": _cached("noisy", lambda: noisy_fit()[1]),
    }
    second = {
        "positivity": positivity_report(),
        "homogeneity": homogeneity_report(),
        "roundtrip": roundtrip_fit()[2],
        "noisy": noisy_fit()[1],
    }
    same = [name for name in first if first[name] == second[name]]
    record_property("detail", f"identical: {', '.join(same)}")
    assert same == list(first)


TABLE_ROWS = {
    "151": ("0.99", "0.43", "1.4", "1.13", "0.94", "0.30", "Achieved"),
    "251": ("0.96", "0.26", "0.5", "1.01", "1.05", "1.42", "Achieved"),
}
COLUMNS = ("r_squared", "std_error", "substitution_elasticity", "delta", "sigma", "rss", "converged")


@criterion(11, "published table rows serialize verbatim")
def test_table_format(record_property):
    matched = 0
    for code, row in TABLE_ROWS.items():
        values = {col: (lit if col == "converged" else Decimal(lit)) for col, lit in zip(COLUMNS, row)}
        text = write_report_json(ReportDocument("fit", fit_payload(industry_code=code, **values))).decode()
        for col, lit in zip(COLUMNS, row):
            rendered = json.dumps(lit) if col == "converged" else lit
            assert f'"{col}": {rendered},' in text, (code, col)
            matched += 1
    record_property("detail", f"{matched}/14 literals reproduced")
    assert matched == 14
