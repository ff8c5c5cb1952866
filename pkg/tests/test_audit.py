import math

import pytest

from nestfn.audit import UNIT_POINT, audit_paper_formulas, printed_eigenvalues
from nestfn.model import InputPoint, Parameters, elasticity_l, hessian

from helpers import random_interior

EXPECTED_IDS = {
    "elasticity_k_closed_form",
    "elasticity_l_closed_form",
    "hessian_kk",
    "hessian_kl",
    "hessian_ll",
    "eigenvalue_1_at_unit",
    "eigenvalue_2_at_unit",
    "homogeneity_degree_one",
    "homogeneity_scaling_minus_p",
    "sigma_zero_reduction",
    "sigma_one_reduction",
    "capital_intensive_reduction",
    "labor_intensive_reduction",
    "equal_curvature_reduction",
}


def test_labor_elasticity_closed_form(worked):
    entry = audit_paper_formulas(*worked)["elasticity_l_closed_form"]
    # printed: (1 - q)(1 - sigma)(K/L)^(-p) = 0.5 * 0.5 * 0.5
    assert entry.paper_value == pytest.approx(0.125, abs=1e-15)
    assert entry.computed_value == pytest.approx(elasticity_l(*worked), rel=1e-15)
    assert entry.abs_deviation == pytest.approx(0.125 + 25 / 33, rel=1e-12)
    assert entry.abs_deviation == pytest.approx(0.8826, abs=1e-3)


def test_sigma_zero_reduction_row():
    entry = audit_paper_formulas(Parameters(1.0, 0.0, 0.5, 0.5, 0.5), InputPoint(2.0, 1.0))["sigma_zero_reduction"]
    assert entry.paper_value == pytest.approx(math.sqrt(0.5), rel=1e-15)
    assert entry.computed_value == pytest.approx(2.0, rel=1e-15)
    assert entry.abs_deviation == pytest.approx(2 - math.sqrt(0.5), rel=1e-12)
    assert entry.abs_deviation == pytest.approx(1.2929, abs=1e-3)


def test_sigma_one_reduction_row_agrees(worked):
    entry = audit_paper_formulas(*worked)["sigma_one_reduction"]
    assert entry.abs_deviation == pytest.approx(0.0, abs=1e-15)


def test_unit_point_eigenvalues(worked):
    P, _ = worked
    assert printed_eigenvalues(P) == pytest.approx((-0.25, -0.125), abs=1e-15)
    record = audit_paper_formulas(*worked)
    H = hessian(P, UNIT_POINT)
    assert record["eigenvalue_1_at_unit"].computed_value == H.eig1
    assert record["eigenvalue_2_at_unit"].computed_value == H.eig2


def test_homogeneity_claims(worked):
    record = audit_paper_formulas(*worked)
    measured = -8 / 11  # sigma h^(-p/q) / bracket at the worked point, with a minus sign
    assert record["homogeneity_degree_one"].paper_value == 1.0
    assert record["homogeneity_degree_one"].abs_deviation == pytest.approx(1 + 8 / 11, abs=1e-8)
    assert record["homogeneity_scaling_minus_p"].paper_value == -0.5
    assert record["homogeneity_scaling_minus_p"].computed_value == pytest.approx(measured, abs=1e-8)


def test_undefined_printed_expression_is_recorded(worked):
    # (-1/p)^(1+p) has a negative base for p > 0
    entry = audit_paper_formulas(*worked)["elasticity_k_closed_form"]
    assert entry.paper_value is None and entry.abs_deviation is None
    assert "negative base" in entry.error
    assert entry.computed_value == pytest.approx(1 / 33, rel=1e-12)


def test_negative_p_makes_printed_capital_elasticity_defined():
    entry = audit_paper_formulas(Parameters(1.0, 0.5, 0.5, -0.5, 0.5), InputPoint(2.0, 1.0))[
        "elasticity_k_closed_form"
    ]
    assert entry.error is None
    assert entry.abs_deviation > 1e-3


def test_runs_everywhere():
    for P, x in random_interior(seed=5, n=100):
        record = audit_paper_formulas(P, x)
        assert set(record) == EXPECTED_IDS
        for entry in record.values():
            assert entry.computed_value is not None or entry.error
