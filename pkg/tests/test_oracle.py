import json

import numpy as np
import pytest
from hypothesis import given

from conftest import coefficients, intensities, losses
from mdidecoy import bounds_exact as be
from mdidecoy import oracle
from mdidecoy.errors import OracleTooLarge


def test_vertex_enumeration_small_lp():
    # min -x0 - 2 x1  s.t.  1 - x0 - x1 >= 0: best is x1 = 1
    lp = oracle.TruncatedLp(np.array([-1.0, -2.0]), np.array([-1.0, -1.0]), 1.0)
    val, x = oracle.vertex_enumerate(lp, "min")
    assert val == -2 and list(x) == [0, 1]
    val, _ = oracle.vertex_enumerate(lp, "max")
    assert val == 0


def test_fractional_vertex_found():
    lp = oracle.TruncatedLp(np.array([-3.0, -1.0]), np.array([-2.0, -2.0]), 1.0)
    val, x = oracle.vertex_enumerate(lp)
    assert val == pytest.approx(-1.5) and x[0] == pytest.approx(0.5)


def test_too_large():
    lp = oracle.TruncatedLp(np.zeros(13), np.zeros(13), 1.0)
    with pytest.raises(OracleTooLarge):
        oracle.vertex_enumerate(lp)


def test_infeasible_lp():
    lp = oracle.TruncatedLp(np.zeros(2), np.array([-1.0, -1.0]), -5.0)
    with pytest.raises(ValueError):
        oracle.vertex_enumerate(lp)


def test_problem_shapes():
    c = coefficients(20.0)
    assert oracle.s11_lp(c, 4).size == 8
    assert oracle.t11_row_lp(c, 12).size == 10
    assert (2, 2) not in oracle.s11_lp(c, 4).labels


@given(losses, intensities)
def test_solver_matches_oracle(loss, mu):
    c = coefficients(loss, *mu)
    _, sol = be.s11_exact_min(c, k_max=4, tails=False)
    assert sol.objective_bound == pytest.approx(oracle.oracle_s11(c, 4), rel=1e-9, abs=1e-18)
    t, _, _ = be.t11_exact_max(c, k_max=12, tails=False)
    assert t == pytest.approx(oracle.oracle_t11(c, 12), rel=1e-9, abs=1e-18)


@pytest.mark.parametrize("loss", [0.0, 40.0])
def test_solver_matches_oracle_at_grid_ends(loss):
    c = coefficients(loss)
    _, sol = be.s11_exact_min(c, k_max=4, tails=False)
    assert sol.objective_bound == pytest.approx(oracle.oracle_s11(c, 4), rel=1e-9)


def test_random_instances_are_reproducible():
    a = oracle.random_instance(np.random.default_rng(7))
    b = oracle.random_instance(np.random.default_rng(7))
    assert (a.mu1, a.mu2, a.loss_db, a.basis) == (b.mu1, b.mu2, b.loss_db, b.basis)
    assert 0.05 <= a.mu1 <= 0.2 and 0.3 <= a.mu2 <= 0.9 and 0 <= a.loss_db <= 40


def test_equivalence_checks_pass():
    checks = oracle.equivalence_checks(20, seed=3)
    assert len(checks) == 40 and all(ch.ok for ch in checks)


def test_validation_report():
    rep = oracle.validate_bounds({"s11_a": 0.1, "s11_b": 0.3}, {"e11_a": 0.02}, (0.2, 0.015))
    assert not rep.passed
    assert [ch.ok for ch in rep.checks] == [True, False, True]
    data = json.loads(rep.to_json())
    assert data["passed"] is False and len(data["checks"]) == 3
    assert "FAIL" in rep.to_table()
