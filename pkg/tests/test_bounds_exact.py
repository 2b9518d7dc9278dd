import dataclasses

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import coefficients, intensities, losses, sources
from mdidecoy import bounds_analytic as ba
from mdidecoy import bounds_exact as be
from mdidecoy.channel import ChannelParams, YieldMatrix, asymptotic_reference, compose_observed, simulate_observed
from mdidecoy.errors import UndefinedErrorBound
from mdidecoy.statistics import reduce


def synthetic_coefficients(y, k_max):
    alice, bob = sources(k_max=k_max)
    rg = reduce(compose_observed(alice, bob, YieldMatrix(y, 0.3 * y)), alice, bob)
    return be.cop_coefficients(rg, alice, bob)


@pytest.mark.parametrize("seed", range(5))
def test_elimination_reproduces_the_four_yields(seed):
    # s_ij = s_ij* + sum over every other cell f_ij(m, n) s_mn, for arbitrary yields
    K = 10
    y = np.random.default_rng(seed).uniform(0, 1, (K + 1, K + 1))
    c = synthetic_coefficients(y, K)
    others = [(m, n) for m in range(1, K + 1) for n in range(1, K + 1) if not (m <= 2 and n <= 2)]
    for (i, j), star, f in (((1, 1), c.s11_star, c.f11), ((1, 2), c.s12_star, c.f12),
                            ((2, 1), c.s21_star, c.f21), ((2, 2), c.s22_star, c.f22)):
        rebuilt = star + sum(f(m, n) * y[m, n] for m, n in others)
        assert rebuilt == pytest.approx(y[i, j], rel=1e-9), (i, j)


@given(losses, intensities)
def test_sign_structure_and_monotone_ratios(loss, mu):
    c = coefficients(loss, *mu)
    assert c.invariants_hold()
    K = c.k_max
    for m in range(2, K + 1):
        for n in (2, 3, K):
            if (m, n) != (2, 2):
                assert c.f11(m, n) <= 0 and c.f22(m, n) <= 0
        assert c.f12(1, m) <= 1e-300 or m == 2
    ha = [c.h_a(k) for k in range(2, K + 1)]
    assert all(x <= y * (1 + 1e-12) for x, y in zip(ha, ha[1:]))
    assert ha[-1] <= c.h_a_hat * (1 + 1e-12)


def test_tail_sums_match_truncated_sums():
    c = coefficients(10.0, k_max=40)
    assert c.u_a_from(c.k_max + 1) == pytest.approx(c.u_a_tail, rel=1e-9)
    assert c.u_a_from(5) == pytest.approx(c.u_a[5:].sum() + c.u_a_tail, rel=1e-12)
    assert c.F_c(3, 4) == pytest.approx(sum(c.f22(m, 4) for m in range(3, 41)) - c.u_a_tail * c.u_b[4] / c.d,
                                        rel=1e-12)
    assert c.F_r(4, 3) == pytest.approx(sum(c.f22(4, n) for n in range(3, 41)) - c.u_a[4] * c.u_b_tail / c.d,
                                        rel=1e-12)


@given(losses, intensities)
def test_exact_dominates_123_and_is_valid(loss, mu):
    alice, bob = sources(*mu)
    for basis in ("Z", "X"):
        obs, ym = simulate_observed(ChannelParams(loss, basis=basis), alice, bob)
        rg = reduce(obs, alice, bob)
        c = be.cop_coefficients(rg, alice, bob)
        s, sol = be.s11_exact_min(c)
        t, _, _ = be.t11_exact_max(c)
        s_true, e_true = asymptotic_reference(ym)
        assert s >= ba.s11_123(rg, alice, bob).value - 1e-12
        assert s <= s_true + 1e-12
        assert t >= s_true * e_true - 1e-12
        assert be.e11_exact(s, t) >= e_true - 1e-12
        assert be.e11_exact(s, t) <= ba.e11_simple(rg, alice, bob, ba.s11_123(rg, alice, bob).value).value + 1e-12


@given(losses, intensities)
def test_greedy_structure(loss, mu):
    _, sol = be.s11_exact_min(coefficients(loss, *mu))
    assert sol.ordering_holds()
    frac = (sol.x > 0) & (sol.x < 1)
    assert frac.sum() <= 1
    # either the budget is spent or nothing more can be bought
    assert sol.residual <= 1e-12 * max(sol.budget, 1e-300) or np.all(sol.x[sol.weight > 0] == 1)


def test_solution_report_partitions_cells():
    _, sol = be.s11_exact_min(coefficients(20.0))
    d = sol.to_dict()
    n_frac = 0 if d["fractional_cell"] is None else 1
    assert len(d["saturated"]) + len(d["excluded"]) + n_frac == len(sol.items)
    assert 0 < sol.s_L < 1 and sol.fractional_cell.kind == "cell"


def test_truncation_barely_matters():
    s40, _ = be.s11_exact_min(coefficients(20.0, k_max=40))
    s12, _ = be.s11_exact_min(coefficients(20.0, k_max=12))
    assert s12 <= s40 * (1 + 1e-9)
    assert s12 == pytest.approx(s40, rel=1e-6)


def test_tail_blocks_are_conservative():
    # dropping the infinite tails solves a restricted problem, which can only raise s11
    c = coefficients(5.0, k_max=8)
    with_tails, _ = be.s11_exact_min(c)
    without, _ = be.s11_exact_min(c, tails=False)
    assert with_tails <= without + 1e-15


def test_zero_loss_saturates_every_cell():
    # every multi-photon pair clicks, and the s22 budget is never exhausted
    c = coefficients(0.0)
    s, sol = be.s11_exact_min(c)
    assert len(sol.saturated) == len(sol.items) and sol.fractional_cell is None
    assert sol.residual > 0
    *_, gain = be.s11_items(c)
    assert s == pytest.approx(c.s11_star - gain.sum(), rel=1e-12)


@pytest.mark.parametrize("tie_break", ["revlex", "colex", np.random.default_rng(4)])
def test_tie_break_does_not_move_the_bound(tie_break):
    c = coefficients(17.0)
    ref, _ = be.s11_exact_min(c, tie_break="lex")
    alt, _ = be.s11_exact_min(c, tie_break=tie_break)
    assert abs(ref - alt) < 1e-12 * ref


def test_negative_budget_is_flagged():
    c = coefficients(20.0)
    rg = dataclasses.replace(c.rg, s_yy=0.5 * c.rg.s_yy)
    c2 = be.cop_coefficients(rg, c.alice, c.bob)
    assert c2.s22_star < 0
    s, sol = be.s11_exact_min(c2)
    assert sol.infeasible and sol.residual == 0 and not sol.saturated
    assert sol.objective_bound == pytest.approx(c2.s11_star)


def test_broken_sign_structure_falls_back():
    c = coefficients(20.0)
    u = c.u_a.copy()
    u[5] = -1.0
    broken = dataclasses.replace(c, u_a=u)
    assert not broken.invariants_hold()
    s, sol = be.s11_exact_min(broken)
    assert sol.fallback == "B123" and s == ba.s11_123(c.rg, c.alice, c.bob).value
    _, row, _ = be.t11_exact_max(broken)
    assert row.fallback == "E11SIMPLE"


def test_k_max_above_truncation_rejected():
    c = coefficients(10.0, k_max=6)
    with pytest.raises(ValueError):
        be.s11_exact_min(c, k_max=7)
    with pytest.raises(ValueError):
        c.f11(7, 2)


def test_e11_exact_undefined():
    with pytest.raises(UndefinedErrorBound):
        be.e11_exact(0.0, 1e-3)
    assert be.e11_exact(0.01, 0.02) == 1.0


@given(st.floats(0.0, 40.0))
def test_t11_line_solutions_respect_budgets(loss):
    c = coefficients(loss)
    _, row, col = be.t11_exact_max(c)
    for sol, budget in ((row, c.t12_star), (col, c.t21_star)):
        assert float(sol.weight @ sol.x) <= max(budget, 0) * (1 + 1e-12) + 1e-300
        assert sol.ordering_holds()
