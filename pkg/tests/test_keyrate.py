import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import golden_20db as golden
from conftest import LOSS_GRID, sources
from mdidecoy import keyrate as kr
from mdidecoy.channel import ChannelParams
from mdidecoy.errors import InvalidGrid, InvalidProbability


def inputs(**kw):
    base = dict(a1p_b1p=0.09, s11_z=0.01, e11_x=0.02, s_yy_z=0.002, e_yy_z=0.03)
    return kr.KeyRateInputs(**(base | kw))


def test_binary_entropy_values():
    assert kr.binary_entropy(0) == 0 and kr.binary_entropy(1) == 0
    assert kr.binary_entropy(0.5) == 1.0
    assert kr.binary_entropy(0.015) == pytest.approx(0.11236, abs=5e-6)


@given(st.floats(0, 1))
def test_binary_entropy_symmetric(e):
    assert abs(kr.binary_entropy(e) - kr.binary_entropy(1 - e)) <= 1e-15


@pytest.mark.parametrize("e", [-0.01, 1.01, math.nan])
def test_binary_entropy_domain(e):
    with pytest.raises(InvalidProbability):
        kr.binary_entropy(e)


def test_rate_without_single_photon_yield_is_pure_cost():
    inp = inputs(s11_z=0.0)
    assert kr.key_rate(inp) == pytest.approx(-0.002 * 1.16 * kr.binary_entropy(0.03))


def test_rate_without_errors():
    assert kr.key_rate(inputs(e11_x=0.0, e_yy_z=0.0)) == pytest.approx(0.09 * 0.01)


def test_high_phase_error_kills_privacy_term():
    assert kr.key_rate(inputs(e11_x=0.5)) == kr.key_rate(inputs(s11_z=0.0))


def test_inputs_validated():
    with pytest.raises(InvalidProbability):
        inputs(s11_z=1.5)
    with pytest.raises(ValueError):
        inputs(f_ec=0.9)


@given(st.floats(0, 0.99), st.floats(0, 0.01), st.floats(0, 0.49), st.floats(0, 0.01))
def test_rate_monotone_in_bounds(s, ds, e, de):
    # non-decreasing in s11, non-increasing in e11 on [0, 0.5)
    assert kr.key_rate(inputs(s11_z=s + ds)) >= kr.key_rate(inputs(s11_z=s)) - 1e-18
    if e + de < 0.5:
        assert kr.key_rate(inputs(e11_x=e + de)) <= kr.key_rate(inputs(e11_x=e)) + 1e-18


def test_point_matches_golden(point_20db):
    for m in ("exact", "123", "14", "alpha", "asymptotic"):
        assert point_20db.rate(m) == pytest.approx(golden.R[m], rel=1e-10)


def test_single_point_sweep_matches_key_rate(default_sources, point_20db):
    (row,) = kr.sweep_loss([20.0], *default_sources)
    assert row.R == point_20db.rate("exact") and row.secure
    assert row.s11["exact"] == point_20db.z.s11_exact


def test_sweep_rows_permute_with_grid(default_sources):
    grid = [3.0, 11.0, 29.5]
    a = kr.sweep_loss(grid, *default_sources)
    b = kr.sweep_loss(grid[::-1], *default_sources)
    assert [r.csv_fields() for r in a] == [r.csv_fields() for r in b[::-1]]


def test_parallel_sweep_is_identical(default_sources):
    grid = [0.0, 7.5, 15.0, 22.5, 30.0]
    serial = kr.sweep_loss(grid, *default_sources)
    parallel = kr.sweep_loss(grid, *default_sources, jobs=2)
    assert [r.csv_fields() for r in serial] == [r.csv_fields() for r in parallel]


def test_sweep_records_failures():
    # no light and no dark counts: y11 = 0 at infinite loss, the next point is fine
    alice, bob = sources()
    rows = kr.sweep_loss([math.inf, 10.0], alice, bob, channel=ChannelParams(0.0, dark_count=0.0))
    assert rows[0].error.startswith("DegenerateChannel") and not rows[0].secure
    assert rows[1].error is None
    assert rows[0].csv_fields()[1] == "nan"


def test_sweep_rejects_empty_grid(default_sources):
    with pytest.raises(InvalidGrid):
        kr.sweep_loss([], *default_sources)


def test_rates_non_increasing_on_grid(grid_rows):
    for m in kr.METHODS:
        r = kr.rates_array(grid_rows, m)
        assert np.all(np.diff(r) <= 1e-15), m


def test_secure_loss():
    rows = [kr.SweepRow(float(L), rates={"exact": 1e-3 - L * 1e-4}) for L in range(20)]
    assert kr.secure_loss(rows, "exact") == 9.0
    assert kr.secure_loss(rows[12:], "exact") == -math.inf


def test_default_mu2_grid():
    g = kr.default_mu2_grid(0.1)
    assert g[0] == 0.11 and g[-1] == 1.0 and len(g) == 90


def test_optimize_single_point_grid():
    mu2, r, curve = kr.optimize_signal_intensity(20.0, mu2_grid=[0.4])
    assert mu2 == 0.4 and curve == [(0.4, r)]


def test_optimize_ties_go_to_smaller_intensity():
    assert kr.argmax_curve([(0.3, 1.0), (0.4, 2.0), (0.5, 2.0), (0.6, math.nan)]) == (0.4, 2.0)


def test_optimize_grid_errors():
    with pytest.raises(InvalidGrid):
        kr.optimize_signal_intensity(20.0, mu2_grid=[])
    with pytest.raises(InvalidGrid):
        kr.optimize_signal_intensity(20.0, mu2_grid=[0.05, 0.5])


def test_optimum_at_20db_matches_golden():
    curves = kr.rate_curves(20.0)
    for m, (mu2, r) in golden.OPT.items():
        got_mu2, got_r = kr.argmax_curve([(mu, rates[m]) for mu, rates in curves])
        assert got_mu2 == mu2, m
        assert got_r == pytest.approx(r, rel=1e-10)


@pytest.mark.parametrize("loss", [0.0, 10.0, 20.0, 30.0, 40.0])
def test_optimal_rates_ordered(loss):
    curves = kr.rate_curves(loss, mu2_grid=[0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8])
    best = {m: kr.argmax_curve([(mu, r[m]) for mu, r in curves])[1] for m in ("exact", "123", "14")}
    assert best["exact"] >= best["123"] >= best["14"]
