import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mdidecoy.errors import DegenerateDecoyState, InvalidDistribution, InvalidIntensity
from mdidecoy.sources import (
    PhotonNumberDistribution,
    ThreeIntensitySource,
    check_condition,
    custom_distribution,
    poisson,
)


def test_poisson_first_terms():
    d = poisson(0.5)
    assert d[0] == pytest.approx(math.exp(-0.5), rel=1e-15)
    assert d[1] == pytest.approx(0.5 * math.exp(-0.5), rel=1e-15)
    assert d[2] == pytest.approx(0.125 * math.exp(-0.5), rel=1e-15)


def test_zero_intensity_is_vacuum():
    d = poisson(0.0)
    assert d[0] == 1.0 and d.tail_mass == 0.0
    assert all(p == 0 for p in d.probs[1:])


def test_tail_is_exact_mass_beyond_truncation():
    d = poisson(0.9, k_max=3)
    expected = 1 - sum(math.exp(-0.9) * 0.9**k / math.factorial(k) for k in range(4))
    assert d.tail_mass == pytest.approx(expected, rel=1e-12)
    assert d.bar(4) == d.tail_mass
    assert d.bar(0) == 1.0


def test_getitem_beyond_truncation_is_zero():
    assert poisson(0.1, k_max=5)[9] == 0.0


@pytest.mark.parametrize("mu", [-0.1, math.inf, math.nan])
def test_bad_intensity(mu):
    with pytest.raises(InvalidIntensity):
        poisson(mu)


def test_unnormalized_rejected():
    with pytest.raises(InvalidDistribution):
        PhotonNumberDistribution((0.5, 0.4), 0.0, 0.4)


def test_custom_distribution_tail_is_deficit():
    d = custom_distribution([0.7, 0.2, 0.05])
    assert d.tail_mass == pytest.approx(0.05)
    with pytest.raises(InvalidDistribution):
        custom_distribution([0.7, 0.5])


@given(st.floats(0.01, 2.0), st.integers(2, 60))
def test_poisson_normalized(mu, k_max):
    d = poisson(mu, k_max)
    assert abs(math.fsum(d.probs) + d.tail_mass - 1) <= 1e-12
    # non-increasing beyond the mode
    mode = int(mu)
    assert all(d.probs[k + 1] <= d.probs[k] for k in range(mode, k_max))


@given(st.floats(0.01, 0.5), st.floats(0.0, 1.0))
def test_poisson_pairs_satisfy_condition(mu1, gap):
    mu2 = mu1 + 0.01 + gap
    assert check_condition(poisson(mu1), poisson(mu2))


def test_condition_fails_for_reversed_pair():
    assert not check_condition(poisson(0.5), poisson(0.1))


def test_condition_needs_one_and_two_photon_mass():
    with pytest.raises(DegenerateDecoyState):
        check_condition(custom_distribution([0.5, 0.5]), poisson(0.5))


def test_source_validation():
    s = ThreeIntensitySource.poisson(0.1, 0.5, label="B")
    assert s.state("o")[0] == 1.0 and s.state("y").mean == 0.5 and s.k_max == 40
    with pytest.raises(InvalidIntensity):
        ThreeIntensitySource.poisson(0.5, 0.1)
    with pytest.raises(InvalidDistribution):
        ThreeIntensitySource(poisson(0.1), poisson(0.1), poisson(0.5))


def test_roundtrip_dict():
    d = poisson(0.3, 10)
    assert PhotonNumberDistribution.from_dict(d.to_dict()) == d
