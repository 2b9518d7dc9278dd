import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from mdidecoy import keyrate as kr
from mdidecoy.bounds_exact import cop_coefficients
from mdidecoy.channel import ChannelParams, simulate_observed
from mdidecoy.sources import ThreeIntensitySource
from mdidecoy.statistics import reduce

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

LOSS_GRID = [round(0.5 * k, 10) for k in range(81)]

intensities = st.tuples(st.floats(0.05, 0.2), st.floats(0.3, 0.9))
losses = st.floats(0.0, 40.0)


def sources(mu1=0.1, mu2=0.5, k_max=40):
    return (ThreeIntensitySource.poisson(mu1, mu2, k_max, "A"), ThreeIntensitySource.poisson(mu1, mu2, k_max, "B"))


def coefficients(loss_db, mu1=0.1, mu2=0.5, basis="Z", k_max=40, nu=None):
    alice = ThreeIntensitySource.poisson(mu1, mu2, k_max, "A")
    bob = ThreeIntensitySource.poisson(*(nu or (mu1, mu2)), k_max, "B")
    obs, _ = simulate_observed(ChannelParams(loss_db, basis=basis), alice, bob)
    return cop_coefficients(reduce(obs, alice, bob), alice, bob)


@pytest.fixture(scope="session")
def default_sources():
    return sources()


@pytest.fixture(scope="session")
def grid_rows(default_sources):
    """The default 0-40 dB sweep, shared by the ordering/validity/rate tests."""
    return kr.sweep_loss(LOSS_GRID, *default_sources)


@pytest.fixture(scope="session")
def point_20db(default_sources):
    return kr.evaluate_point(ChannelParams(20.0), *default_sources)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, echoed at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
