"""Key rate from the single-photon bounds, loss sweeps and signal-intensity search."""

from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import partial
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import bounds_analytic as ba
from . import bounds_exact as be
from .channel import ChannelParams, asymptotic_reference, simulate_observed
from .errors import DecoyError, InvalidGrid, InvalidProbability, UndefinedErrorBound
from .sources import DEFAULT_KMAX, ThreeIntensitySource
from .statistics import ObservedStatistics, ReducedGains, reduce

log = logging.getLogger(__name__)

F_EC = 1.16
METHODS = ("exact", "123", "124", "134", "234", "14", "alpha", "asymptotic")
SWEEP_COLUMNS = (
    "loss_db", "s11_123", "s11_124", "s11_134", "s11_234", "s11_14", "s11_alpha", "s11_exact",
    "s11_true", "e11_simple", "e11_exact", "e11_true", "R_method", "R_asymptotic", "secure",
)


def binary_entropy(e: float) -> float:
    if not 0 <= e <= 1:
        raise InvalidProbability(f"{e!r} is not a probability")
    if e == 0 or e == 1:
        return 0.0
    return -e * math.log2(e) - (1 - e) * math.log2(1 - e)


@dataclass(frozen=True)
class KeyRateInputs:
    a1p_b1p: float  # a'_1 b'_1
    s11_z: float
    e11_x: float
    s_yy_z: float
    e_yy_z: float
    f_ec: float = F_EC

    def __post_init__(self):
        for name in ("a1p_b1p", "s11_z", "e11_x", "s_yy_z", "e_yy_z"):
            v = getattr(self, name)
            if not 0 <= v <= 1:
                raise InvalidProbability(f"{name}={v!r} outside [0, 1]")
        if self.f_ec < 1:
            raise ValueError("error-correction inefficiency must be >= 1")


def key_rate(inp: KeyRateInputs) -> float:
    """Asymptotic secure bits per signal pulse pair; may be negative."""
    privacy = 0.0
    if inp.e11_x < 0.5:
        privacy = inp.a1p_b1p * inp.s11_z * (1 - binary_entropy(inp.e11_x))
    return privacy - inp.s_yy_z * inp.f_ec * binary_entropy(inp.e_yy_z)


@dataclass(frozen=True, eq=False)
class BasisBounds:
    obs: ObservedStatistics
    rg: ReducedGains
    analytic: dict[str, ba.AnalyticBound]
    s11_exact: float
    t11_exact: float
    solution: be.KnapsackSolution

    def e11_for(self, method: str, alice, bob) -> float:
        """Upper bound on e11 paired with the given s11 method; 1.0 when s11 <= 0."""
        try:
            if method == "exact":
                return be.e11_exact(self.s11_exact, self.t11_exact)
            return ba.e11_simple(self.rg, alice, bob, self.analytic[method].value).value
        except UndefinedErrorBound:
            return 1.0

    def s11_for(self, method: str) -> float:
        return self.s11_exact if method == "exact" else self.analytic[method].value


def basis_bounds(obs: ObservedStatistics, alice, bob) -> BasisBounds:
    rg = reduce(obs, alice, bob)
    analytic = ba.all_s11_bounds(rg, alice, bob)
    c = be.cop_coefficients(rg, alice, bob)
    s11, sol = be.s11_exact_min(c)
    t11, _, _ = be.t11_exact_max(c)
    return BasisBounds(obs, rg, analytic, s11, t11, sol)


@dataclass(frozen=True, eq=False)
class PointResult:
    """Every bound and rate at one channel setting."""

    params: ChannelParams
    alice: ThreeIntensitySource
    bob: ThreeIntensitySource
    z: BasisBounds
    x: BasisBounds
    s11_true: float
    e11_true: float
    f_ec: float = F_EC

    def inputs(self, method: str) -> KeyRateInputs:
        obs = self.z.obs
        if method == "asymptotic":
            s11, e11 = self.s11_true, self.e11_true
        else:
            s11, e11 = self.z.s11_for(method), self.x.e11_for(method, self.alice, self.bob)
        return KeyRateInputs(
            self.alice.signal_y[1] * self.bob.signal_y[1],
            s11, e11, obs.gain("y", "y"), obs.error_rate("y", "y"), self.f_ec,
        )

    def rate(self, method: str) -> float:
        return key_rate(self.inputs(method))


def evaluate_point(params: ChannelParams, alice, bob, f_ec: float = F_EC, k_max: int | None = None) -> PointResult:
    """Simulate both bases at ``params`` and run every estimator on them."""
    out, truth = {}, {}
    for basis in ("Z", "X"):
        obs, ym = simulate_observed(replace(params, basis=basis), alice, bob, k_max)
        out[basis] = basis_bounds(obs, alice, bob)
        truth[basis] = asymptotic_reference(ym)
    return PointResult(params, alice, bob, out["Z"], out["X"], truth["Z"][0], truth["X"][1], f_ec)


@dataclass(frozen=True)
class SweepRow:
    loss_db: float
    s11: dict[str, float] = field(default_factory=dict)
    s11_true: float = math.nan
    e11_simple: float = math.nan
    e11_exact: float = math.nan
    e11_true: float = math.nan
    rates: dict[str, float] = field(default_factory=dict)
    method: str = "exact"
    error: str | None = None

    @property
    def R(self) -> float:
        return self.rates.get(self.method, math.nan)

    @property
    def secure(self) -> bool:
        return self.error is None and self.R > 0

    def csv_fields(self) -> list[str]:
        vals = [self.loss_db] + [self.s11.get(k, math.nan) for k in ("123", "124", "134", "234", "14", "alpha", "exact")]
        vals += [self.s11_true, self.e11_simple, self.e11_exact, self.e11_true, self.R,
                 self.rates.get("asymptotic", math.nan)]
        return [repr(float(v)) for v in vals] + ["true" if self.secure else "false"]


def _sweep_point(loss_db: float, alice, bob, method, channel, f_ec, k_max) -> SweepRow:
    try:
        pr = evaluate_point(replace(channel, total_loss_db=float(loss_db)), alice, bob, f_ec, k_max)
        s11 = {k: pr.z.s11_for(k) for k in METHODS if k != "asymptotic"}
        return SweepRow(
            float(loss_db), s11, pr.s11_true,
            pr.x.e11_for("123", alice, bob), pr.x.e11_for("exact", alice, bob), pr.e11_true,
            {k: pr.rate(k) for k in METHODS}, method,
        )
    except DecoyError as exc:
        log.warning("sweep point %g dB failed: %s", loss_db, exc)
        return SweepRow(float(loss_db), method=method, error=f"{type(exc).__name__}: {exc}")


def sweep_loss(
    losses: Sequence[float],
    alice: ThreeIntensitySource,
    bob: ThreeIntensitySource,
    method: str = "exact",
    channel: ChannelParams | None = None,
    f_ec: float = F_EC,
    k_max: int | None = None,
    jobs: int = 1,
) -> list[SweepRow]:
    """One row per loss value, in input order; failures are recorded, not raised."""
    if len(losses) == 0:
        raise InvalidGrid("empty loss grid")
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    channel = channel or ChannelParams(0.0)
    fn = partial(_sweep_point, alice=alice, bob=bob, method=method, channel=channel, f_ec=f_ec, k_max=k_max)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, losses))
    return [fn(L) for L in losses]


def write_sweep_csv(rows: Sequence[SweepRow], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SWEEP_COLUMNS)
        for r in rows:
            w.writerow(r.csv_fields())


def default_mu2_grid(mu1: float, stop: float = 1.0, step: float = 0.01) -> list[float]:
    n = int(math.floor((stop - mu1) / step + 1e-9))
    return [round(mu1 + k * step, 10) for k in range(1, n + 1)]


def symmetric_poisson(mu1: float, mu2: float, k_max: int = DEFAULT_KMAX):
    return (ThreeIntensitySource.poisson(mu1, mu2, k_max, "A"), ThreeIntensitySource.poisson(mu1, mu2, k_max, "B"))


def _check_grid(grid: Sequence[float], mu1: float) -> list[float]:
    if not len(grid):
        raise InvalidGrid("empty signal-intensity grid")
    if any(m <= mu1 for m in grid):
        raise InvalidGrid("every signal intensity must exceed the decoy intensity")
    return sorted(float(m) for m in grid)


def rate_curves(
    loss_db: float,
    mu1_fixed: float = 0.1,
    mu2_grid: Sequence[float] | None = None,
    sources_builder: Callable = symmetric_poisson,
    channel: ChannelParams | None = None,
    f_ec: float = F_EC,
) -> list[tuple[float, dict[str, float]]]:
    """``(mu2, {method: R})`` over the ascending grid; failed points map to ``nan``."""
    grid = _check_grid(default_mu2_grid(mu1_fixed) if mu2_grid is None else mu2_grid, mu1_fixed)
    channel = replace(channel or ChannelParams(0.0), total_loss_db=float(loss_db))
    out = []
    for mu2 in grid:
        alice, bob = sources_builder(mu1_fixed, mu2)
        try:
            pr = evaluate_point(channel, alice, bob, f_ec)
            rates = {m: pr.rate(m) for m in METHODS}
        except DecoyError as exc:
            log.warning("mu2=%g at %g dB failed: %s", mu2, loss_db, exc)
            rates = {m: math.nan for m in METHODS}
        out.append((mu2, rates))
    return out


def argmax_curve(curve: Sequence[tuple[float, float]]) -> tuple[float, float]:
    """First maximizer (smallest intensity on ties); ``nan`` entries are skipped."""
    best = (math.nan, -math.inf)
    for mu2, r in curve:
        if r > best[1]:
            best = (mu2, r)
    if not math.isfinite(best[1]):
        raise InvalidGrid("no grid point produced a key rate")
    return best


def optimize_signal_intensity(
    loss_db: float,
    mu1_fixed: float = 0.1,
    mu2_grid: Sequence[float] | None = None,
    sources_builder: Callable = symmetric_poisson,
    method: str = "exact",
    channel: ChannelParams | None = None,
    f_ec: float = F_EC,
) -> tuple[float, float, list[tuple[float, float]]]:
    """Grid search of the signal intensity (same on both sides) maximizing R.

    Returns ``(mu2_opt, R_opt, curve)`` with ties going to the smaller intensity.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    curves = rate_curves(loss_db, mu1_fixed, mu2_grid, sources_builder, channel, f_ec)
    curve = [(mu2, rates[method]) for mu2, rates in curves]
    mu2, r = argmax_curve(curve)
    return mu2, r, curve


def secure_loss(rows: Sequence[SweepRow], method: str) -> float:
    """Largest loss on the grid with a positive rate for ``method`` (``-inf`` if none)."""
    pos = [r.loss_db for r in rows if r.error is None and r.rates.get(method, -1) > 0]
    return max(pos) if pos else -math.inf


def rates_array(rows: Sequence[SweepRow], method: str) -> np.ndarray:
    return np.array([r.rates.get(method, math.nan) for r in rows])
