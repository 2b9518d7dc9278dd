"""Linear-loss channel model: per photon-number-pair yields and observed gains.

Each arm of the relay clicks if at least one of its photons survives the
half-channel (transmittance ``sqrt(eta)``) or a dark count fires; a success
needs both arms. Signal-induced successes carry the misalignment error
``e_d``, everything involving a dark count carries ``e_0``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DegenerateChannel, TruncationMismatch
from .sources import DEFAULT_KMAX, ThreeIntensitySource
from .statistics import STATES, ObservedStatistics

# Table I
DARK_COUNT = 3.0e-6
MISALIGNMENT = 0.015
BACKGROUND_ERROR = 0.5


@dataclass(frozen=True)
class ChannelParams:
    total_loss_db: float
    detector_efficiency: float = 1.0
    dark_count: float = DARK_COUNT
    misalignment: float = MISALIGNMENT
    background_error: float = BACKGROUND_ERROR
    basis: str = "Z"

    def __post_init__(self):
        # inf loss is allowed: the dark-count-only channel
        if not self.total_loss_db >= 0:
            raise ValueError("total_loss_db must be >= 0")
        if not 0 < self.detector_efficiency <= 1:
            raise ValueError("detector_efficiency must lie in (0, 1]")
        if not 0 <= self.dark_count < 1:
            raise ValueError("dark_count must lie in [0, 1)")
        if not 0 <= self.misalignment <= 0.5:
            raise ValueError("misalignment must lie in [0, 0.5]")
        if not 0 <= self.background_error <= 1:
            raise ValueError("background_error must lie in [0, 1]")
        if self.basis not in ("Z", "X"):
            raise ValueError(f"unknown basis {self.basis!r}")

    @property
    def eta(self) -> float:
        """Overall transmittance, detector efficiency folded in."""
        return 10.0 ** (-self.total_loss_db / 10.0) * self.detector_efficiency

    @property
    def eta_side(self) -> float:
        """Transmittance of one half of the channel (relay in the middle)."""
        return math.sqrt(self.eta)


@dataclass(frozen=True, eq=False)
class YieldMatrix:
    """``y[m, n]`` success probability and ``t[m, n] = e_mn * y_mn`` for |m>|n>."""

    y: np.ndarray
    t: np.ndarray
    basis: str = "Z"

    @property
    def k_max(self) -> int:
        return self.y.shape[0] - 1

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(("m", "n", "y", "t", "basis"))
            for m in range(self.y.shape[0]):
                for n in range(self.y.shape[1]):
                    w.writerow((m, n, repr(float(self.y[m, n])), repr(float(self.t[m, n])), self.basis))


def simulate_yield_matrix(params: ChannelParams, k_max: int = DEFAULT_KMAX) -> YieldMatrix:
    k = np.arange(k_max + 1)
    log_miss = k * np.log1p(-params.eta_side) if params.eta_side < 1 else np.where(k == 0, 0.0, -np.inf)
    miss = np.exp(log_miss)  # no photon of k reaches the relay
    sig = -np.expm1(log_miss)
    # 1 - miss (1 - p_d), written without cancellation for tiny p_d or eta
    arm = sig + miss * params.dark_count
    y = np.outer(arm, arm)
    q = np.outer(sig, sig)
    t = params.misalignment * q + params.background_error * (y - q)
    for a in (y, t):
        a.setflags(write=False)
    return YieldMatrix(y, t, params.basis)


def asymptotic_reference(ym: YieldMatrix) -> tuple[float, float]:
    """True (s11, e11), what infinitely many decoy intensities would reveal."""
    y11 = float(ym.y[1, 1])
    if y11 <= 0:
        raise DegenerateChannel("y11 = 0: the single-photon pair never succeeds")
    return y11, float(ym.t[1, 1]) / y11


def compose_observed(alice: ThreeIntensitySource, bob: ThreeIntensitySource, ym: YieldMatrix) -> ObservedStatistics:
    """Gains of the nine two-pulse sources as photon-number mixtures of ``ym``.

    Mass beyond the truncation is reported in ``tail`` (yields are at most 1,
    so the true gain lies within ``[S, S + tail]``).
    """
    K = ym.k_max
    if alice.k_max > K or bob.k_max > K:
        raise TruncationMismatch(f"sources truncate at {max(alice.k_max, bob.k_max)} but yields at {K}")

    def vec(dist):
        p = np.zeros(K + 1)
        p[: dist.k_max + 1] = dist.probs
        return p, dist.bar(K + 1)

    A = [vec(alice.state(s)) for s in STATES]
    B = [vec(bob.state(s)) for s in STATES]
    S = np.empty((3, 3))
    T = np.empty((3, 3))
    tail = np.empty((3, 3))
    for i, (pa, ta) in enumerate(A):
        for j, (pb, tb) in enumerate(B):
            S[i, j] = pa @ ym.y @ pb
            T[i, j] = pa @ ym.t @ pb
            tail[i, j] = ta + tb - ta * tb
    return ObservedStatistics(S, T, ym.basis, tail=tail)


def simulate_observed(
    params: ChannelParams,
    alice: ThreeIntensitySource,
    bob: ThreeIntensitySource,
    k_max: int | None = None,
) -> tuple[ObservedStatistics, YieldMatrix]:
    ym = simulate_yield_matrix(params, k_max if k_max is not None else max(alice.k_max, bob.k_max))
    return compose_observed(alice, bob, ym), ym
