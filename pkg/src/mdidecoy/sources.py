"""Photon-number distributions of the three intensities each party sends."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from scipy.stats import poisson as _poisson

from .errors import DegenerateDecoyState, InvalidDistribution, InvalidIntensity

DEFAULT_KMAX = 40
NORMALIZATION_TOL = 1e-12
RATIO_TOL = 1e-12


@dataclass(frozen=True)
class PhotonNumberDistribution:
    """Probabilities ``probs[k]`` for k = 0..k_max plus the mass beyond k_max.

    The tail is kept explicitly; anything summing over all photon numbers
    should go through :meth:`bar` rather than ``sum(probs)``.
    """

    probs: tuple[float, ...]
    tail_mass: float
    mean: float

    def __post_init__(self):
        if any(p < 0 for p in self.probs) or self.tail_mass < 0:
            raise InvalidDistribution("probabilities must be non-negative")
        if abs(math.fsum(self.probs) + self.tail_mass - 1.0) > NORMALIZATION_TOL:
            raise InvalidDistribution("probabilities and tail must sum to 1")

    @property
    def k_max(self) -> int:
        return len(self.probs) - 1

    def __getitem__(self, k: int) -> float:
        if k < 0:
            raise IndexError(k)
        return self.probs[k] if k < len(self.probs) else 0.0

    def bar(self, k0: int) -> float:
        """Mass at photon numbers >= k0, tail included (``1 - sum_{k<k0} x_k``)."""
        if k0 <= 0:
            return 1.0
        return math.fsum(self.probs[k0:]) + self.tail_mass

    def to_dict(self) -> dict:
        return {"probs": list(self.probs), "tail_mass": self.tail_mass, "mean": self.mean}

    @classmethod
    def from_dict(cls, data: dict) -> "PhotonNumberDistribution":
        return cls(tuple(float(p) for p in data["probs"]), float(data["tail_mass"]), float(data["mean"]))


def poisson(mu: float, k_max: int = DEFAULT_KMAX) -> PhotonNumberDistribution:
    """Coherent-state (Poisson) photon-number distribution of intensity ``mu``."""
    if not math.isfinite(mu) or mu < 0:
        raise InvalidIntensity(f"intensity must be finite and >= 0, got {mu!r}")
    if k_max < 2:
        raise InvalidDistribution("k_max must be at least 2")
    if mu == 0:
        return PhotonNumberDistribution((1.0,) + (0.0,) * k_max, 0.0, 0.0)
    probs = [math.exp(-mu)]
    for k in range(1, k_max + 1):
        probs.append(probs[-1] * mu / k)
    # sf avoids the cancellation in 1 - sum(probs)
    tail = float(_poisson.sf(k_max, mu))
    return PhotonNumberDistribution(tuple(probs), tail, float(mu))


def custom_distribution(probs: Sequence[float], mean_hint: float | None = None) -> PhotonNumberDistribution:
    """Wrap user-supplied probabilities; whatever is missing from 1 becomes the tail."""
    probs = tuple(float(p) for p in probs)
    if not probs:
        raise InvalidDistribution("at least one probability is required")
    if any(not math.isfinite(p) or p < 0 for p in probs):
        raise InvalidDistribution("probabilities must be finite and non-negative")
    total = math.fsum(probs)
    if total > 1 + NORMALIZATION_TOL:
        raise InvalidDistribution(f"probabilities sum to {total} > 1")
    tail = max(0.0, 1.0 - total)
    mean = mean_hint if mean_hint is not None else math.fsum(k * p for k, p in enumerate(probs))
    return PhotonNumberDistribution(probs, tail, float(mean))


def _geq(lhs: float, rhs: float) -> bool:
    return lhs >= rhs - RATIO_TOL * max(abs(lhs), abs(rhs))


def check_condition(x: PhotonNumberDistribution, y: PhotonNumberDistribution) -> bool:
    """Decoy ordering: y_k/x_k >= y_2/x_2 >= y_1/x_1 for every k >= 2.

    Ratios are compared up to the shorter of the two truncations.
    """
    if x[1] <= 0 or x[2] <= 0:
        raise DegenerateDecoyState("decoy needs non-zero one- and two-photon probabilities")
    r1 = y[1] / x[1]
    r2 = y[2] / x[2]
    if not _geq(r2, r1):
        return False
    for k in range(3, min(x.k_max, y.k_max) + 1):
        if x[k] == 0:
            continue  # 0/0 is skipped, y_k/0 is +inf
        if not _geq(y[k] / x[k], r2):
            return False
    return True


@dataclass(frozen=True)
class ThreeIntensitySource:
    """One party's vacuum, decoy (x) and signal (y) states."""

    vacuum: PhotonNumberDistribution
    decoy_x: PhotonNumberDistribution
    signal_y: PhotonNumberDistribution
    label: str = "A"

    def __post_init__(self):
        if self.vacuum[0] != 1.0:
            raise InvalidDistribution("vacuum state must be a point mass at 0")
        if not self.decoy_x.mean < self.signal_y.mean:
            raise InvalidIntensity("decoy intensity must be below the signal intensity")
        if not check_condition(self.decoy_x, self.signal_y):
            raise InvalidDistribution("decoy/signal pair violates the decoy ordering condition")

    @classmethod
    def poisson(cls, mu_decoy: float, mu_signal: float, k_max: int = DEFAULT_KMAX, label: str = "A"):
        return cls(poisson(0.0, k_max), poisson(mu_decoy, k_max), poisson(mu_signal, k_max), label)

    @property
    def k_max(self) -> int:
        return min(self.vacuum.k_max, self.decoy_x.k_max, self.signal_y.k_max)

    def state(self, name: str) -> PhotonNumberDistribution:
        return {"o": self.vacuum, "x": self.decoy_x, "y": self.signal_y}[name]

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "vacuum": self.vacuum.to_dict(),
            "decoy_x": self.decoy_x.to_dict(),
            "signal_y": self.signal_y.to_dict(),
        }
