"""Run configuration: defaults, JSON loading and command-line overrides."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

from .channel import BACKGROUND_ERROR, DARK_COUNT, MISALIGNMENT, ChannelParams
from .errors import ConfigError, DecoyError
from .keyrate import F_EC, METHODS, default_mu2_grid
from .sources import DEFAULT_KMAX, ThreeIntensitySource


def _grid(start: float, stop: float, step: float) -> list[float]:
    n = int(math.floor((stop - start) / step + 1e-9))
    return [round(start + k * step, 10) for k in range(n + 1)]


@dataclass(frozen=True)
class RunConfig:
    # channel (Table I)
    background_error: float = BACKGROUND_ERROR
    misalignment: float = MISALIGNMENT
    dark_count: float = DARK_COUNT
    f_ec: float = F_EC
    detector_efficiency: float = 1.0
    # sources: decoy and signal means for Alice (mu) and Bob (nu)
    mu1: float = 0.1
    mu2: float = 0.5
    nu1: float = 0.1
    nu2: float = 0.5
    k_max: int = DEFAULT_KMAX
    # loss grid for sweeps, and the single operating point for simulate/bound
    loss_start: float = 0.0
    loss_stop: float = 40.0
    loss_step: float = 0.5
    loss_points: tuple[float, ...] | None = None
    point_loss_db: float = 20.0
    # signal-intensity search
    mu2_grid_stop: float = 1.0
    mu2_grid_step: float = 0.01
    method: str = "exact"
    # simulate: pulses per (alice, bob, basis) cell
    n_sent: int = 10**12
    # validate
    oracle_instances: int = 200
    seed: int = 0
    out: str = "out"

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {', '.join(METHODS)}")
        if self.f_ec < 1:
            raise ConfigError("f_ec must be >= 1")
        if self.k_max < 2:
            raise ConfigError("k_max must be at least 2")
        if self.loss_step <= 0 or self.loss_stop < self.loss_start:
            raise ConfigError("bad loss grid")
        if self.loss_points is not None and len(self.loss_points) == 0:
            raise ConfigError("loss_points is empty")
        if self.mu2_grid_step <= 0:
            raise ConfigError("mu2_grid_step must be positive")
        if self.n_sent <= 0:
            raise ConfigError("n_sent must be positive")
        if self.oracle_instances < 0:
            raise ConfigError("oracle_instances must be >= 0")
        try:
            self.channel()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        data = dict(data)
        if data.get("loss_points") is not None:
            data["loss_points"] = tuple(float(v) for v in data["loss_points"])
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def from_json(cls, path: str | Path) -> "RunConfig":
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(data)

    def with_overrides(self, **kw) -> "RunConfig":
        """Apply non-None overrides."""
        kw = {k: v for k, v in kw.items() if v is not None}
        try:
            return replace(self, **kw)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    def to_dict(self) -> dict:
        d = asdict(self)
        if d["loss_points"] is not None:
            d["loss_points"] = list(d["loss_points"])
        return d

    def channel(self, loss_db: float | None = None, basis: str = "Z") -> ChannelParams:
        return ChannelParams(
            self.point_loss_db if loss_db is None else loss_db,
            self.detector_efficiency, self.dark_count, self.misalignment, self.background_error, basis,
        )

    def sources(self) -> tuple[ThreeIntensitySource, ThreeIntensitySource]:
        try:
            return (
                ThreeIntensitySource.poisson(self.mu1, self.mu2, self.k_max, "A"),
                ThreeIntensitySource.poisson(self.nu1, self.nu2, self.k_max, "B"),
            )
        except DecoyError as exc:
            raise ConfigError(str(exc)) from None

    def losses(self) -> list[float]:
        if self.loss_points is not None:
            return list(self.loss_points)
        return _grid(self.loss_start, self.loss_stop, self.loss_step)

    def mu2_grid(self) -> list[float]:
        return default_mu2_grid(self.mu1, self.mu2_grid_stop, self.mu2_grid_step)
