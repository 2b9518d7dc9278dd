"""Three-intensity decoy-state estimation for measurement-device-independent QKD."""

from .channel import ChannelParams, simulate_observed, simulate_yield_matrix
from .config import RunConfig
from .errors import DecoyError
from .keyrate import evaluate_point, key_rate, optimize_signal_intensity, sweep_loss
from .sources import ThreeIntensitySource, poisson

__version__ = "0.1.0"

__all__ = [
    "ChannelParams",
    "DecoyError",
    "RunConfig",
    "ThreeIntensitySource",
    "evaluate_point",
    "key_rate",
    "optimize_signal_intensity",
    "poisson",
    "simulate_observed",
    "simulate_yield_matrix",
    "sweep_loss",
]
