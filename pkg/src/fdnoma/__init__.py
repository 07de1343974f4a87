"""Rate-region simulator for full-duplex cognitive-relay NOMA downlinks."""

from .model import ChannelRealization, ConfigError, SystemParams, sample_channels, trial_rng
from .optimizer import Scheme, SolutionPoint, algorithm1
from .sinr import Beamformers, PowerAllocation

__version__ = "0.1.0"

__all__ = [
    "ChannelRealization", "ConfigError", "SystemParams", "sample_channels", "trial_rng",
    "Scheme", "SolutionPoint", "algorithm1", "Beamformers", "PowerAllocation",
]
