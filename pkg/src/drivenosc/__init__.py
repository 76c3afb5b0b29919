"""Metropolis sampling of driven harmonic oscillator ground states on a
periodic imaginary-time lattice."""

from .action import (
    ConstantForce,
    ForceModel,
    PeriodicityError,
    SinusoidalForce,
    TabulatedForce,
    ZeroForce,
    force_at,
    local_action_delta,
    total_action,
)
from .config import ConfigError, ExperimentConfig, format_config, load_config, parse_config
from .lattice import LatticeParams, PathState, neighbor_indices
from .sampler import ChainOutput, SamplerConfig, Start, run_chain, run_chains_parallel

__version__ = "0.1.0"

__all__ = [
    "ConstantForce",
    "ForceModel",
    "PeriodicityError",
    "SinusoidalForce",
    "TabulatedForce",
    "ZeroForce",
    "force_at",
    "local_action_delta",
    "total_action",
    "ConfigError",
    "ExperimentConfig",
    "format_config",
    "load_config",
    "parse_config",
    "LatticeParams",
    "PathState",
    "neighbor_indices",
    "ChainOutput",
    "SamplerConfig",
    "Start",
    "run_chain",
    "run_chains_parallel",
]
