"""Application configuration helpers."""

from __future__ import annotations

from .errors import ConfigurationError
from .logging import configure_logging
from .simulation import SimulationConfig, get_simulation_config
from .storage import OutputConfig, get_output_config

__all__ = [
    "ConfigurationError",
    "OutputConfig",
    "SimulationConfig",
    "configure_logging",
    "get_output_config",
    "get_simulation_config",
]
