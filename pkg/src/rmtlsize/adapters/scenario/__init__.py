"""Public interface for the scenario configuration adapter."""

from __future__ import annotations

from .schema import ScenarioPayload
from .translator import load_scenario, payload_digest, to_design, to_model, to_scenario

__all__ = [
    "ScenarioPayload",
    "load_scenario",
    "payload_digest",
    "to_design",
    "to_model",
    "to_scenario",
]
