"""Monte Carlo defaults for phi estimation, pilots, bootstrap SEs and worker fan-out."""

from __future__ import annotations

from dataclasses import dataclass

from .env import positive_int_from_env

DEFAULT_WORKERS = 1
DEFAULT_PHI_SAMPLES = 100_000
DEFAULT_PILOT_SIZE = 500
DEFAULT_BOOTSTRAP_REPLICATES = 500


@dataclass(frozen=True, slots=True)
class SimulationConfig:
    workers: int = DEFAULT_WORKERS
    phi_samples: int = DEFAULT_PHI_SAMPLES
    pilot_size: int = DEFAULT_PILOT_SIZE
    bootstrap_replicates: int = DEFAULT_BOOTSTRAP_REPLICATES


def get_simulation_config() -> SimulationConfig:
    return SimulationConfig(
        workers=positive_int_from_env("RMTLSIZE_WORKERS", DEFAULT_WORKERS),
        phi_samples=positive_int_from_env("RMTLSIZE_PHI_SAMPLES", DEFAULT_PHI_SAMPLES),
        pilot_size=positive_int_from_env("RMTLSIZE_PILOT_SIZE", DEFAULT_PILOT_SIZE),
        bootstrap_replicates=positive_int_from_env(
            "RMTLSIZE_BOOTSTRAP_REPLICATES", DEFAULT_BOOTSTRAP_REPLICATES
        ),
    )
