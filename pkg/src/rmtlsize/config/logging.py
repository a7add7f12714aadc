"""Root logger setup for the rmtlsize CLI.

Run lifecycles (seeds, counts, calibrated loss) are logged at INFO, so the default
level keeps a rerunnable record on stderr next to the written manifest.
"""

from __future__ import annotations

import logging
import os

from .errors import ConfigurationError

LOG_FORMAT = "%(asctime)s %(levelname)s [%(name)s] %(message)s"


def configure_logging(*, level: int | None = None, force: bool = False) -> None:
    """Install the CLI handler; ``level`` overrides ``RMTLSIZE_LOG_LEVEL``."""

    logging.basicConfig(
        level=_level_from_env() if level is None else level,
        format=LOG_FORMAT,
        datefmt="%H:%M:%S",
        force=force,
    )


def _level_from_env() -> int:
    name = os.getenv("RMTLSIZE_LOG_LEVEL", "INFO").strip().upper()
    level = logging.getLevelNamesMapping().get(name)
    if level is None:
        raise ConfigurationError(f"RMTLSIZE_LOG_LEVEL is not a logging level: {name!r}")
    return level
