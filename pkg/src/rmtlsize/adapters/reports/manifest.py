"""Run manifest: everything needed to rerun a command and get identical tables."""

from __future__ import annotations

from logging import getLogger
from typing import TYPE_CHECKING, Any

from pydantic import BaseModel, ConfigDict, Field

if TYPE_CHECKING:
    from pathlib import Path

log = getLogger(__name__)


class RunManifest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    command: str
    version: str
    seed: int | None = None
    config_sha256: str | None = None
    iterations: int | None = None
    workers: int = 1
    wall_time_seconds: float = 0.0
    parameters: dict[str, Any] = Field(default_factory=dict[str, Any])
    outputs: list[str] = Field(default_factory=list[str])


def write_manifest(path: Path, manifest: RunManifest) -> Path:
    path.write_text(manifest.model_dump_json(indent=2) + "\n", encoding="utf-8")
    log.info(f"Wrote manifest {path}")
    return path
