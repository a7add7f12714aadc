"""Output location helpers."""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path
from typing import Final

DEFAULT_OUTPUT_DIR: Final[str] = "results"
MANIFEST_FILENAME: Final[str] = "manifest.json"


@dataclass(frozen=True, slots=True)
class OutputConfig:
    output_dir: Path
    manifest_filename: str = MANIFEST_FILENAME

    def resolve_output_dir(self) -> Path:
        return self.output_dir.expanduser().resolve()

    def ensure_output_dir(self) -> Path:
        output_dir = self.resolve_output_dir()
        output_dir.mkdir(parents=True, exist_ok=True)
        return output_dir

    def table_path(self, name: str, *, ensure: bool = True) -> Path:
        base = self.ensure_output_dir() if ensure else self.resolve_output_dir()
        return base / f"{name}.csv"

    def manifest_path(self, *, ensure: bool = True) -> Path:
        base = self.ensure_output_dir() if ensure else self.resolve_output_dir()
        return base / self.manifest_filename


def get_output_config(*, output_dir: Path | None = None) -> OutputConfig:
    if output_dir is not None:
        return OutputConfig(output_dir=output_dir)
    env_dir = os.getenv("RMTLSIZE_OUTPUT_DIR")
    return OutputConfig(output_dir=Path(env_dir) if env_dir else Path(DEFAULT_OUTPUT_DIR))
