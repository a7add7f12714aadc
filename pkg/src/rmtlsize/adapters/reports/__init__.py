"""Public interface for tabular and manifest outputs."""

from __future__ import annotations

from .manifest import RunManifest, write_manifest
from .tables import (
    cif_frame,
    fit_frame,
    format_frame,
    power_table_frame,
    rmtl_frame,
    sample_size_frame,
    sweep_frame,
    tests_frame,
    write_records_json,
    write_table,
)

__all__ = [
    "RunManifest",
    "cif_frame",
    "fit_frame",
    "format_frame",
    "power_table_frame",
    "rmtl_frame",
    "sample_size_frame",
    "sweep_frame",
    "tests_frame",
    "write_manifest",
    "write_records_json",
    "write_table",
]
