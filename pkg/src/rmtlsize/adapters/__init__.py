"""File boundaries: dataset CSV, scenario JSON and report outputs."""

from __future__ import annotations
