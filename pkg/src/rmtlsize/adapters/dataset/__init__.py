"""Public interface for the subject-level dataset adapter."""

from __future__ import annotations

from .reader import read_dataset, split_arms

__all__ = [
    "read_dataset",
    "split_arms",
]
