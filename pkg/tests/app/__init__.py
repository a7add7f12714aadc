"""Application layer tests."""

from __future__ import annotations
