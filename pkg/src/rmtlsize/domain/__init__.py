"""Computational core: numerics, models, estimation, tests, design and simulation."""

from __future__ import annotations
