"""Pydantic model describing one row of the dataset CSV (``time,status,group``)."""

from __future__ import annotations

import math
from typing import Final

from pydantic import BaseModel, ConfigDict, field_validator

COLUMNS: Final[tuple[str, ...]] = ("time", "status", "group")


class DatasetRow(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True, str_strip_whitespace=True)

    time: float
    status: int
    group: str

    @field_validator("time")
    @classmethod
    def _finite_non_negative(cls, value: float) -> float:
        if not math.isfinite(value) or value < 0:
            raise ValueError("time must be finite and non-negative")
        return value

    @field_validator("status")
    @classmethod
    def _known_status(cls, value: int) -> int:
        if value not in {0, 1, 2}:
            raise ValueError("status must be 0 (censored), 1 or 2")
        return value

    @field_validator("group")
    @classmethod
    def _non_blank(cls, value: str) -> str:
        if not value:
            raise ValueError("group label must not be blank")
        return value
