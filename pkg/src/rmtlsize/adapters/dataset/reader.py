"""Read subject-level competing-risks data from CSV into per-group datasets."""

from __future__ import annotations

from logging import getLogger
from typing import TYPE_CHECKING

import numpy as np
import pandas as pd
from pydantic import ValidationError

from rmtlsize.domain.model import DatasetFormatError, InputError, SurvivalDataset

from .schema import COLUMNS, DatasetRow

if TYPE_CHECKING:
    from pathlib import Path

log = getLogger(__name__)

# header is line 1, first record line 2
_FIRST_RECORD_LINE = 2


def _describe(error: ValidationError) -> str:
    first = error.errors()[0]
    location = ".".join(str(part) for part in first["loc"])
    return f"{location}: {first['msg']}"


def _is_blank(record: tuple[object, ...]) -> bool:
    return all(bool(pd.isna(value)) or not str(value).strip() for value in record)


def read_dataset(path: Path) -> dict[str, SurvivalDataset]:
    """Parse ``path`` into one dataset per group label, in order of first appearance.

    Blank lines at the end of the file are ignored; a blank line between records is
    an error, so reported line numbers always match the file.
    """

    try:
        frame = pd.read_csv(
            path, dtype=str, keep_default_na=False, skip_blank_lines=False, encoding="utf-8"
        )
    except FileNotFoundError as exc:
        raise InputError(f"dataset not found: {path}") from exc
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as exc:
        raise DatasetFormatError(f"cannot parse {path}: {exc}") from exc

    header = tuple(column.strip() for column in frame.columns)
    if header != COLUMNS:
        raise DatasetFormatError(
            f"expected header {','.join(COLUMNS)}, got {','.join(header)}", line=1
        )
    records = list(frame.itertuples(index=False, name=None))
    while records and _is_blank(records[-1]):
        records.pop()
    if not records:
        raise DatasetFormatError(f"{path} holds no records", line=_FIRST_RECORD_LINE)

    rows: list[DatasetRow] = []
    for offset, record in enumerate(records):
        if _is_blank(record):
            raise DatasetFormatError("blank line", line=offset + _FIRST_RECORD_LINE)
        try:
            rows.append(DatasetRow.model_validate(dict(zip(COLUMNS, record, strict=True))))
        except ValidationError as exc:
            raise DatasetFormatError(_describe(exc), line=offset + _FIRST_RECORD_LINE) from exc

    groups: dict[str, SurvivalDataset] = {}
    for label in dict.fromkeys(row.group for row in rows):
        members = [row for row in rows if row.group == label]
        groups[label] = SurvivalDataset(
            times=np.array([row.time for row in members], dtype=np.float64),
            statuses=np.array([row.status for row in members], dtype=np.int8),
            group=label,
        )
    log.info(f"Read {len(rows)} records in {len(groups)} groups from {path}")
    return groups


def split_arms(
    groups: dict[str, SurvivalDataset], *, experimental: str | None = None
) -> tuple[SurvivalDataset, SurvivalDataset]:
    """Order exactly two groups as (experimental, control).

    Without an explicit label the second group in file order is the experimental arm.
    """

    if len(groups) != 2:
        raise InputError(f"analysis needs exactly two groups, found {len(groups)}: {list(groups)}")
    labels = list(groups)
    if experimental is None:
        control_label, experimental_label = labels
    elif experimental in groups:
        experimental_label = experimental
        control_label = next(label for label in labels if label != experimental)
    else:
        raise InputError(f"group {experimental!r} not in dataset groups {labels}")
    return groups[experimental_label], groups[control_label]
