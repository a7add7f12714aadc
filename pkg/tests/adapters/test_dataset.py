"""Reader tests for the subject-level dataset CSV."""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np
import pytest

from rmtlsize.adapters.dataset import read_dataset, split_arms
from rmtlsize.domain.model import DatasetFormatError, InputError

if TYPE_CHECKING:
    from pathlib import Path


def _write(tmp_path: Path, text: str) -> Path:
    path = tmp_path / "data.csv"
    path.write_text(text, encoding="utf-8")
    return path


def test_read_dataset_groups_in_file_order(toy_csv: Path) -> None:
    groups = read_dataset(toy_csv)

    assert list(groups) == ["treatment", "control"]
    treatment = groups["treatment"]
    assert treatment.group == "treatment"
    np.testing.assert_array_equal(treatment.times, [1.0, 2.0, 3.0, 4.0])
    np.testing.assert_array_equal(treatment.statuses, [1, 2, 0, 1])
    assert len(groups["control"]) == 4


def test_read_dataset_strips_whitespace(tmp_path: Path) -> None:
    path = _write(tmp_path, "time,status,group\n1.5,1, a \n2,0,b\n")
    groups = read_dataset(path)
    assert list(groups) == ["a", "b"]
    assert groups["a"].times[0] == 1.5


@pytest.mark.parametrize(
    ("text", "line"),
    [
        ("time,status\n1,1\n", 1),
        ("time,status,group\n", 2),
        ("time,status,group\n1,1,a\n-1,1,b\n", 3),
        ("time,status,group\n1,1,a\n2,3,b\n", 3),
        ("time,status,group\n1,1,a\nsoon,1,b\n", 3),
        ("time,status,group\n1,1,a\n2,1,b\n3,1,\n", 4),
        ("time,status,group\n1,1,a\n\n2,0,b\n", 3),
    ],
)
def test_read_dataset_reports_offending_line(tmp_path: Path, text: str, line: int) -> None:
    with pytest.raises(DatasetFormatError) as exc:
        read_dataset(_write(tmp_path, text))
    assert exc.value.line == line
    assert str(exc.value).startswith(f"line {line}:")


def test_read_dataset_missing_file(tmp_path: Path) -> None:
    with pytest.raises(InputError, match="not found"):
        read_dataset(tmp_path / "absent.csv")


def test_split_arms_defaults_to_second_group_as_experimental(toy_csv: Path) -> None:
    experimental, control = split_arms(read_dataset(toy_csv))
    assert experimental.group == "control"
    assert control.group == "treatment"


def test_split_arms_with_explicit_label(toy_csv: Path) -> None:
    experimental, control = split_arms(read_dataset(toy_csv), experimental="treatment")
    assert experimental.group == "treatment"
    assert control.group == "control"

    with pytest.raises(InputError, match="not in dataset groups"):
        split_arms(read_dataset(toy_csv), experimental="placebo")


def test_split_arms_needs_exactly_two_groups(tmp_path: Path) -> None:
    single = read_dataset(_write(tmp_path, "time,status,group\n1,1,a\n2,0,a\n"))
    with pytest.raises(InputError, match="exactly two groups"):
        split_arms(single)


def test_read_dataset_ignores_trailing_blank_lines(tmp_path: Path) -> None:
    groups = read_dataset(_write(tmp_path, "time,status,group\n1,1,a\n2,0,b\n\n\n"))
    assert list(groups) == ["a", "b"]
