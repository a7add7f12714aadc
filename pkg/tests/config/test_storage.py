from __future__ import annotations

from pathlib import Path

import pytest

from rmtlsize.config import get_output_config
from rmtlsize.config.storage import DEFAULT_OUTPUT_DIR, MANIFEST_FILENAME


def test_get_output_config_prefers_explicit_dir(
    monkeypatch: pytest.MonkeyPatch, tmp_path: Path
) -> None:
    monkeypatch.setenv("RMTLSIZE_OUTPUT_DIR", str(tmp_path / "from-env"))

    config = get_output_config(output_dir=tmp_path / "explicit")

    assert config.output_dir == tmp_path / "explicit"


def test_get_output_config_reads_environment(
    monkeypatch: pytest.MonkeyPatch, tmp_path: Path
) -> None:
    monkeypatch.setenv("RMTLSIZE_OUTPUT_DIR", str(tmp_path / "from-env"))

    assert get_output_config().output_dir == tmp_path / "from-env"


def test_get_output_config_default() -> None:
    assert get_output_config().output_dir == Path(DEFAULT_OUTPUT_DIR)


def test_table_and_manifest_paths_create_directory(tmp_path: Path) -> None:
    config = get_output_config(output_dir=tmp_path / "nested" / "run")

    table = config.table_path("samplesize")
    manifest = config.manifest_path()

    assert table == (tmp_path / "nested" / "run" / "samplesize.csv").resolve()
    assert manifest.name == MANIFEST_FILENAME
    assert table.parent.is_dir()


def test_paths_without_ensure_leave_filesystem_alone(tmp_path: Path) -> None:
    config = get_output_config(output_dir=tmp_path / "lazy")

    config.table_path("sweep_tau", ensure=False)

    assert not (tmp_path / "lazy").exists()
