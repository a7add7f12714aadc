from __future__ import annotations

from pathlib import Path

import pytest

from rmtlsize.domain.model import TrialDesign
from rmtlsize.domain.parametric import CompetingRisksModel

DATA_DIR = Path(__file__).resolve().parent / "data"
SCENARIO_DIR = Path(__file__).resolve().parents[1] / "scenarios"


@pytest.fixture(autouse=True)
def _isolated_environment(monkeypatch: pytest.MonkeyPatch) -> None:
    for name in (
        "RMTLSIZE_WORKERS",
        "RMTLSIZE_PHI_SAMPLES",
        "RMTLSIZE_PILOT_SIZE",
        "RMTLSIZE_BOOTSTRAP_REPLICATES",
        "RMTLSIZE_OUTPUT_DIR",
        "RMTLSIZE_LOG_LEVEL",
    ):
        monkeypatch.delenv(name, raising=False)


@pytest.fixture
def exponential_control() -> CompetingRisksModel:
    return CompetingRisksModel.weibull(1.0, 0.1, 1.0, 0.1)


@pytest.fixture
def exponential_experimental() -> CompetingRisksModel:
    return CompetingRisksModel.weibull(1.0, 0.15, 1.0, 0.1)


@pytest.fixture
def censoring_free_design() -> TrialDesign:
    """Follow-up reaches tau for everyone, so phi is exactly one."""

    return TrialDesign(t_a=5.0, t_f=10.0, tau=10.0)


@pytest.fixture
def ph_control() -> CompetingRisksModel:
    return CompetingRisksModel.weibull(1.0, 0.1, 1.0, 0.05)


@pytest.fixture
def ph_experimental() -> CompetingRisksModel:
    return CompetingRisksModel.weibull(1.0, 0.07, 1.0, 0.05)


@pytest.fixture
def staggered_design() -> TrialDesign:
    return TrialDesign(t_a=18.0, t_f=28.0, tau=15.0)


@pytest.fixture
def toy_csv() -> Path:
    return DATA_DIR / "toy.csv"


@pytest.fixture
def scenario_dir() -> Path:
    return SCENARIO_DIR
