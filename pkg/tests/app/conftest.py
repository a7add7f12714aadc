from __future__ import annotations

import json
from typing import TYPE_CHECKING

import pandas as pd
import pytest

from rmtlsize.domain.design import generate_arm
from rmtlsize.domain.model import TrialDesign
from rmtlsize.domain.numerics import RngStream
from rmtlsize.domain.parametric import CompetingRisksModel

if TYPE_CHECKING:
    from pathlib import Path


@pytest.fixture(autouse=True)
def _small_monte_carlo(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("RMTLSIZE_PHI_SAMPLES", "10000")
    monkeypatch.setenv("RMTLSIZE_PILOT_SIZE", "300")


@pytest.fixture
def simulated_csv(tmp_path: Path) -> Path:
    """Two simulated arms of 150 subjects under a censoring-free design."""

    design = TrialDesign(t_a=5.0, t_f=10.0, tau=10.0)
    frames = [
        pd.DataFrame(
            {
                "time": arm.times,
                "status": arm.statuses.astype(int),
                "group": label,
            }
        )
        for label, model, key in (
            ("placebo", CompetingRisksModel.weibull(1.0, 0.1, 1.0, 0.05), 0),
            ("drug", CompetingRisksModel.weibull(1.0, 0.2, 1.0, 0.05), 1),
        )
        for arm in (generate_arm(model, design, 150, RngStream(42, key)),)
    ]
    path = tmp_path / "simulated.csv"
    pd.concat(frames).to_csv(path, index=False)
    return path


@pytest.fixture
def small_scenario(tmp_path: Path) -> Path:
    arm_c = {"cause1": {"shape": 1.0, "rate": 0.1}, "cause2": {"shape": 1.0, "rate": 0.05}}
    arm_e = {"cause1": {"shape": 1.0, "rate": 0.2}, "cause2": {"shape": 1.0, "rate": 0.05}}
    payload = {
        "name": "small",
        "experimental": arm_e,
        "control": arm_c,
        "design": {"accrual": 5, "followup": 10, "tau": 10},
        "iterations": 100,
        "seed": 5,
        "table": {"censoring_targets": [None], "methods": ["hr", "rmtld_weibull"]},
        "sweep": {"tau_grid": [5, 10, 20]},
    }
    path = tmp_path / "small.json"
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path
