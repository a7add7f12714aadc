"""Scenario schema and translator tests."""

from __future__ import annotations

import json
from typing import TYPE_CHECKING

import pytest
from pydantic import ValidationError

from rmtlsize.adapters.scenario import (
    ScenarioPayload,
    load_scenario,
    payload_digest,
    to_design,
    to_model,
    to_scenario,
)
from rmtlsize.domain.model import Cause, Family, InputError, LossKind, SizingMethod

if TYPE_CHECKING:
    from pathlib import Path


def _payload(**overrides: object) -> dict[str, object]:
    arm = {
        "cause1": {"shape": 1.0, "rate": 0.1},
        "cause2": {"shape": 1.0, "rate": 0.05},
    }
    payload: dict[str, object] = {
        "name": "unit",
        "experimental": arm,
        "control": arm,
        "design": {"accrual": 5, "followup": 10, "tau": 10},
    }
    payload.update(overrides)
    return payload


@pytest.mark.parametrize("name", ["ph_like", "crossing_cif", "null"])
def test_shipped_scenarios_validate(scenario_dir: Path, name: str) -> None:
    payload = load_scenario(scenario_dir / f"{name}.json")
    assert payload.name == name
    assert payload.seed is not None


def test_defaults_fill_optional_sections() -> None:
    payload = ScenarioPayload.model_validate(_payload())
    assert payload.cause == 1
    assert payload.iterations == 1000
    assert payload.seed is None
    assert payload.table.censoring_targets == [None]
    assert SizingMethod.RMTLD_WU in payload.table.methods
    assert payload.sweep.tau_grid == []
    assert payload.experimental.cause1.family is Family.WEIBULL


@pytest.mark.parametrize(
    "overrides",
    [
        {"design": {"accrual": 5, "followup": 10, "tau": 16}},
        {
            "design": {"accrual": 5, "followup": 10, "tau": 10, "loss_theta": 40},
            "censoring_target": 0.3,
        },
        {"censoring_target": 1.2},
        {"cause": 3},
        {"iterations": 0},
        {"unknown": True},
    ],
)
def test_invalid_payloads_are_rejected(overrides: dict[str, object]) -> None:
    with pytest.raises(ValidationError):
        ScenarioPayload.model_validate(_payload(**overrides))


def test_load_scenario_wraps_errors(tmp_path: Path) -> None:
    with pytest.raises(InputError, match="not found"):
        load_scenario(tmp_path / "absent.json")
    broken = tmp_path / "broken.json"
    broken.write_text("{\"name\": \"x\"}", encoding="utf-8")
    with pytest.raises(InputError, match="invalid scenario"):
        load_scenario(broken)


def test_payload_digest_ignores_layout(tmp_path: Path) -> None:
    compact = tmp_path / "compact.json"
    spaced = tmp_path / "spaced.json"
    data = _payload(seed=7)
    compact.write_text(json.dumps(data, separators=(",", ":")), encoding="utf-8")
    spaced.write_text(json.dumps(dict(reversed(data.items())), indent=4), encoding="utf-8")

    digest = payload_digest(load_scenario(compact))
    assert digest == payload_digest(load_scenario(spaced))
    assert len(digest) == 64
    assert digest != payload_digest(ScenarioPayload.model_validate(_payload(seed=8)))


def test_translation_to_domain_values() -> None:
    payload = ScenarioPayload.model_validate(
        _payload(
            cause=2,
            design={"accrual": 5, "followup": 10, "tau": 8, "ratio": 2, "loss_theta": 40},
        )
    )
    model = to_model(payload.experimental)
    assert model.cause1.rate == 0.1
    assert model.common_weibull_shape == 1.0

    design = to_design(payload.design)
    assert (design.t_a, design.t_f, design.tau, design.r) == (5, 10, 8, 2)
    assert design.loss.kind is LossKind.UNIFORM
    assert design.loss.theta == 40

    scenario = to_scenario(payload, seed=99, iterations=150)
    assert scenario.master_seed == 99
    assert scenario.iterations == 150
    assert scenario.cause is Cause.COMPETING
    assert to_scenario(payload, seed=99).iterations == 1000
