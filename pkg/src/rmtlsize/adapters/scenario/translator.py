"""Translate validated scenario payloads into domain values."""

from __future__ import annotations

import hashlib
from logging import getLogger
from typing import TYPE_CHECKING

from pydantic import ValidationError

from rmtlsize.domain.model import Cause, InputError, LossModel, TrialDesign
from rmtlsize.domain.parametric import CauseSpecificParams, CompetingRisksModel
from rmtlsize.domain.simulation import ScenarioConfig

from .schema import ScenarioPayload

if TYPE_CHECKING:
    from pathlib import Path

    from .schema import ArmPayload, DesignPayload

log = getLogger(__name__)


def load_scenario(path: Path) -> ScenarioPayload:
    try:
        raw = path.read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        raise InputError(f"scenario file not found: {path}") from exc
    try:
        return ScenarioPayload.model_validate_json(raw)
    except ValidationError as exc:
        raise InputError(f"invalid scenario {path}: {exc}") from exc


def payload_digest(payload: ScenarioPayload) -> str:
    """SHA-256 of the normalised payload, stable across key order and whitespace."""

    return hashlib.sha256(payload.model_dump_json().encode("utf-8")).hexdigest()


def to_model(arm: ArmPayload) -> CompetingRisksModel:
    return CompetingRisksModel(
        cause1=CauseSpecificParams(arm.cause1.family, arm.cause1.shape, arm.cause1.rate),
        cause2=CauseSpecificParams(arm.cause2.family, arm.cause2.shape, arm.cause2.rate),
    )


def to_design(design: DesignPayload) -> TrialDesign:
    loss = LossModel.none() if design.loss_theta is None else LossModel.uniform(design.loss_theta)
    return TrialDesign(
        t_a=design.accrual,
        t_f=design.followup,
        tau=design.tau,
        r=design.ratio,
        alpha=design.alpha,
        target_power=design.power,
        loss=loss,
    )


def to_scenario(
    payload: ScenarioPayload, *, seed: int, iterations: int | None = None
) -> ScenarioConfig:
    """Build the domain scenario; ``seed`` is required so every run records one."""

    scenario = ScenarioConfig(
        name=payload.name,
        model_e=to_model(payload.experimental),
        model_c=to_model(payload.control),
        design=to_design(payload.design),
        censoring_target=payload.censoring_target,
        iterations=payload.iterations if iterations is None else iterations,
        master_seed=seed,
        cause=Cause(payload.cause),
        tau_rule=payload.tau_rule,
    )
    log.debug(f"Scenario {scenario.name} translated with seed {seed}")
    return scenario
