"""Pydantic models describing scenario JSON files."""

from __future__ import annotations

from typing import Annotated, Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from rmtlsize.domain.model import Family, SizingMethod, TauRule

PositiveFloat = Annotated[float, Field(gt=0, allow_inf_nan=False)]
Probability = Annotated[float, Field(gt=0, lt=1)]


class ScenarioBaseModel(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class CausePayload(ScenarioBaseModel):
    family: Family = Family.WEIBULL
    shape: PositiveFloat
    rate: PositiveFloat


class ArmPayload(ScenarioBaseModel):
    cause1: CausePayload
    cause2: CausePayload


class DesignPayload(ScenarioBaseModel):
    accrual: Annotated[float, Field(ge=0, allow_inf_nan=False)]
    followup: PositiveFloat
    tau: PositiveFloat
    ratio: PositiveFloat = 1.0
    alpha: Probability = 0.05
    power: Probability = 0.8
    loss_theta: PositiveFloat | None = None

    @model_validator(mode="after")
    def _tau_within_study(self) -> DesignPayload:
        if self.tau > self.accrual + self.followup:
            raise ValueError("tau must not exceed accrual + followup")
        return self


class TablePayload(ScenarioBaseModel):
    censoring_targets: list[Probability | None] = Field(default_factory=lambda: [None])
    methods: list[SizingMethod] = Field(
        default_factory=lambda: [
            SizingMethod.HR,
            SizingMethod.SHR,
            SizingMethod.RMTLD_WEIBULL,
            SizingMethod.RMTLD_WU,
        ]
    )


class SweepPayload(ScenarioBaseModel):
    tau_grid: list[PositiveFloat] = Field(default_factory=list[float])
    accrual_grid: list[Annotated[float, Field(ge=0)]] = Field(default_factory=list[float])
    followup_grid: list[PositiveFloat] = Field(default_factory=list[float])
    methods: list[SizingMethod] = Field(default_factory=lambda: [SizingMethod.RMTLD_WEIBULL])


class ScenarioPayload(ScenarioBaseModel):
    name: str = Field(min_length=1)
    cause: Literal[1, 2] = 1
    experimental: ArmPayload
    control: ArmPayload
    design: DesignPayload
    censoring_target: Probability | None = None
    iterations: int = Field(default=1000, ge=1)
    seed: int | None = Field(default=None, ge=0, lt=2**64)
    tau_rule: TauRule = TauRule.FIXED
    table: TablePayload = Field(default_factory=TablePayload)
    sweep: SweepPayload = Field(default_factory=SweepPayload)

    @model_validator(mode="after")
    def _single_loss_spec(self) -> ScenarioPayload:
        if self.censoring_target is not None and self.design.loss_theta is not None:
            raise ValueError("give either censoring_target or design.loss_theta, not both")
        return self
