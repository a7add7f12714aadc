"""Trial design value types: accrual, follow-up, restriction time and loss."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING

import numpy as np

from .enums import LossKind
from .errors import InputError

if TYPE_CHECKING:
    from numpy.typing import ArrayLike, NDArray


@dataclass(frozen=True, slots=True)
class LossModel:
    """Loss to follow-up measured from entry: none, or Uniform(0, theta)."""

    kind: LossKind = LossKind.NONE
    theta: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", LossKind(self.kind))
        if self.kind is LossKind.UNIFORM:
            if self.theta is None or not math.isfinite(self.theta) or self.theta <= 0:
                raise InputError(f"uniform loss needs a finite theta > 0, got {self.theta}")
        elif self.theta is not None:
            raise InputError("theta is only meaningful for uniform loss")

    @classmethod
    def none(cls) -> LossModel:
        return cls()

    @classmethod
    def uniform(cls, theta: float) -> LossModel:
        return cls(kind=LossKind.UNIFORM, theta=theta)

    def survival(self, t: ArrayLike) -> NDArray[np.float64]:
        """P(loss time > t)."""

        times = np.asarray(t, dtype=np.float64)
        if self.theta is None:
            return np.ones_like(times)
        return np.clip(1.0 - times / self.theta, 0.0, 1.0)

    def sample(self, rng: np.random.Generator, size: int) -> NDArray[np.float64]:
        if self.theta is None:
            return np.full(size, np.inf)
        return rng.uniform(0.0, self.theta, size=size)


@dataclass(frozen=True, slots=True)
class TrialDesign:
    t_a: float
    t_f: float
    tau: float
    r: float = 1.0
    alpha: float = 0.05
    target_power: float = 0.8
    loss: LossModel = field(default_factory=LossModel.none)

    def __post_init__(self) -> None:
        if not self.t_a >= 0:
            raise InputError(f"accrual period must be >= 0, got {self.t_a}")
        if not self.t_f > 0:
            raise InputError(f"follow-up period must be > 0, got {self.t_f}")
        if not 0 < self.tau <= self.horizon:
            raise InputError(
                f"tau must lie in (0, t_a + t_f] = (0, {self.horizon:g}], got {self.tau}"
            )
        if not self.r > 0:
            raise InputError(f"allocation ratio must be > 0, got {self.r}")
        if not 0 < self.alpha < 1:
            raise InputError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not 0 < self.target_power < 1:
            raise InputError(f"target power must lie in (0, 1), got {self.target_power}")

    @property
    def horizon(self) -> float:
        """Latest possible observation time, t_a + t_f."""

        return self.t_a + self.t_f

    @property
    def beta(self) -> float:
        return 1.0 - self.target_power

    def with_tau(self, tau: float) -> TrialDesign:
        return replace(self, tau=tau)

    def with_loss(self, loss: LossModel) -> TrialDesign:
        return replace(self, loss=loss)

    def with_periods(self, t_a: float, t_f: float) -> TrialDesign:
        return replace(self, t_a=t_a, t_f=t_f)
