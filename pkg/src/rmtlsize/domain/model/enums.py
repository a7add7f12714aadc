"""Domain enums (pure, dependency-light)."""

from __future__ import annotations

from enum import IntEnum, StrEnum


class Cause(IntEnum):
    EVENT_OF_INTEREST = 1
    COMPETING = 2

    @property
    def other(self) -> Cause:
        return Cause.COMPETING if self is Cause.EVENT_OF_INTEREST else Cause.EVENT_OF_INTEREST


class Status(IntEnum):
    """Observed status code of a subject record."""

    CENSORED = 0
    CAUSE_1 = 1
    CAUSE_2 = 2


class Family(StrEnum):
    WEIBULL = "weibull"
    GOMPERTZ = "gompertz"
    LOGNORMAL = "lognormal"


class LossKind(StrEnum):
    NONE = "none"
    UNIFORM = "uniform"


class SizingMethod(StrEnum):
    RMTLD_WEIBULL = "rmtld_weibull"
    RMTLD_APPROX = "rmtld_approx"
    RMTLD_WU = "rmtld_wu"
    HR = "hr"
    SHR = "shr"


class SeMethod(StrEnum):
    MARTINGALE = "martingale"
    BOOTSTRAP = "bootstrap"


class AnalysisMethod(StrEnum):
    """Analysis methods whose rejection rates are compared (keyed like the power columns)."""

    LOGRANK = "hr"
    GRAY = "shr"
    RMTLD = "rmtld"


class TauRule(StrEnum):
    """How the analysis restriction time is chosen inside a simulated trial."""

    FIXED = "fixed"
    MIN_MAX = "min_max"
