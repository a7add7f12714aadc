"""Domain value types shared by the computational modules."""

from __future__ import annotations

from .data import StepCurve, SurvivalDataset, SurvivalRecord
from .enums import (
    AnalysisMethod,
    Cause,
    Family,
    LossKind,
    SeMethod,
    SizingMethod,
    Status,
    TauRule,
)
from .errors import (
    BracketingError,
    ConvergenceError,
    DatasetFormatError,
    DegenerateInputError,
    DomainError,
    EstimationError,
    InfeasibleError,
    InfeasibleTargetError,
    InputError,
    NonFiniteError,
    NumericError,
    RestrictionError,
    RmtlSizeError,
    UndefinedEffectError,
    UnsupportedCaseError,
)
from .trial import LossModel, TrialDesign

__all__ = [
    "AnalysisMethod",
    "BracketingError",
    "Cause",
    "ConvergenceError",
    "DatasetFormatError",
    "DegenerateInputError",
    "DomainError",
    "EstimationError",
    "Family",
    "InfeasibleError",
    "InfeasibleTargetError",
    "InputError",
    "LossKind",
    "LossModel",
    "NonFiniteError",
    "NumericError",
    "RestrictionError",
    "RmtlSizeError",
    "SeMethod",
    "SizingMethod",
    "Status",
    "StepCurve",
    "SurvivalDataset",
    "SurvivalRecord",
    "TauRule",
    "TrialDesign",
    "UndefinedEffectError",
    "UnsupportedCaseError",
]
