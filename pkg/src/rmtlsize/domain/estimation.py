"""Nonparametric estimation from subject-level competing-risks data.

Tied times: events of either cause at ``t`` are processed before censorings at
``t``, so subjects censored at ``t`` are still at risk there.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .model.data import StepCurve, SurvivalDataset
from .model.enums import Cause, SeMethod, Status
from .model.errors import EstimationError, InputError, RestrictionError
from .numerics import DEFAULT_TOLERANCE, find_root, normal_quantile
from .parametric import CauseSpecificParams, CompetingRisksModel

if TYPE_CHECKING:
    from collections.abc import Iterable

    from numpy.typing import NDArray

    from .model.data import SurvivalRecord
    from .numerics import RngStream, ToleranceConfig

log = logging.getLogger(__name__)

MIN_BOOTSTRAP_REPLICATES = 100

type SurvivalData = SurvivalDataset | Iterable[SurvivalRecord]


@dataclass(frozen=True, slots=True)
class RmtlEstimate:
    value: float
    se: float | None
    tau: float
    cause: Cause
    n: int
    skipped_resamples: int = 0

    def confidence_interval(self, alpha: float = 0.05) -> tuple[float, float]:
        if self.se is None:
            raise EstimationError("no standard error attached to this estimate")
        half = normal_quantile(1.0 - alpha / 2.0) * self.se
        return self.value - half, self.value + half


@dataclass(frozen=True, slots=True, eq=False)
class RiskTable:
    """Distinct event times with the number at risk and event counts per cause."""

    times: NDArray[np.float64]
    at_risk: NDArray[np.int64]
    d1: NDArray[np.int64]
    d2: NDArray[np.int64]

    @property
    def events(self) -> NDArray[np.int64]:
        return self.d1 + self.d2

    def deaths(self, cause: Cause) -> NDArray[np.int64]:
        return self.d1 if cause is Cause.EVENT_OF_INTEREST else self.d2

    def survival_after(self) -> NDArray[np.float64]:
        return np.cumprod(1.0 - self.events / self.at_risk)

    def survival_before(self) -> NDArray[np.float64]:
        after = self.survival_after()
        return np.concatenate(([1.0], after[:-1]))


def _as_dataset(data: SurvivalData) -> SurvivalDataset:
    dataset = data if isinstance(data, SurvivalDataset) else SurvivalDataset.from_records(data)
    if len(dataset) == 0:
        raise InputError("dataset is empty")
    return dataset


def risk_table(data: SurvivalData) -> RiskTable:
    dataset = _as_dataset(data)
    order = np.argsort(dataset.times, kind="stable")
    times = dataset.times[order]
    statuses = dataset.statuses[order]
    unique, first = np.unique(times, return_index=True)
    d1 = np.add.reduceat((statuses == Status.CAUSE_1).astype(np.int64), first)
    d2 = np.add.reduceat((statuses == Status.CAUSE_2).astype(np.int64), first)
    at_risk = len(dataset) - first.astype(np.int64)
    keep = (d1 + d2) > 0
    return RiskTable(times=unique[keep], at_risk=at_risk[keep], d1=d1[keep], d2=d2[keep])


def at_risk_counts(data: SurvivalDataset, times: NDArray[np.float64]) -> NDArray[np.int64]:
    """Number of subjects with observed time >= each of ``times``."""

    ordered = np.sort(data.times)
    return (len(data) - np.searchsorted(ordered, times, side="left")).astype(np.int64)


def km_event_free(data: SurvivalData) -> StepCurve:
    """Product-limit estimate of freedom from either cause."""

    table = risk_table(data)
    return StepCurve(knots=table.times, values=table.survival_after(), baseline=1.0)


def _aj_from_table(table: RiskTable, cause: Cause) -> StepCurve:
    deaths = table.deaths(cause)
    increments = table.survival_before() * deaths / table.at_risk
    keep = deaths > 0
    return StepCurve(
        knots=table.times[keep], values=np.cumsum(increments[keep]), baseline=0.0
    )


def aj_cif(data: SurvivalData, cause: Cause | int) -> StepCurve:
    """Aalen-Johansen cumulative incidence for ``cause``.

    Each jump is ``S(t-) d_j(t) / Y(t)`` with ``S`` the event-free product-limit curve.
    """

    return _aj_from_table(risk_table(data), Cause(cause))


def _event_free_at_end(dataset: SurvivalDataset) -> float:
    table = risk_table(dataset)
    return float(table.survival_after()[-1]) if table.times.size else 1.0


def _check_restriction(dataset: SurvivalDataset, tau: float) -> None:
    """Beyond the last observed time the curves are only known once everyone has failed."""

    if not tau > 0:
        raise InputError(f"tau must be > 0, got {tau}")
    if tau > dataset.max_time and _event_free_at_end(dataset) > 0:
        raise RestrictionError(
            f"tau={tau:g} exceeds the largest observed time {dataset.max_time:g}",
            bound=dataset.max_time,
        )


def _moments(curve: StepCurve, tau: float) -> tuple[float, float]:
    before = curve.knots < tau
    lost = tau - curve.knots[before]
    jumps = curve.jumps[before]
    mean = float(np.sum(jumps * lost))
    second = float(np.sum(jumps * lost**2))
    return mean, max(second - mean**2, 0.0)


def rmtl_hat(data: SurvivalData, cause: Cause | int, tau: float) -> RmtlEstimate:
    """Area under the Aalen-Johansen curve on ``[0, tau]``; ``se`` is left unset."""

    dataset = _as_dataset(data)
    _check_restriction(dataset, tau)
    mean, _ = _moments(aj_cif(dataset, cause), tau)
    return RmtlEstimate(value=mean, se=None, tau=tau, cause=Cause(cause), n=len(dataset))


def rtl_var_hat(data: SurvivalData, cause: Cause | int, tau: float) -> float:
    dataset = _as_dataset(data)
    _check_restriction(dataset, tau)
    _, variance = _moments(aj_cif(dataset, cause), tau)
    return variance


def martingale_variance(table: RiskTable, cause: Cause, tau: float) -> float:
    """Delta-method variance of the RMTL plug-in estimator.

    The estimator is written as a sum over event times of ``a(s) dN_j(s) + b(s) dN_k(s)``
    increments (``k`` the other cause) with
    ``a = [S(s-)(tau - s) - G(s)] / Y`` and ``b = -G(s) / Y``, where
    ``G(s)`` is the integral of ``F_j(t) - F_j(s-)`` over ``[s, tau]``. Tied events
    get the Greenwood factor ``Y / (Y - d)``; times where the whole risk set fails
    carry no variance.
    """

    curve = _aj_from_table(table, cause)
    inside = table.times <= tau
    times = table.times[inside]
    at_risk = table.at_risk[inside].astype(np.float64)
    own = table.deaths(cause)[inside]
    other = table.deaths(cause.other)[inside]
    survival_before = table.survival_before()[inside]

    tail_area = curve.integral(tau) - curve.cumulative_integral(times)
    g = tail_area - curve.left_limit(times) * (tau - times)
    a = (survival_before * (tau - times) - g) / at_risk
    b = -g / at_risk

    events = own + other
    informative = at_risk > events
    factor = np.divide(at_risk, at_risk - events, out=np.zeros_like(at_risk), where=informative)
    return float(np.sum((a**2 * own + b**2 * other) * factor))


def _bootstrap_se(
    dataset: SurvivalDataset, cause: Cause, tau: float, replicates: int, rng: RngStream
) -> tuple[float, int]:
    values: list[float] = []
    skipped = 0
    n = len(dataset)
    for index in range(replicates):
        picks = rng.child(index).generator.integers(0, n, size=n)
        resample = dataset.take(picks)
        if resample.event_count() == 0:
            skipped += 1
            continue
        values.append(_moments(aj_cif(resample, cause), tau)[0])
    if len(values) < 2:
        raise EstimationError(f"only {len(values)} of {replicates} bootstrap resamples usable")
    if skipped:
        log.warning(f"Skipped {skipped} of {replicates} bootstrap resamples without events")
    return float(np.std(values, ddof=1)), skipped


def rmtl_se(
    data: SurvivalData,
    cause: Cause | int,
    tau: float,
    method: SeMethod = SeMethod.MARTINGALE,
    *,
    replicates: int = 500,
    rng: RngStream | None = None,
) -> float:
    return estimate_rmtl(data, cause, tau, method, replicates=replicates, rng=rng).se or 0.0


def estimate_rmtl(
    data: SurvivalData,
    cause: Cause | int,
    tau: float,
    method: SeMethod = SeMethod.MARTINGALE,
    *,
    replicates: int = 500,
    rng: RngStream | None = None,
) -> RmtlEstimate:
    """RMTL estimate with its standard error (martingale or nonparametric bootstrap)."""

    dataset = _as_dataset(data)
    _check_restriction(dataset, tau)
    target = Cause(cause)
    table = risk_table(dataset)
    mean, _ = _moments(_aj_from_table(table, target), tau)
    skipped = 0
    match SeMethod(method):
        case SeMethod.MARTINGALE:
            se = math.sqrt(martingale_variance(table, target, tau))
        case SeMethod.BOOTSTRAP:
            if rng is None:
                raise InputError("bootstrap standard errors need a random stream")
            if replicates < MIN_BOOTSTRAP_REPLICATES:
                raise InputError(
                    f"bootstrap needs at least {MIN_BOOTSTRAP_REPLICATES} replicates, "
                    f"got {replicates}"
                )
            se, skipped = _bootstrap_se(dataset, target, tau, replicates, rng)
    return RmtlEstimate(
        value=mean, se=se, tau=tau, cause=target, n=len(dataset), skipped_resamples=skipped
    )


def fit_weibull_cause(
    data: SurvivalData, cause: Cause | int, cfg: ToleranceConfig = DEFAULT_TOLERANCE
) -> CauseSpecificParams:
    """Cause-specific Weibull MLE, other-cause events treated as censored.

    The rate has a closed form given the shape, ``rho^k = d / sum(t^k)``; the shape
    solves the profile score equation.
    """

    dataset = _as_dataset(data)
    target = Cause(cause)
    scale = dataset.max_time
    if scale <= 0:
        raise EstimationError("Weibull fit needs positive follow-up times")
    times = dataset.times / scale
    event_times = times[dataset.statuses == target]
    d = event_times.size
    if d < 2 or np.any(event_times <= 0):
        raise EstimationError(
            f"Weibull fit for cause {int(target)} needs at least two positive event times"
        )
    log_events = float(np.sum(np.log(event_times)))
    positive = times[times > 0]
    log_positive = np.log(positive)

    def score(log_k: float) -> float:
        k = math.exp(log_k)
        powered = positive**k
        return d / k + log_events - d * float(np.sum(powered * log_positive) / np.sum(powered))

    try:
        k = math.exp(find_root(score, -7.0, 5.0, cfg))
    except ArithmeticError as exc:
        raise EstimationError(f"Weibull shape for cause {int(target)} has no finite MLE") from exc
    rho = (d / float(np.sum(positive**k))) ** (1.0 / k) / scale
    return CauseSpecificParams.weibull(k, rho)


def fit_competing_risks_model(data: SurvivalData) -> CompetingRisksModel:
    dataset = _as_dataset(data)
    return CompetingRisksModel(
        cause1=fit_weibull_cause(dataset, Cause.EVENT_OF_INTEREST),
        cause2=fit_weibull_cause(dataset, Cause.COMPETING),
    )
