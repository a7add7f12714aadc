"""Trial sizing: RMTL-difference sample sizes with censoring correction and comparators.

Entry is Uniform(0, t_a), the study closes at ``t_a + t_f`` and optional loss to
follow-up is Uniform(0, theta) from entry. The censoring inflation ``phi`` of the RMTL
standard error is estimated per arm from one large simulated cohort.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from .estimation import estimate_rmtl
from .model.data import SurvivalDataset
from .model.enums import Cause, SeMethod, SizingMethod, Status
from .model.errors import (
    EstimationError,
    InfeasibleError,
    InfeasibleTargetError,
    InputError,
    RestrictionError,
    UndefinedEffectError,
)
from .model.trial import LossModel
from .numerics import (
    DEFAULT_TOLERANCE,
    PHI_STREAM_BASE,
    RngStream,
    find_root,
    integrate,
    normal_cdf,
    normal_quantile,
)
from .parametric import cif, rmtl_true, rtl_variance_true, sample_events

if TYPE_CHECKING:
    from collections.abc import Iterable, Mapping, Sequence

    from numpy.typing import ArrayLike, NDArray

    from .model.trial import TrialDesign
    from .numerics import ToleranceConfig
    from .parametric import CompetingRisksModel

log = logging.getLogger(__name__)

MIN_PHI_SAMPLES = 10_000
# Absorbs float noise such as 245.99999999997 before rounding up.
_CEIL_SLACK = 1e-9
_FLOOR_MATCH = 1e-9


@dataclass(frozen=True, slots=True)
class SampleSizeResult:
    method: SizingMethod
    n_total: int
    n_E: int
    n_C: int
    delta: float | None = None
    phi_E: float | None = None
    phi_C: float | None = None
    sigma2_E_corrected: float | None = None
    sigma2_C_corrected: float | None = None
    diagnostics: Mapping[str, float] = field(default_factory=dict[str, float])

    def __post_init__(self) -> None:
        if self.n_total != self.n_E + self.n_C:
            raise InputError(f"n_total {self.n_total} != n_E {self.n_E} + n_C {self.n_C}")


@dataclass(frozen=True, slots=True)
class PilotVariance:
    """Pilot-based variance input: ``n * Var(mu_hat)`` estimates the RTL variance."""

    var_of_mean: float
    n: int

    def __post_init__(self) -> None:
        if not (self.var_of_mean > 0 and self.n > 0):
            raise InputError(
                f"pilot variance and size must be positive, got {self.var_of_mean}, {self.n}"
            )

    @property
    def sigma2(self) -> float:
        return self.n * self.var_of_mean


@dataclass(frozen=True, slots=True)
class TauSelection:
    tau: float
    result: SampleSizeResult
    curve: tuple[tuple[float, int], ...]


def ceil_count(x: float) -> int:
    return math.ceil(x - _CEIL_SLACK)


def _z_sum(alpha: float, beta: float) -> float:
    if not 0 < alpha < 1 or not 0 < beta < 1:
        raise InputError(f"alpha and beta must lie in (0, 1), got {alpha}, {beta}")
    return normal_quantile(1.0 - alpha / 2.0) + normal_quantile(1.0 - beta)


def _check_ratio(r: float) -> None:
    if not r > 0:
        raise InputError(f"allocation ratio must be > 0, got {r}")


def _split_total(n_total: float, r: float) -> tuple[int, int]:
    """Per-arm sizes for a formula total: ``n_C = ceil(n / (1 + r))``, ``n_E = ceil(r n_C)``."""

    n_C = ceil_count(n_total / (1.0 + r))
    return ceil_count(r * n_C), n_C


def _admin_survival_values(design: TrialDesign, t: ArrayLike) -> NDArray[np.float64]:
    times = np.asarray(t, dtype=np.float64)
    if design.t_a == 0:
        return np.where(times <= design.t_f, 1.0, 0.0)
    return np.clip((design.horizon - times) / design.t_a, 0.0, 1.0)


def admin_censoring_survival(design: TrialDesign, t: float) -> float:
    """P(administrative censoring time > t) under uniform entry over the accrual period."""

    if not t >= 0:
        raise InputError(f"t must be >= 0, got {t}")
    return float(_admin_survival_values(design, t))


def censoring_survival_values(design: TrialDesign, t: ArrayLike) -> NDArray[np.float64]:
    return _admin_survival_values(design, t) * design.loss.survival(t)


def _kinks(design: TrialDesign) -> tuple[float, ...]:
    theta = design.loss.theta
    return (design.t_f,) if theta is None else (design.t_f, theta)


def observe_prob_event(
    model: CompetingRisksModel,
    design: TrialDesign,
    cause: Cause | int,
    tau: float,
    cfg: ToleranceConfig = DEFAULT_TOLERANCE,
) -> float:
    """Probability that a subject's ``cause`` event is observed by ``tau``."""

    if not tau >= 0:
        raise InputError(f"tau must be >= 0, got {tau}")
    return integrate(
        lambda u: float(
            censoring_survival_values(design, u) * model.subdensity_values(cause, u)
        ),
        0.0,
        tau,
        cfg,
        breakpoints=_kinks(design),
    )


def pooled_event_probability(
    model_e: CompetingRisksModel,
    model_c: CompetingRisksModel,
    design: TrialDesign,
    cause: Cause | int,
    cfg: ToleranceConfig = DEFAULT_TOLERANCE,
) -> float:
    p_e = observe_prob_event(model_e, design, cause, design.tau, cfg)
    p_c = observe_prob_event(model_c, design, cause, design.tau, cfg)
    return (design.r * p_e + p_c) / (1.0 + design.r)


def censored_proportion(
    model: CompetingRisksModel, design: TrialDesign, cfg: ToleranceConfig = DEFAULT_TOLERANCE
) -> float:
    """Expected share of subjects for whom neither cause is ever observed."""

    observed = integrate(
        lambda u: float(
            censoring_survival_values(design, u)
            * (
                model.subdensity_values(Cause.EVENT_OF_INTEREST, u)
                + model.subdensity_values(Cause.COMPETING, u)
            )
        ),
        0.0,
        design.horizon,
        cfg,
        breakpoints=_kinks(design),
    )
    return min(max(1.0 - observed, 0.0), 1.0)


def pooled_censored_proportion(
    model_e: CompetingRisksModel,
    model_c: CompetingRisksModel,
    design: TrialDesign,
    cfg: ToleranceConfig = DEFAULT_TOLERANCE,
) -> float:
    c_e = censored_proportion(model_e, design, cfg)
    c_c = censored_proportion(model_c, design, cfg)
    return (design.r * c_e + c_c) / (1.0 + design.r)


def calibrate_loss(
    model_e: CompetingRisksModel,
    model_c: CompetingRisksModel,
    design: TrialDesign,
    target_censoring: float,
    cfg: ToleranceConfig = DEFAULT_TOLERANCE,
) -> LossModel:
    """Uniform loss whose pooled censored proportion equals ``target_censoring``.

    The administrative-only proportion is the floor: a target equal to it returns no
    loss, a target below it raises :class:`InfeasibleTargetError`. The loss bound is
    kept at or above ``design.tau`` so at least some subjects stay uncensored up to
    the restriction time; a target that would need a shorter bound is infeasible.
    """

    if not 0 < target_censoring < 1:
        raise InputError(f"censoring target must lie in (0, 1), got {target_censoring}")
    base = design.with_loss(LossModel.none())
    floor = pooled_censored_proportion(model_e, model_c, base, cfg)
    if abs(target_censoring - floor) <= _FLOOR_MATCH:
        return LossModel.none()
    if target_censoring < floor:
        raise InfeasibleTargetError(
            f"censoring target {target_censoring:.3f} is below the administrative floor "
            f"{floor:.3f}",
            floor=floor,
        )

    def excess(log_theta: float) -> float:
        with_loss = design.with_loss(LossModel.uniform(math.exp(log_theta)))
        return pooled_censored_proportion(model_e, model_c, with_loss, cfg) - target_censoring

    at_tau = design.with_loss(LossModel.uniform(design.tau))
    ceiling = pooled_censored_proportion(model_e, model_c, at_tau, cfg)
    if target_censoring >= ceiling:
        raise InfeasibleTargetError(
            f"censoring target {target_censoring:.3f} needs loss before tau={design.tau:g} "
            f"for every subject; targets must stay below {ceiling:.3f}",
            floor=floor,
            ceiling=ceiling,
        )
    lo = math.log(design.tau)
    hi = max(math.log(design.horizon), lo)
    for _ in range(60):
        if excess(hi) < 0:
            break
        hi += math.log(2.0)
    else:
        raise InfeasibleTargetError(
            f"censoring target {target_censoring:.6f} is indistinguishable from the floor",
            floor=floor,
        )
    theta = math.exp(find_root(excess, lo, hi, cfg))
    log.debug(f"Calibrated loss theta={theta:.6g} for censoring target {target_censoring}")
    return LossModel.uniform(theta)


def generate_arm(
    model: CompetingRisksModel,
    design: TrialDesign,
    n: int,
    rng: RngStream,
    *,
    group: str = "",
) -> SurvivalDataset:
    """Simulate ``n`` subjects under staggered entry, loss and study closure.

    Observed time is the earliest of the latent event, loss and administrative
    censoring; ties go to the event.
    """

    if n < 1:
        raise InputError(f"arm size must be >= 1, got {n}")
    generator = rng.generator
    entry = generator.uniform(0.0, design.t_a, size=n) if design.t_a > 0 else np.zeros(n)
    event_times, causes = sample_events(model, rng, n)
    loss = design.loss.sample(generator, n)
    censor = np.minimum(design.horizon - entry, loss)
    observed = event_times <= censor
    return SurvivalDataset(
        times=np.where(observed, event_times, censor),
        statuses=np.where(observed, causes, Status.CENSORED).astype(np.int8),
        group=group,
    )


def censoring_free_before_tau(design: TrialDesign) -> bool:
    """True when no subject can be censored before ``tau`` (phi is then exactly 1)."""

    return design.loss.theta is None and design.tau <= design.t_f


def estimate_phi(
    model: CompetingRisksModel,
    design: TrialDesign,
    cause: Cause | int,
    tau: float,
    m: int,
    rng: RngStream,
    *,
    replicates: int = 1,
    cfg: ToleranceConfig = DEFAULT_TOLERANCE,
) -> float:
    """Censoring inflation ``sqrt(m) * SE(mu_hat) / RSD``, averaged over ``replicates`` cohorts."""

    if m < MIN_PHI_SAMPLES:
        raise InputError(f"phi needs m >= {MIN_PHI_SAMPLES} subjects, got {m}")
    if replicates < 1:
        raise InputError(f"replicates must be >= 1, got {replicates}")
    rsd = math.sqrt(rtl_variance_true(model, cause, tau, cfg))
    if rsd <= 0:
        raise EstimationError(f"restricted time lost has zero variance at tau={tau:g}")
    values: list[float] = []
    for index in range(replicates):
        cohort = generate_arm(model, design, m, rng.child(index))
        before_tau = (cohort.statuses == Cause(cause)) & (cohort.times <= tau)
        if not np.any(before_tau):
            raise EstimationError(f"simulated cohort has no cause {int(cause)} events by tau")
        try:
            estimate = estimate_rmtl(cohort, cause, tau, SeMethod.MARTINGALE)
        except RestrictionError as exc:
            raise EstimationError(f"simulated cohort ends before tau: {exc}") from exc
        values.append(math.sqrt(m) * (estimate.se or 0.0) / rsd)
    return float(np.mean(values))


def corrected_variance(
    phi: float,
    model: CompetingRisksModel,
    cause: Cause | int,
    tau: float,
    cfg: ToleranceConfig = DEFAULT_TOLERANCE,
) -> float:
    if not phi > 0:
        raise InputError(f"phi must be > 0, got {phi}")
    return phi**2 * rtl_variance_true(model, cause, tau, cfg)


def _rmtld_sizes(
    delta: float, sigma2_e: float, sigma2_c: float, r: float, alpha: float, beta: float
) -> tuple[int, int, float]:
    if delta == 0 or not math.isfinite(delta):
        raise UndefinedEffectError("RMTL difference is zero; no sample size achieves the power")
    _check_ratio(r)
    n_C_exact = _z_sum(alpha, beta) ** 2 * (sigma2_c + sigma2_e / r) / delta**2
    n_C = ceil_count(n_C_exact)
    return ceil_count(r * n_C), n_C, n_C_exact


def sample_size_rmtld_weibull(
    model_e: CompetingRisksModel,
    model_c: CompetingRisksModel,
    design: TrialDesign,
    m: int,
    seed: int,
    *,
    cause: Cause | int = Cause.EVENT_OF_INTEREST,
    phi_replicates: int = 1,
    cfg: ToleranceConfig = DEFAULT_TOLERANCE,
) -> SampleSizeResult:
    """Per-arm sizes for the RMTL difference using the true parametric RMTL and variances.

    ``phi`` is exactly 1 when nobody can be censored before ``tau``; otherwise it is
    estimated per arm on reserved random streams derived from ``seed``.
    """

    tau = design.tau
    mu_e = rmtl_true(model_e, cause, tau, cfg)
    mu_c = rmtl_true(model_c, cause, tau, cfg)
    delta = mu_e - mu_c
    if abs(delta) <= 1e-12 * max(tau, 1.0):
        raise UndefinedEffectError(f"RMTL difference is zero at tau={tau:g}")

    if censoring_free_before_tau(design):
        phi_e = phi_c = 1.0
    else:
        phi_e, phi_c = (
            estimate_phi(
                model,
                design,
                cause,
                tau,
                m,
                RngStream(seed, PHI_STREAM_BASE + arm),
                replicates=phi_replicates,
                cfg=cfg,
            )
            for arm, model in enumerate((model_e, model_c))
        )
    sigma2_e = corrected_variance(phi_e, model_e, cause, tau, cfg)
    sigma2_c = corrected_variance(phi_c, model_c, cause, tau, cfg)
    n_E, n_C, n_C_exact = _rmtld_sizes(
        delta, sigma2_e, sigma2_c, design.r, design.alpha, design.beta
    )
    return SampleSizeResult(
        method=SizingMethod.RMTLD_WEIBULL,
        n_total=n_E + n_C,
        n_E=n_E,
        n_C=n_C,
        delta=delta,
        phi_E=phi_e,
        phi_C=phi_c,
        sigma2_E_corrected=sigma2_e,
        sigma2_C_corrected=sigma2_c,
        diagnostics={
            "mu_E": mu_e,
            "mu_C": mu_c,
            "n_C_exact": n_C_exact,
            "power": analytic_power(delta, sigma2_e, sigma2_c, n_E, n_C, design.alpha),
            "m": float(m),
        },
    )


def sample_size_rmtld_approx(
    delta: float, sigma2: float, r: float, alpha: float, beta: float
) -> SampleSizeResult:
    """Conservative total ``(1 + r)(1 + 1/r)(z_a + z_b)^2 sigma2 / delta^2`` with one variance."""

    if delta == 0:
        raise UndefinedEffectError("RMTL difference is zero; no sample size achieves the power")
    _check_ratio(r)
    if not sigma2 >= 0:
        raise InputError(f"variance must be >= 0, got {sigma2}")
    exact = (1.0 + r) * (1.0 + 1.0 / r) * _z_sum(alpha, beta) ** 2 * sigma2 / delta**2
    n_total = ceil_count(exact)
    n_E, n_C = _split_total(n_total, r)
    return SampleSizeResult(
        method=SizingMethod.RMTLD_APPROX,
        n_total=n_E + n_C,
        n_E=n_E,
        n_C=n_C,
        delta=delta,
        sigma2_E_corrected=sigma2,
        sigma2_C_corrected=sigma2,
        diagnostics={"n_formula": float(n_total), "n_exact": exact},
    )


def sample_size_rmtld_wu(
    pilot_e: PilotVariance,
    delta: float,
    r: float,
    alpha: float,
    beta: float,
    *,
    pilot_c: PilotVariance | None = None,
) -> SampleSizeResult:
    """RMTL-difference sizes with variances taken from pilot data.

    Each arm's variance is ``n* Var*(mu_hat)``; without a control pilot the control
    arm reuses the experimental pilot's variance.
    """

    counterpart = pilot_e if pilot_c is None else pilot_c
    n_E, n_C, n_C_exact = _rmtld_sizes(
        delta, pilot_e.sigma2, counterpart.sigma2, r, alpha, beta
    )
    return SampleSizeResult(
        method=SizingMethod.RMTLD_WU,
        n_total=n_E + n_C,
        n_E=n_E,
        n_C=n_C,
        delta=delta,
        sigma2_E_corrected=pilot_e.sigma2,
        sigma2_C_corrected=counterpart.sigma2,
        diagnostics={"n_C_exact": n_C_exact},
    )


def simulate_pilot_variance(
    model: CompetingRisksModel,
    design: TrialDesign,
    cause: Cause | int,
    pilot_n: int,
    rng: RngStream,
) -> PilotVariance:
    """Squared martingale SE of the RMTL in one simulated pilot arm."""

    pilot = generate_arm(model, design, pilot_n, rng)
    estimate = estimate_rmtl(pilot, cause, design.tau, SeMethod.MARTINGALE)
    return PilotVariance(var_of_mean=(estimate.se or 0.0) ** 2, n=pilot_n)


def _events_required(effect: float, r: float, alpha: float, beta: float) -> int:
    if not effect > 0:
        raise InputError(f"hazard ratio must be > 0, got {effect}")
    log_effect = math.log(effect)
    if abs(log_effect) < 1e-12:
        raise UndefinedEffectError("hazard ratio of 1 gives no finite sample size")
    _check_ratio(r)
    return ceil_count((1.0 + r) ** 2 * _z_sum(alpha, beta) ** 2 / (r * log_effect**2))


def _events_based(
    method: SizingMethod, effect: float, p_event: float, r: float, alpha: float, beta: float
) -> SampleSizeResult:
    if not 0 < p_event <= 1:
        raise InputError(f"event probability must lie in (0, 1], got {p_event}")
    events = _events_required(effect, r, alpha, beta)
    n_E, n_C = _split_total(ceil_count(events / p_event), r)
    return SampleSizeResult(
        method=method,
        n_total=n_E + n_C,
        n_E=n_E,
        n_C=n_C,
        diagnostics={"events": float(events), "effect": effect, "p_event": p_event},
    )


def sample_size_hr(
    hr: float, p_event: float, r: float, alpha: float, beta: float
) -> SampleSizeResult:
    """Schoenfeld events-driven size for a cause-specific hazard ratio."""

    return _events_based(SizingMethod.HR, hr, p_event, r, alpha, beta)


def sample_size_shr(
    shr: float, p_event1: float, r: float, alpha: float, beta: float
) -> SampleSizeResult:
    """Same events formula for a subdistribution hazard ratio."""

    return _events_based(SizingMethod.SHR, shr, p_event1, r, alpha, beta)


def analytic_power(
    delta: float, sigma2_E: float, sigma2_C: float, n_E: float, n_C: float, alpha: float
) -> float:
    if not (n_E > 0 and n_C > 0):
        raise InputError(f"arm sizes must be positive, got {n_E}, {n_C}")
    if sigma2_E < 0 or sigma2_C < 0:
        raise InputError("variances must be non-negative")
    z_alpha = normal_quantile(1.0 - alpha / 2.0)
    se = math.sqrt(sigma2_E / n_E + sigma2_C / n_C)
    if se == 0:
        return 1.0 if delta != 0 else normal_cdf(-z_alpha)
    return normal_cdf(abs(delta) / se - z_alpha)


def average_hr(
    model_e: CompetingRisksModel, model_c: CompetingRisksModel, cause: Cause | int, tau: float
) -> float:
    """Ratio of cause-specific cumulative hazards at ``tau`` (E over C)."""

    return float(
        model_e.params(cause).cumulative_hazard(tau) / model_c.params(cause).cumulative_hazard(tau)
    )


def _cumulative_subdistribution_hazard(
    model: CompetingRisksModel, cause: Cause | int, tau: float, cfg: ToleranceConfig
) -> float:
    return -math.log1p(-cif(model, cause, tau, cfg))


def average_shr(
    model_e: CompetingRisksModel,
    model_c: CompetingRisksModel,
    cause: Cause | int,
    tau: float,
    cfg: ToleranceConfig = DEFAULT_TOLERANCE,
) -> float:
    """Ratio of cumulative subdistribution hazards ``-log(1 - F(tau))`` (E over C)."""

    if not tau > 0:
        raise InputError(f"tau must be > 0, got {tau}")
    experimental = _cumulative_subdistribution_hazard(model_e, cause, tau, cfg)
    return experimental / _cumulative_subdistribution_hazard(model_c, cause, tau, cfg)


def shr_curve(
    model_e: CompetingRisksModel,
    model_c: CompetingRisksModel,
    cause: Cause | int,
    times: Iterable[float],
    cfg: ToleranceConfig = DEFAULT_TOLERANCE,
) -> NDArray[np.float64]:
    """Instantaneous subdistribution hazard ratio E over C at each time."""

    ratios: list[float] = []
    for t in times:
        if not t > 0:
            raise InputError(f"times must be > 0, got {t}")
        hazards = [
            float(model.subdensity_values(cause, t)) / (1.0 - cif(model, cause, t, cfg))
            for model in (model_e, model_c)
        ]
        ratios.append(hazards[0] / hazards[1])
    return np.asarray(ratios, dtype=np.float64)


def select_tau(
    model_e: CompetingRisksModel,
    model_c: CompetingRisksModel,
    design: TrialDesign,
    tau_grid: Sequence[float],
    m: int,
    seed: int,
    *,
    cause: Cause | int = Cause.EVENT_OF_INTEREST,
    cfg: ToleranceConfig = DEFAULT_TOLERANCE,
) -> TauSelection:
    """Restriction time on ``tau_grid`` with the smallest RMTL-difference total size."""

    best: SampleSizeResult | None = None
    best_tau = math.nan
    curve: list[tuple[float, int]] = []
    for tau in tau_grid:
        try:
            result = sample_size_rmtld_weibull(
                model_e, model_c, design.with_tau(tau), m, seed, cause=cause, cfg=cfg
            )
        except (InfeasibleError, InputError) as exc:
            log.warning(f"Skipping tau={tau:g}: {exc}")
            continue
        curve.append((tau, result.n_total))
        if best is None or result.n_total < best.n_total:
            best, best_tau = result, tau
    if best is None:
        raise UndefinedEffectError("no restriction time on the grid gives a finite sample size")
    return TauSelection(tau=best_tau, result=best, curve=tuple(curve))
