"""Monte Carlo evaluation of trial designs: simulated trials, empirical power, sweeps.

Replicate ``i`` always draws from ``RngStream(master_seed, i)``, so rejection counts do
not depend on how replicates are spread over worker processes.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING

import numpy as np

from .design import (
    SampleSizeResult,
    average_hr,
    average_shr,
    calibrate_loss,
    generate_arm,
    pooled_event_probability,
    sample_size_hr,
    sample_size_rmtld_approx,
    sample_size_rmtld_weibull,
    sample_size_rmtld_wu,
    sample_size_shr,
    simulate_pilot_variance,
)
from .hypothesis_tests import gray_test, logrank_test, restriction_bound, rmtld_test
from .model.enums import AnalysisMethod, Cause, SizingMethod, TauRule
from .model.errors import InfeasibleError, InputError, RmtlSizeError
from .model.trial import LossModel
from .numerics import DEFAULT_TOLERANCE, PILOT_STREAM_BASE, RngStream
from .parametric import rmtl_true

if TYPE_CHECKING:
    from collections.abc import Iterable, Mapping, Sequence

    from .model.data import SurvivalDataset
    from .model.trial import TrialDesign
    from .numerics import ToleranceConfig
    from .parametric import CompetingRisksModel

log = logging.getLogger(__name__)

MIN_POWER_ITERATIONS = 100
ALL_TESTS: frozenset[AnalysisMethod] = frozenset(AnalysisMethod)
TABLE_METHODS: tuple[SizingMethod, ...] = (
    SizingMethod.HR,
    SizingMethod.SHR,
    SizingMethod.RMTLD_WEIBULL,
    SizingMethod.RMTLD_WU,
)
_CHUNKS_PER_WORKER = 4


@dataclass(frozen=True, slots=True)
class ScenarioConfig:
    """Two arm models, a design and Monte Carlo settings.

    Loss is either explicit on ``design`` or derived from ``censoring_target`` by
    :meth:`resolved`, never both.
    """

    name: str
    model_e: CompetingRisksModel
    model_c: CompetingRisksModel
    design: TrialDesign
    censoring_target: float | None = None
    iterations: int = 1000
    master_seed: int = 0
    cause: Cause = Cause.EVENT_OF_INTEREST
    tau_rule: TauRule = TauRule.FIXED

    def __post_init__(self) -> None:
        if self.iterations < 1:
            raise InputError(f"iterations must be >= 1, got {self.iterations}")
        if self.censoring_target is not None and self.design.loss.theta is not None:
            raise InputError("give either a censoring target or an explicit loss model")
        object.__setattr__(self, "cause", Cause(self.cause))
        object.__setattr__(self, "tau_rule", TauRule(self.tau_rule))

    def resolved(self, cfg: ToleranceConfig = DEFAULT_TOLERANCE) -> ScenarioConfig:
        """Same scenario with the censoring target turned into a calibrated loss model."""

        if self.censoring_target is None:
            return self
        loss = calibrate_loss(self.model_e, self.model_c, self.design, self.censoring_target, cfg)
        log.info(
            f"Scenario {self.name}: censoring target {self.censoring_target:.3f} "
            f"-> loss {loss.kind} theta={loss.theta}"
        )
        return replace(self, design=self.design.with_loss(loss), censoring_target=None)

    def with_censoring_target(self, target: float | None) -> ScenarioConfig:
        """Replace the loss specification by ``target``; ``None`` keeps the scenario as is."""

        if target is None:
            return self
        return replace(
            self, design=self.design.with_loss(LossModel.none()), censoring_target=target
        )


@dataclass(frozen=True, slots=True)
class PowerRow:
    method: SizingMethod | None
    n_E: int
    n_C: int
    iterations: int
    rejections: Mapping[AnalysisMethod, int]
    failures: Mapping[AnalysisMethod, int]
    mean_censored: float = math.nan

    @property
    def n_used(self) -> int:
        return self.n_E + self.n_C

    def power(self, test: AnalysisMethod) -> float:
        return self.rejections.get(test, 0) / self.iterations

    def mc_se(self, test: AnalysisMethod) -> float:
        p = self.power(test)
        return math.sqrt(p * (1.0 - p) / self.iterations)

    @property
    def power_hr(self) -> float:
        return self.power(AnalysisMethod.LOGRANK)

    @property
    def power_shr(self) -> float:
        return self.power(AnalysisMethod.GRAY)

    @property
    def power_rmtld(self) -> float:
        return self.power(AnalysisMethod.RMTLD)


@dataclass(frozen=True, slots=True)
class PowerBlock:
    """One (scenario, censoring target) cell of a power table."""

    scenario: str
    censoring_target: float | None
    rows: tuple[PowerRow, ...]
    errors: Mapping[SizingMethod, str] = field(default_factory=dict[SizingMethod, str])


@dataclass(frozen=True, slots=True)
class SweepRow:
    tau: float
    t_a: float
    t_f: float
    method: SizingMethod
    status: str
    sizes: SampleSizeResult | None = None
    power: PowerRow | None = None


def generate_trial(
    scenario: ScenarioConfig, n_E: int, n_C: int, rng: RngStream
) -> tuple[SurvivalDataset, SurvivalDataset]:
    """Simulate both arms; the scenario's loss must already be explicit."""

    if scenario.censoring_target is not None:
        raise InputError("resolve the censoring target before generating trials")
    data_e = generate_arm(scenario.model_e, scenario.design, n_E, rng.child(0), group="E")
    data_c = generate_arm(scenario.model_c, scenario.design, n_C, rng.child(1), group="C")
    return data_e, data_c


@dataclass(frozen=True, slots=True)
class _Chunk:
    scenario: ScenarioConfig
    n_E: int
    n_C: int
    tests: frozenset[AnalysisMethod]
    alpha: float
    start: int
    stop: int


@dataclass(slots=True)
class _Tally:
    rejections: dict[AnalysisMethod, int] = field(default_factory=dict[AnalysisMethod, int])
    failures: dict[AnalysisMethod, int] = field(default_factory=dict[AnalysisMethod, int])
    censored: float = 0.0

    def merge(self, other: _Tally) -> None:
        for test, count in other.rejections.items():
            self.rejections[test] = self.rejections.get(test, 0) + count
        for test, count in other.failures.items():
            self.failures[test] = self.failures.get(test, 0) + count
        self.censored += other.censored


def _analyse(
    test: AnalysisMethod,
    data_e: SurvivalDataset,
    data_c: SurvivalDataset,
    scenario: ScenarioConfig,
    alpha: float,
) -> bool:
    match test:
        case AnalysisMethod.RMTLD:
            tau = (
                scenario.design.tau
                if scenario.tau_rule is TauRule.FIXED
                else restriction_bound(data_e, data_c)
            )
            return rmtld_test(data_e, data_c, scenario.cause, tau, alpha).rejects()
        case AnalysisMethod.LOGRANK:
            return logrank_test(data_e, data_c, scenario.cause, alpha).rejects()
        case AnalysisMethod.GRAY:
            return gray_test(data_e, data_c, scenario.cause, alpha).rejects()


def _run_chunk(chunk: _Chunk) -> _Tally:
    tally = _Tally()
    scenario = chunk.scenario
    for index in range(chunk.start, chunk.stop):
        data_e, data_c = generate_trial(
            scenario, chunk.n_E, chunk.n_C, RngStream(scenario.master_seed, index)
        )
        tally.censored += (
            len(data_e) * data_e.censored_fraction + len(data_c) * data_c.censored_fraction
        ) / (len(data_e) + len(data_c))
        for test in chunk.tests:
            try:
                rejected = _analyse(test, data_e, data_c, scenario, chunk.alpha)
            except RmtlSizeError as exc:
                log.debug(f"Replicate {index}: {test} failed: {exc}")
                tally.failures[test] = tally.failures.get(test, 0) + 1
                continue
            if rejected:
                tally.rejections[test] = tally.rejections.get(test, 0) + 1
    return tally


def _chunks(iterations: int, parts: int) -> list[tuple[int, int]]:
    edges = np.linspace(0, iterations, min(parts, iterations) + 1).round().astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:], strict=True) if b > a]


def empirical_power(
    scenario: ScenarioConfig,
    n_E: int,
    n_C: int,
    tests: Iterable[AnalysisMethod] = ALL_TESTS,
    alpha: float | None = None,
    *,
    workers: int = 1,
    method: SizingMethod | None = None,
) -> PowerRow:
    """Rejection rates over ``scenario.iterations`` simulated trials.

    Replicates where a test cannot be computed count as non-rejections and are
    tallied under ``failures``.
    """

    if scenario.iterations < MIN_POWER_ITERATIONS:
        raise InputError(
            f"empirical power needs >= {MIN_POWER_ITERATIONS} iterations, "
            f"got {scenario.iterations}"
        )
    if n_E < 1 or n_C < 1:
        raise InputError(f"arm sizes must be positive, got {n_E}, {n_C}")
    resolved = scenario.resolved()
    level = resolved.design.alpha if alpha is None else alpha
    selected = frozenset(tests)
    parts = 1 if workers <= 1 else workers * _CHUNKS_PER_WORKER
    chunks = [
        _Chunk(resolved, n_E, n_C, selected, level, start, stop)
        for start, stop in _chunks(resolved.iterations, parts)
    ]
    total = _Tally()
    if workers <= 1:
        for chunk in chunks:
            total.merge(_run_chunk(chunk))
    else:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            for tally in executor.map(_run_chunk, chunks):
                total.merge(tally)

    failed = sum(total.failures.values())
    if failed:
        log.warning(
            f"Scenario {scenario.name} n=({n_E}, {n_C}): {failed} test evaluations failed "
            f"over {resolved.iterations} replicates"
        )
    return PowerRow(
        method=method,
        n_E=n_E,
        n_C=n_C,
        iterations=resolved.iterations,
        rejections={test: total.rejections.get(test, 0) for test in sorted(selected)},
        failures={test: total.failures.get(test, 0) for test in sorted(selected)},
        mean_censored=total.censored / resolved.iterations,
    )


def size_trial(
    scenario: ScenarioConfig,
    method: SizingMethod,
    *,
    m: int,
    pilot_n: int,
    cfg: ToleranceConfig = DEFAULT_TOLERANCE,
) -> SampleSizeResult:
    """Sample size for ``method``, calibrating the scenario's loss first if needed."""

    scenario = scenario.resolved(cfg)
    design = scenario.design
    cause = scenario.cause
    model_e, model_c = scenario.model_e, scenario.model_c
    match method:
        case SizingMethod.RMTLD_WEIBULL:
            return sample_size_rmtld_weibull(
                model_e, model_c, design, m, scenario.master_seed, cause=cause, cfg=cfg
            )
        case SizingMethod.RMTLD_WU:
            delta = rmtl_true(model_e, cause, design.tau, cfg) - rmtl_true(
                model_c, cause, design.tau, cfg
            )
            pilot_e = simulate_pilot_variance(
                model_e, design, cause, pilot_n, RngStream(scenario.master_seed, PILOT_STREAM_BASE)
            )
            pilot_c = simulate_pilot_variance(
                model_c,
                design,
                cause,
                pilot_n,
                RngStream(scenario.master_seed, PILOT_STREAM_BASE + 1),
            )
            return sample_size_rmtld_wu(
                pilot_e, delta, design.r, design.alpha, design.beta, pilot_c=pilot_c
            )
        case SizingMethod.HR:
            return sample_size_hr(
                average_hr(model_e, model_c, cause, design.tau),
                pooled_event_probability(model_e, model_c, design, cause, cfg),
                design.r,
                design.alpha,
                design.beta,
            )
        case SizingMethod.SHR:
            return sample_size_shr(
                average_shr(model_e, model_c, cause, design.tau, cfg),
                pooled_event_probability(model_e, model_c, design, cause, cfg),
                design.r,
                design.alpha,
                design.beta,
            )
        case SizingMethod.RMTLD_APPROX:
            exact = sample_size_rmtld_weibull(
                model_e, model_c, design, m, scenario.master_seed, cause=cause, cfg=cfg
            )
            return sample_size_rmtld_approx(
                exact.delta or 0.0,
                max(exact.sigma2_E_corrected or 0.0, exact.sigma2_C_corrected or 0.0),
                design.r,
                design.alpha,
                design.beta,
            )


def run_table(
    scenarios: Sequence[ScenarioConfig],
    censoring_targets: Sequence[float | None],
    *,
    methods: Sequence[SizingMethod] = TABLE_METHODS,
    m: int,
    pilot_n: int,
    workers: int = 1,
) -> list[PowerBlock]:
    """Size by every method, then evaluate all three tests at each size.

    One block per (scenario, censoring target); a method whose size cannot be
    computed is reported in the block's ``errors`` instead of a row.
    """

    blocks: list[PowerBlock] = []
    for scenario in scenarios:
        for target in censoring_targets:
            label = "as configured" if target is None else f"{target:.3f}"
            try:
                resolved = scenario.with_censoring_target(target).resolved()
            except InfeasibleError as exc:
                log.warning(f"Scenario {scenario.name} censoring {label}: {exc}")
                blocks.append(
                    PowerBlock(scenario.name, target, (), {method: str(exc) for method in methods})
                )
                continue
            rows: list[PowerRow] = []
            errors: dict[SizingMethod, str] = {}
            for method in methods:
                try:
                    sizes = size_trial(resolved, method, m=m, pilot_n=pilot_n)
                except RmtlSizeError as exc:
                    log.warning(f"Scenario {scenario.name} censoring {label} {method}: {exc}")
                    errors[method] = str(exc)
                    continue
                rows.append(
                    empirical_power(
                        resolved, sizes.n_E, sizes.n_C, workers=workers, method=method
                    )
                )
            log.info(f"Scenario {scenario.name} censoring {label}: {len(rows)} rows")
            blocks.append(PowerBlock(scenario.name, target, tuple(rows), errors))
    return blocks


def _sweep_cell(
    scenario: ScenarioConfig,
    methods: Sequence[SizingMethod],
    *,
    m: int,
    pilot_n: int,
    evaluate_power: bool,
    workers: int,
) -> list[SweepRow]:
    design = scenario.design
    rows: list[SweepRow] = []
    for method in methods:
        try:
            sizes = size_trial(scenario, method, m=m, pilot_n=pilot_n)
        except RmtlSizeError as exc:
            rows.append(SweepRow(design.tau, design.t_a, design.t_f, method, f"infeasible: {exc}"))
            continue
        power = (
            empirical_power(scenario, sizes.n_E, sizes.n_C, workers=workers, method=method)
            if evaluate_power
            else None
        )
        rows.append(SweepRow(design.tau, design.t_a, design.t_f, method, "ok", sizes, power))
    return rows


def sweep_tau(
    scenario: ScenarioConfig,
    tau_grid: Sequence[float],
    *,
    methods: Sequence[SizingMethod] = (SizingMethod.RMTLD_WEIBULL,),
    m: int,
    pilot_n: int,
    evaluate_power: bool = True,
    workers: int = 1,
) -> list[SweepRow]:
    """Sizes (and optionally powers) per restriction time; loss is calibrated once.

    A non-positive tau is an input error. A tau beyond the study horizon yields an
    ``infeasible`` row per method.
    """

    invalid = [tau for tau in tau_grid if not (math.isfinite(tau) and tau > 0)]
    if invalid:
        raise InputError(f"tau grid values must be finite and > 0, got {invalid}")
    resolved = scenario.resolved()
    rows: list[SweepRow] = []
    for tau in tau_grid:
        design = resolved.design
        if tau > design.horizon:
            reason = "infeasible: tau exceeds t_a + t_f"
            rows.extend(SweepRow(tau, design.t_a, design.t_f, method, reason) for method in methods)
            continue
        cell = replace(resolved, design=design.with_tau(tau))
        rows.extend(
            _sweep_cell(
                cell, methods, m=m, pilot_n=pilot_n, evaluate_power=evaluate_power, workers=workers
            )
        )
    log.info(f"Scenario {scenario.name}: tau sweep over {len(tau_grid)} values done")
    return rows


def sweep_accrual_followup(
    scenario: ScenarioConfig,
    ta_grid: Sequence[float],
    tf_grid: Sequence[float],
    *,
    methods: Sequence[SizingMethod] = (SizingMethod.RMTLD_WEIBULL,),
    m: int,
    pilot_n: int,
    evaluate_power: bool = True,
    workers: int = 1,
) -> list[SweepRow]:
    """Sizes per (t_a, t_f) at the scenario's tau; the calibrated loss stays fixed."""

    resolved = scenario.resolved()
    tau = resolved.design.tau
    rows: list[SweepRow] = []
    for t_a in ta_grid:
        for t_f in tf_grid:
            if not (t_a >= 0 and t_f > 0 and tau <= t_a + t_f):
                rows.extend(
                    SweepRow(tau, t_a, t_f, method, "infeasible: tau exceeds t_a + t_f")
                    for method in methods
                )
                continue
            cell = replace(resolved, design=resolved.design.with_periods(t_a, t_f))
            rows.extend(
                _sweep_cell(
                    cell,
                    methods,
                    m=m,
                    pilot_n=pilot_n,
                    evaluate_power=evaluate_power,
                    workers=workers,
                )
            )
    log.info(f"Scenario {scenario.name}: accrual/follow-up sweep over {len(rows)} rows done")
    return rows
