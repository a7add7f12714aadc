"""Application orchestration entry points."""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass
from logging import getLogger
from typing import TYPE_CHECKING

import pandas as pd

from rmtlsize import __version__
from rmtlsize.adapters.dataset import read_dataset, split_arms
from rmtlsize.adapters.reports import (
    RunManifest,
    cif_frame,
    fit_frame,
    power_table_frame,
    rmtl_frame,
    sample_size_frame,
    sweep_frame,
    tests_frame,
    write_manifest,
    write_records_json,
    write_table,
)
from rmtlsize.adapters.scenario import load_scenario, payload_digest, to_model, to_scenario
from rmtlsize.config import get_output_config, get_simulation_config
from rmtlsize.domain.design import (
    calibrate_loss,
    pooled_censored_proportion,
    pooled_event_probability,
    sample_size_hr,
    sample_size_shr,
)
from rmtlsize.domain.estimation import aj_cif, fit_competing_risks_model
from rmtlsize.domain.hypothesis_tests import (
    gray_test,
    logrank_test,
    restriction_bound,
    rmtld_analysis,
)
from rmtlsize.domain.model import (
    Cause,
    InfeasibleError,
    InputError,
    LossModel,
    RestrictionError,
    RmtlSizeError,
    SeMethod,
    SizingMethod,
    TrialDesign,
)
from rmtlsize.domain.numerics import RngStream, fresh_seed
from rmtlsize.domain.simulation import (
    ScenarioConfig,
    run_table,
    size_trial,
    sweep_accrual_followup,
    sweep_tau,
)

if TYPE_CHECKING:
    from collections.abc import Collection, Mapping, Sequence
    from pathlib import Path

    from rmtlsize.adapters.scenario import ScenarioPayload
    from rmtlsize.domain.design import SampleSizeResult
    from rmtlsize.domain.estimation import RmtlEstimate
    from rmtlsize.domain.hypothesis_tests import TestResult
    from rmtlsize.domain.model import StepCurve
    from rmtlsize.domain.parametric import CompetingRisksModel
    from rmtlsize.domain.simulation import PowerBlock, SweepRow


log = getLogger(__name__)

ALL_METHODS: tuple[SizingMethod, ...] = tuple(SizingMethod)


def resolve_seed(seed: int | None) -> int:
    """Return ``seed`` or draw one; either way it is logged so the run can be repeated."""

    if seed is None:
        seed = fresh_seed()
        log.info(f"No seed given; drew seed {seed}")
    else:
        log.info(f"Using seed {seed}")
    return seed


def _publish(
    command: str,
    frames: Mapping[str, pd.DataFrame],
    *,
    output_dir: Path | None,
    started: float,
    seed: int | None = None,
    config_sha256: str | None = None,
    iterations: int | None = None,
    workers: int = 1,
    parameters: dict[str, object] | None = None,
    json_tables: Collection[str] = (),
) -> Path:
    output = get_output_config(output_dir=output_dir)
    written: list[str] = []
    for name, frame in frames.items():
        written.append(write_table(frame, output.table_path(name)).name)
        if name in json_tables:
            json_path = output.ensure_output_dir() / f"{name}.json"
            written.append(write_records_json(frame, json_path).name)
    manifest = RunManifest(
        command=command,
        version=__version__,
        seed=seed,
        config_sha256=config_sha256,
        iterations=iterations,
        workers=workers,
        wall_time_seconds=round(time.perf_counter() - started, 3),
        parameters=parameters or {},
        outputs=written,
    )
    return write_manifest(output.manifest_path(), manifest)


@dataclass(frozen=True, slots=True)
class SampleSizeRequest:
    model_e: CompetingRisksModel
    model_c: CompetingRisksModel
    tau: float
    t_a: float
    t_f: float
    r: float = 1.0
    alpha: float = 0.05
    target_power: float = 0.8
    censoring_target: float | None = None
    loss_theta: float | None = None
    methods: tuple[SizingMethod, ...] = (SizingMethod.RMTLD_WEIBULL,)
    cause: Cause = Cause.EVENT_OF_INTEREST
    hr: float | None = None
    shr: float | None = None
    seed: int | None = None
    phi_samples: int | None = None
    pilot_size: int | None = None


@dataclass(frozen=True, slots=True)
class SampleSizeReport:
    results: tuple[SampleSizeResult, ...]
    errors: Mapping[SizingMethod, str]
    seed: int
    loss: LossModel
    manifest: Path | None = None


def request_from_scenario(path: Path) -> SampleSizeRequest:
    """Sample-size request seeded from a scenario file's arms and design."""

    payload = load_scenario(path)
    design = payload.design
    return SampleSizeRequest(
        model_e=to_model(payload.experimental),
        model_c=to_model(payload.control),
        tau=design.tau,
        t_a=design.accrual,
        t_f=design.followup,
        r=design.ratio,
        alpha=design.alpha,
        target_power=design.power,
        censoring_target=payload.censoring_target,
        loss_theta=design.loss_theta,
        cause=Cause(payload.cause),
        seed=payload.seed,
    )


def _request_scenario(request: SampleSizeRequest, seed: int) -> ScenarioConfig:
    loss = LossModel.none() if request.loss_theta is None else LossModel.uniform(request.loss_theta)
    design = TrialDesign(
        t_a=request.t_a,
        t_f=request.t_f,
        tau=request.tau,
        r=request.r,
        alpha=request.alpha,
        target_power=request.target_power,
        loss=loss,
    )
    return ScenarioConfig(
        name="samplesize",
        model_e=request.model_e,
        model_c=request.model_c,
        design=design,
        censoring_target=request.censoring_target,
        master_seed=seed,
        cause=request.cause,
    ).resolved()


def _raise_when_nothing_sized(
    errors: Mapping[SizingMethod, str], failures: Sequence[RmtlSizeError]
) -> None:
    for failure in failures:
        if not isinstance(failure, InfeasibleError):
            raise failure
    summary = "; ".join(f"{method}: {message}" for method, message in errors.items())
    raise InfeasibleError(f"no requested method produced a sample size ({summary})")


def compute_sample_sizes(
    request: SampleSizeRequest, *, output_dir: Path | None = None, write: bool = True
) -> SampleSizeReport:
    """Size the trial by every requested method; failing methods are reported, not raised.

    When only one method is requested its error propagates, so callers get the
    precise failure (for example a zero effect). When every requested method fails
    the run fails too: with :class:`InfeasibleError` if all failures were infeasible,
    otherwise with the first other error.
    """

    started = time.perf_counter()
    sim_config = get_simulation_config()
    seed = resolve_seed(request.seed)
    scenario = _request_scenario(request, seed)
    design = scenario.design
    m = request.phi_samples or sim_config.phi_samples
    pilot_n = request.pilot_size or sim_config.pilot_size
    log.info(
        f"Sample size start: methods={[str(method) for method in request.methods]} "
        f"tau={design.tau:g} loss={design.loss.kind}"
    )

    results: list[SampleSizeResult] = []
    errors: dict[SizingMethod, str] = {}
    failures: list[RmtlSizeError] = []
    for method in request.methods:
        try:
            if method is SizingMethod.HR and request.hr is not None:
                p_event = pooled_event_probability(
                    scenario.model_e, scenario.model_c, design, scenario.cause
                )
                result = sample_size_hr(request.hr, p_event, design.r, design.alpha, design.beta)
            elif method is SizingMethod.SHR and request.shr is not None:
                p_event = pooled_event_probability(
                    scenario.model_e, scenario.model_c, design, scenario.cause
                )
                result = sample_size_shr(request.shr, p_event, design.r, design.alpha, design.beta)
            else:
                result = size_trial(scenario, method, m=m, pilot_n=pilot_n)
        except RmtlSizeError as exc:
            if len(request.methods) == 1:
                raise
            log.warning(f"Sample size by {method} failed: {exc}")
            errors[method] = str(exc)
            failures.append(exc)
            continue
        results.append(result)
    if not results:
        _raise_when_nothing_sized(errors, failures)

    manifest = None
    if write:
        manifest = _publish(
            "samplesize",
            {"samplesize": sample_size_frame(results)},
            output_dir=output_dir,
            started=started,
            seed=seed,
            parameters=asdict(request) | {"seed": seed},
            json_tables=("samplesize",),
        )
    log.info(f"Sample size finished: {len(results)} methods sized, {len(errors)} failed")
    return SampleSizeReport(
        results=tuple(results), errors=errors, seed=seed, loss=design.loss, manifest=manifest
    )


@dataclass(frozen=True, slots=True)
class AnalysisReport:
    tau: float
    estimates: Mapping[str, RmtlEstimate]
    tests: tuple[TestResult, ...]
    test_errors: Mapping[str, str]
    curves: Mapping[str, StepCurve]
    fits: Mapping[str, CompetingRisksModel]
    manifest: Path | None = None


def analyze_dataset(
    path: Path,
    *,
    tau: float | None = None,
    alpha: float = 0.05,
    cause: Cause = Cause.EVENT_OF_INTEREST,
    experimental: str | None = None,
    se_method: SeMethod = SeMethod.MARTINGALE,
    bootstrap_replicates: int | None = None,
    seed: int | None = None,
    fit_weibull: bool = False,
    output_dir: Path | None = None,
    write: bool = True,
) -> AnalysisReport:
    """Per-group RMTL, the RMTL-difference test and the rank-test comparators."""

    started = time.perf_counter()
    data_e, data_c = split_arms(read_dataset(path), experimental=experimental)
    bound = restriction_bound(data_e, data_c)
    restriction = bound if tau is None else tau
    if restriction > bound:
        raise RestrictionError(
            f"tau={restriction:g} exceeds the smaller group maximum follow-up {bound:g}",
            bound=bound,
        )
    log.info(
        f"Analysis start: E={data_e.group} (n={len(data_e)}) C={data_c.group} "
        f"(n={len(data_c)}) tau={restriction:g}"
    )

    rng = None
    used_seed = None
    if se_method is SeMethod.BOOTSTRAP:
        used_seed = resolve_seed(seed)
        rng = RngStream(used_seed, 0)
    replicates = bootstrap_replicates or get_simulation_config().bootstrap_replicates
    rmtld = rmtld_analysis(
        data_e,
        data_c,
        cause,
        restriction,
        alpha,
        se_method=se_method,
        replicates=replicates,
        rng=rng,
    )

    tests: list[TestResult] = [rmtld.result]
    test_errors: dict[str, str] = {}
    for name, run in (("hr", logrank_test), ("shr", gray_test)):
        try:
            tests.append(run(data_e, data_c, cause, alpha))
        except RmtlSizeError as exc:
            log.warning(f"{name} comparison not computed: {exc}")
            test_errors[name] = str(exc)

    estimates = {data_e.group: rmtld.estimate_e, data_c.group: rmtld.estimate_c}
    curves = {data.group: aj_cif(data, cause) for data in (data_e, data_c)}
    fits: dict[str, CompetingRisksModel] = {}
    if fit_weibull:
        for data in (data_e, data_c):
            try:
                fits[data.group] = fit_competing_risks_model(data)
            except RmtlSizeError as exc:
                log.warning(f"Weibull fit for group {data.group} failed: {exc}")

    manifest = None
    if write:
        frames = {
            "rmtl": rmtl_frame(estimates, alpha),
            "tests": tests_frame(tests),
            "cif": cif_frame(curves),
        }
        if fits:
            frames["weibull_fit"] = fit_frame(fits)
        manifest = _publish(
            "analyze",
            frames,
            output_dir=output_dir,
            started=started,
            seed=used_seed,
            parameters={
                "dataset": str(path),
                "tau": restriction,
                "alpha": alpha,
                "cause": int(cause),
                "experimental": data_e.group,
                "se_method": str(se_method),
                "bootstrap_replicates": replicates if rng is not None else None,
            },
        )
    log.info(f"Analysis finished: {len(tests)} tests, {len(test_errors)} not computed")
    return AnalysisReport(
        tau=restriction,
        estimates=estimates,
        tests=tuple(tests),
        test_errors=test_errors,
        curves=curves,
        fits=fits,
        manifest=manifest,
    )


@dataclass(frozen=True, slots=True)
class ScenarioRun:
    payload: ScenarioPayload
    scenario: ScenarioConfig
    digest: str
    workers: int
    m: int
    pilot_n: int


def prepare_scenario(
    path: Path,
    *,
    seed: int | None = None,
    iterations: int | None = None,
    workers: int | None = None,
) -> ScenarioRun:
    """Load a scenario file and settle seed, worker count and Monte Carlo sizes."""

    payload = load_scenario(path)
    sim_config = get_simulation_config()
    chosen_seed = resolve_seed(seed if seed is not None else payload.seed)
    return ScenarioRun(
        payload=payload,
        scenario=to_scenario(payload, seed=chosen_seed, iterations=iterations),
        digest=payload_digest(payload),
        workers=workers or sim_config.workers,
        m=sim_config.phi_samples,
        pilot_n=sim_config.pilot_size,
    )


def simulate_scenario(
    path: Path,
    *,
    seed: int | None = None,
    iterations: int | None = None,
    workers: int | None = None,
    censoring_targets: Sequence[float | None] | None = None,
    methods: Sequence[SizingMethod] | None = None,
    output_dir: Path | None = None,
) -> list[PowerBlock]:
    """Power table: every method's size, evaluated by all three tests."""

    started = time.perf_counter()
    run = prepare_scenario(path, seed=seed, iterations=iterations, workers=workers)
    targets = list(censoring_targets or run.payload.table.censoring_targets)
    chosen = list(methods or run.payload.table.methods)
    log.info(
        f"Simulation start: scenario={run.scenario.name} targets={targets} "
        f"iterations={run.scenario.iterations} workers={run.workers}"
    )
    blocks = run_table(
        [run.scenario], targets, methods=chosen, m=run.m, pilot_n=run.pilot_n, workers=run.workers
    )
    _publish(
        "simulate",
        {"power_table": power_table_frame(blocks)},
        output_dir=output_dir,
        started=started,
        seed=run.scenario.master_seed,
        config_sha256=run.digest,
        iterations=run.scenario.iterations,
        workers=run.workers,
        parameters={
            "scenario": str(path),
            "censoring_targets": targets,
            "methods": [str(method) for method in chosen],
            "phi_samples": run.m,
            "pilot_size": run.pilot_n,
        },
    )
    log.info(f"Simulation finished: {len(blocks)} blocks")
    return blocks


def sweep_scenario(
    path: Path,
    *,
    tau_grid: Sequence[float] | None = None,
    accrual_grid: Sequence[float] | None = None,
    followup_grid: Sequence[float] | None = None,
    methods: Sequence[SizingMethod] | None = None,
    evaluate_power: bool = True,
    seed: int | None = None,
    iterations: int | None = None,
    workers: int | None = None,
    output_dir: Path | None = None,
) -> dict[str, list[SweepRow]]:
    """Tau sweep and/or accrual-by-follow-up sweep, whichever grids are non-empty."""

    started = time.perf_counter()
    run = prepare_scenario(path, seed=seed, iterations=iterations, workers=workers)
    sweep = run.payload.sweep
    taus = list(tau_grid or sweep.tau_grid)
    accruals = list(accrual_grid or sweep.accrual_grid)
    followups = list(followup_grid or sweep.followup_grid)
    chosen = list(methods or sweep.methods)
    if not taus and not (accruals and followups):
        raise InputError("sweep needs a tau grid or both accrual and follow-up grids")

    results: dict[str, list[SweepRow]] = {}
    if taus:
        log.info(f"Tau sweep start: {len(taus)} values")
        results["sweep_tau"] = sweep_tau(
            run.scenario,
            taus,
            methods=chosen,
            m=run.m,
            pilot_n=run.pilot_n,
            evaluate_power=evaluate_power,
            workers=run.workers,
        )
    if accruals and followups:
        log.info(f"Accrual/follow-up sweep start: {len(accruals)} x {len(followups)} cells")
        results["sweep_accrual_followup"] = sweep_accrual_followup(
            run.scenario,
            accruals,
            followups,
            methods=chosen,
            m=run.m,
            pilot_n=run.pilot_n,
            evaluate_power=evaluate_power,
            workers=run.workers,
        )
    _publish(
        "sweep",
        {name: sweep_frame(rows) for name, rows in results.items()},
        output_dir=output_dir,
        started=started,
        seed=run.scenario.master_seed,
        config_sha256=run.digest,
        iterations=run.scenario.iterations if evaluate_power else None,
        workers=run.workers,
        parameters={
            "scenario": str(path),
            "tau_grid": taus,
            "accrual_grid": accruals,
            "followup_grid": followups,
            "methods": [str(method) for method in chosen],
            "evaluate_power": evaluate_power,
        },
    )
    log.info(f"Sweep finished: {sum(len(rows) for rows in results.values())} rows")
    return results


@dataclass(frozen=True, slots=True)
class CalibrationReport:
    target: float
    floor: float
    loss: LossModel
    achieved: float


def calibrate_scenario(
    path: Path, *, target: float | None = None, output_dir: Path | None = None
) -> CalibrationReport:
    """Loss model reaching a pooled censoring target, with the administrative floor."""

    started = time.perf_counter()
    payload = load_scenario(path)
    scenario = to_scenario(payload, seed=payload.seed or 0)
    goal = target if target is not None else scenario.censoring_target
    if goal is None:
        raise InputError("no censoring target given on the command line or in the scenario")
    base = scenario.design.with_loss(LossModel.none())
    floor = pooled_censored_proportion(scenario.model_e, scenario.model_c, base)
    log.info(f"Calibration start: target={goal:.3f} floor={floor:.3f}")
    loss = calibrate_loss(scenario.model_e, scenario.model_c, base, goal)
    achieved = pooled_censored_proportion(
        scenario.model_e, scenario.model_c, base.with_loss(loss)
    )
    report = CalibrationReport(target=goal, floor=floor, loss=loss, achieved=achieved)
    _publish(
        "calibrate",
        {
            "calibration": pd.DataFrame(
                [
                    {
                        "target": goal,
                        "floor": floor,
                        "loss": str(loss.kind),
                        "theta": loss.theta,
                        "achieved": achieved,
                    }
                ]
            )
        },
        output_dir=output_dir,
        started=started,
        config_sha256=payload_digest(payload),
        parameters={"scenario": str(path), "target": goal},
    )
    log.info(f"Calibration finished: loss={loss.kind} theta={loss.theta}")
    return report
