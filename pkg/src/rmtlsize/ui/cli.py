from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path
from signal import SIGINT, signal
from typing import TYPE_CHECKING

from dotenv import find_dotenv, load_dotenv
from pydantic import ValidationError

from rmtlsize.adapters.reports import (
    format_frame,
    power_table_frame,
    rmtl_frame,
    sample_size_frame,
    sweep_frame,
    tests_frame,
)
from rmtlsize.app import (
    ALL_METHODS,
    SampleSizeRequest,
    analyze_dataset,
    calibrate_scenario,
    compute_sample_sizes,
    request_from_scenario,
    simulate_scenario,
    sweep_scenario,
)
from rmtlsize.config import ConfigurationError, configure_logging
from rmtlsize.domain.model import (
    Cause,
    InfeasibleError,
    InputError,
    SeMethod,
    SizingMethod,
)
from rmtlsize.domain.parametric import CauseSpecificParams, CompetingRisksModel

if TYPE_CHECKING:
    from collections.abc import Sequence
    from types import FrameType

log = logging.getLogger(__name__)

EXIT_INPUT = 2
EXIT_INFEASIBLE = 3
EXIT_INTERNAL = 4

_METHOD_CHOICES = [*(str(method) for method in SizingMethod), "all"]
_ARM_FIELDS = ("k1", "rho1", "k2", "rho2")


def _add_output(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--out",
        type=Path,
        default=None,
        help="Directory for CSV/JSON outputs and the manifest (defaults to config)",
    )


def _add_monte_carlo(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--iterations", type=int, help="Simulated trials per design")
    parser.add_argument("--seed", type=int, help="Master seed (a random one is drawn and logged)")
    parser.add_argument("--workers", type=int, help="Worker processes (defaults to config)")


def _add_methods(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--method",
        action="append",
        choices=_METHOD_CHOICES,
        help="Sizing method; repeat for several, 'all' for every method",
    )


def _parse_args(argv: Sequence[str]) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        description="Sample size, analysis and power simulation for competing-risks trials"
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    samplesize = subparsers.add_parser("samplesize", help="Size a two-arm trial")
    samplesize.add_argument(
        "--config", type=Path, help="Scenario JSON supplying arms and design defaults"
    )
    for arm in ("e", "c"):
        for name in _ARM_FIELDS:
            samplesize.add_argument(
                f"--{arm}-{name}",
                type=float,
                help=f"Weibull {name} of the {'experimental' if arm == 'e' else 'control'} arm",
            )
    samplesize.add_argument("--tau", type=float, help="Restriction time")
    samplesize.add_argument("--accrual", type=float, help="Accrual period t_a")
    samplesize.add_argument("--followup", type=float, help="Follow-up period t_f")
    samplesize.add_argument("--ratio", type=float, help="Allocation ratio n_E / n_C")
    samplesize.add_argument("--alpha", type=float, help="Two-sided significance level")
    samplesize.add_argument("--power", type=float, help="Target power")
    samplesize.add_argument("--cause", type=int, choices=(1, 2), help="Cause of interest")
    loss = samplesize.add_mutually_exclusive_group()
    loss.add_argument("--censoring-target", type=float, help="Pooled censoring proportion")
    loss.add_argument("--loss-theta", type=float, help="Upper end of the uniform loss time")
    samplesize.add_argument("--hr", type=float, help="Hazard ratio for the hr method")
    samplesize.add_argument("--shr", type=float, help="Subdistribution HR for the shr method")
    samplesize.add_argument("--seed", type=int, help="Seed for the phi and pilot simulations")
    samplesize.add_argument("--phi-samples", type=int, help="Monte Carlo size m for phi")
    samplesize.add_argument("--pilot-n", type=int, help="Simulated pilot size per arm")
    _add_methods(samplesize)
    _add_output(samplesize)

    analyze = subparsers.add_parser("analyze", help="Analyse a two-group dataset")
    analyze.add_argument("dataset", type=Path, help="CSV with columns time,status,group")
    analyze.add_argument("--tau", type=float, help="Restriction time (defaults to the bound)")
    analyze.add_argument("--alpha", type=float, default=0.05, help="Significance level")
    analyze.add_argument("--cause", type=int, choices=(1, 2), default=1, help="Cause of interest")
    analyze.add_argument("--experimental", type=str, help="Group label of the experimental arm")
    analyze.add_argument(
        "--se",
        choices=[str(method) for method in SeMethod],
        default=str(SeMethod.MARTINGALE),
        help="Standard error method",
    )
    analyze.add_argument("--bootstrap-replicates", type=int, help="Bootstrap resamples")
    analyze.add_argument("--seed", type=int, help="Bootstrap seed")
    analyze.add_argument(
        "--fit-weibull", action="store_true", help="Also fit cause-specific Weibull models"
    )
    _add_output(analyze)

    simulate = subparsers.add_parser("simulate", help="Power table for a scenario")
    simulate.add_argument("scenario", type=Path, help="Scenario JSON")
    simulate.add_argument(
        "--censoring-target",
        type=float,
        action="append",
        help="Censoring target; repeat for several (defaults to the scenario table)",
    )
    _add_methods(simulate)
    _add_monte_carlo(simulate)
    _add_output(simulate)

    sweep = subparsers.add_parser("sweep", help="Sizes and powers over tau or t_a x t_f grids")
    sweep.add_argument("scenario", type=Path, help="Scenario JSON")
    sweep.add_argument("--tau-grid", type=float, nargs="+", help="Restriction times")
    sweep.add_argument("--accrual-grid", type=float, nargs="+", help="Accrual periods")
    sweep.add_argument("--followup-grid", type=float, nargs="+", help="Follow-up periods")
    sweep.add_argument(
        "--no-power", action="store_true", help="Only sizes, skip the power simulation"
    )
    _add_methods(sweep)
    _add_monte_carlo(sweep)
    _add_output(sweep)

    calibrate = subparsers.add_parser("calibrate", help="Uniform loss for a censoring target")
    calibrate.add_argument("scenario", type=Path, help="Scenario JSON")
    calibrate.add_argument("--censoring-target", type=float, help="Pooled censoring proportion")
    _add_output(calibrate)

    return parser.parse_args(list(argv))


def _methods(values: Sequence[str] | None) -> tuple[SizingMethod, ...] | None:
    if not values:
        return None
    if "all" in values:
        return ALL_METHODS
    return tuple(dict.fromkeys(SizingMethod(value) for value in values))


def _arm_model(
    args: argparse.Namespace, arm: str, base: CompetingRisksModel | None
) -> CompetingRisksModel:
    given = {name: getattr(args, f"{arm}_{name}") for name in _ARM_FIELDS}
    if base is None:
        missing = [f"--{arm}-{name}" for name, value in given.items() if value is None]
        if missing:
            raise InputError(f"missing arm parameters: {', '.join(missing)}")
        return CompetingRisksModel.weibull(
            given["k1"], given["rho1"], given["k2"], given["rho2"]
        )
    cause1 = base.cause1
    cause2 = base.cause2
    if given["k1"] is not None or given["rho1"] is not None:
        cause1 = CauseSpecificParams.weibull(
            given["k1"] or cause1.shape, given["rho1"] or cause1.rate
        )
    if given["k2"] is not None or given["rho2"] is not None:
        cause2 = CauseSpecificParams.weibull(
            given["k2"] or cause2.shape, given["rho2"] or cause2.rate
        )
    return CompetingRisksModel(cause1, cause2)


def _samplesize_request(args: argparse.Namespace) -> SampleSizeRequest:
    base = request_from_scenario(args.config) if args.config is not None else None
    overrides: dict[str, object] = {
        key: value
        for key, value in {
            "tau": args.tau,
            "t_a": args.accrual,
            "t_f": args.followup,
            "r": args.ratio,
            "alpha": args.alpha,
            "target_power": args.power,
            "hr": args.hr,
            "shr": args.shr,
            "seed": args.seed,
            "phi_samples": args.phi_samples,
            "pilot_size": args.pilot_n,
        }.items()
        if value is not None
    }
    if args.cause is not None:
        overrides["cause"] = Cause(args.cause)
    if args.censoring_target is not None:
        overrides |= {"censoring_target": args.censoring_target, "loss_theta": None}
    if args.loss_theta is not None:
        overrides |= {"loss_theta": args.loss_theta, "censoring_target": None}
    methods = _methods(args.method)
    if methods is not None:
        overrides["methods"] = methods

    if base is None:
        for flag, key in (("--tau", "tau"), ("--accrual", "t_a"), ("--followup", "t_f")):
            if key not in overrides:
                raise InputError(f"missing {flag} (or give --config)")
    model_e = _arm_model(args, "e", base.model_e if base else None)
    model_c = _arm_model(args, "c", base.model_c if base else None)
    if base is not None:
        return replace(base, model_e=model_e, model_c=model_c, **overrides)  # pyright: ignore[reportArgumentType]
    return SampleSizeRequest(model_e=model_e, model_c=model_c, **overrides)  # pyright: ignore[reportArgumentType]


def _emit(title: str, text: str) -> None:
    sys.stdout.write(f"{title}\n{text}\n\n")


def _run(args: argparse.Namespace) -> None:
    match args.command:
        case "samplesize":
            report = compute_sample_sizes(_samplesize_request(args), output_dir=args.out)
            _emit(
                f"Sample sizes (seed {report.seed}, loss {report.loss.kind})",
                format_frame(sample_size_frame(report.results)),
            )
            for method, message in report.errors.items():
                _emit(f"{method}: not computed", message)
        case "analyze":
            analysis = analyze_dataset(
                args.dataset,
                tau=args.tau,
                alpha=args.alpha,
                cause=Cause(args.cause),
                experimental=args.experimental,
                se_method=SeMethod(args.se),
                bootstrap_replicates=args.bootstrap_replicates,
                seed=args.seed,
                fit_weibull=args.fit_weibull,
                output_dir=args.out,
            )
            _emit(
                f"RMTL by group (tau {analysis.tau:.3f})",
                format_frame(rmtl_frame(analysis.estimates, args.alpha)),
            )
            _emit("Tests", format_frame(tests_frame(analysis.tests)))
        case "simulate":
            blocks = simulate_scenario(
                args.scenario,
                seed=args.seed,
                iterations=args.iterations,
                workers=args.workers,
                censoring_targets=args.censoring_target,
                methods=_methods(args.method),
                output_dir=args.out,
            )
            _emit("Empirical power", format_frame(power_table_frame(blocks)))
        case "sweep":
            sweeps = sweep_scenario(
                args.scenario,
                tau_grid=args.tau_grid,
                accrual_grid=args.accrual_grid,
                followup_grid=args.followup_grid,
                methods=_methods(args.method),
                evaluate_power=not args.no_power,
                seed=args.seed,
                iterations=args.iterations,
                workers=args.workers,
                output_dir=args.out,
            )
            for name, rows in sweeps.items():
                _emit(name, format_frame(sweep_frame(rows)))
        case "calibrate":
            calibration = calibrate_scenario(
                args.scenario, target=args.censoring_target, output_dir=args.out
            )
            theta = "-" if calibration.loss.theta is None else f"{calibration.loss.theta:.3f}"
            _emit(
                "Calibration",
                f"target {calibration.target:.3f}  floor {calibration.floor:.3f}  "
                f"loss {calibration.loss.kind}  theta {theta}  "
                f"achieved {calibration.achieved:.3f}",
            )
        case _:
            raise InputError(f"Unsupported command: {args.command}")


def main(argv: Sequence[str] | None = None) -> None:
    """Main application entry point."""
    load_dotenv(find_dotenv(usecwd=True))
    args_list = list(argv) if argv is not None else list(sys.argv[1:])
    parsed_args = _parse_args(args_list)
    try:
        configure_logging()
        _run(parsed_args)
    except (InputError, ConfigurationError, ValidationError) as exc:
        log.error(f"Invalid input: {exc}")  # noqa: TRY400
        sys.exit(EXIT_INPUT)
    except InfeasibleError as exc:
        log.error(f"Not computable: {exc}")  # noqa: TRY400
        sys.exit(EXIT_INFEASIBLE)
    except Exception:
        log.exception(f"Fatal error during {parsed_args.command}")
        sys.exit(EXIT_INTERNAL)


def sigint_handler(_signal_received: int, _frame: FrameType | None) -> None:
    """Handle SIGINT (Ctrl+C) gracefully."""
    log.info("Closed by user (Ctrl+C)")
    sys.exit(0)


if __name__ == "__main__":
    signal(SIGINT, sigint_handler)
    main()
