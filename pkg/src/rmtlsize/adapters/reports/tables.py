"""Tidy pandas tables for results, one observation per row."""

from __future__ import annotations

from logging import getLogger
from typing import TYPE_CHECKING

import pandas as pd

from rmtlsize.domain.model import AnalysisMethod

if TYPE_CHECKING:
    from collections.abc import Iterable, Mapping, Sequence
    from pathlib import Path

    from rmtlsize.domain.design import SampleSizeResult
    from rmtlsize.domain.estimation import RmtlEstimate
    from rmtlsize.domain.hypothesis_tests import TestResult
    from rmtlsize.domain.model import StepCurve
    from rmtlsize.domain.parametric import CompetingRisksModel
    from rmtlsize.domain.simulation import PowerBlock, PowerRow, SweepRow

log = getLogger(__name__)

_FLOAT_FORMAT = "%.6f"


def write_table(frame: pd.DataFrame, path: Path) -> Path:
    frame.to_csv(path, index=False, float_format=_FLOAT_FORMAT, lineterminator="\n")
    log.info(f"Wrote {len(frame)} rows to {path}")
    return path


def format_frame(frame: pd.DataFrame) -> str:
    """Fixed-width text with three decimals, for terminal reports."""

    if frame.empty:
        return "(no rows)"
    return frame.to_string(index=False, float_format=lambda value: f"{value:.3f}", na_rep="-")


def _sizes_record(result: SampleSizeResult) -> dict[str, object]:
    record: dict[str, object] = {
        "method": str(result.method),
        "n_total": result.n_total,
        "n_E": result.n_E,
        "n_C": result.n_C,
        "delta": result.delta,
        "phi_E": result.phi_E,
        "phi_C": result.phi_C,
        "sigma2_E_corrected": result.sigma2_E_corrected,
        "sigma2_C_corrected": result.sigma2_C_corrected,
    }
    record.update({f"diag_{key}": value for key, value in sorted(result.diagnostics.items())})
    return record


def sample_size_frame(results: Iterable[SampleSizeResult]) -> pd.DataFrame:
    return pd.DataFrame([_sizes_record(result) for result in results])


def _power_record(row: PowerRow | None) -> dict[str, object]:
    record: dict[str, object] = {}
    for test in AnalysisMethod:
        tested = row is not None and test in row.rejections
        record[f"power_{test}"] = row.power(test) if tested else None
        record[f"mc_se_{test}"] = row.mc_se(test) if tested else None
        record[f"failures_{test}"] = row.failures.get(test) if tested else None
    record["iterations"] = None if row is None else row.iterations
    record["mean_censored"] = None if row is None else row.mean_censored
    return record


def power_table_frame(blocks: Sequence[PowerBlock]) -> pd.DataFrame:
    records: list[dict[str, object]] = []
    for block in blocks:
        base: dict[str, object] = {
            "scenario": block.scenario,
            "censoring_target": block.censoring_target,
        }
        for row in block.rows:
            records.append(
                base
                | {
                    "method": str(row.method),
                    "status": "ok",
                    "n_E": row.n_E,
                    "n_C": row.n_C,
                    "n_used": row.n_used,
                }
                | _power_record(row)
            )
        for method, message in block.errors.items():
            records.append(
                base
                | {"method": str(method), "status": f"infeasible: {message}"}
                | _power_record(None)
            )
    return pd.DataFrame(records)


def sweep_frame(rows: Iterable[SweepRow]) -> pd.DataFrame:
    records: list[dict[str, object]] = []
    for row in rows:
        record: dict[str, object] = {
            "tau": row.tau,
            "t_a": row.t_a,
            "t_f": row.t_f,
            "method": str(row.method),
            "status": row.status,
        }
        if row.sizes is not None:
            record |= _sizes_record(row.sizes)
        record |= _power_record(row.power)
        records.append(record)
    return pd.DataFrame(records)


def rmtl_frame(estimates: Mapping[str, RmtlEstimate], alpha: float) -> pd.DataFrame:
    records: list[dict[str, object]] = []
    for group, estimate in estimates.items():
        low, high = estimate.confidence_interval(alpha)
        records.append(
            {
                "group": group,
                "n": estimate.n,
                "tau": estimate.tau,
                "cause": int(estimate.cause),
                "rmtl": estimate.value,
                "se": estimate.se,
                "ci_low": low,
                "ci_high": high,
            }
        )
    return pd.DataFrame(records)


def tests_frame(results: Iterable[TestResult]) -> pd.DataFrame:
    return pd.DataFrame(
        [
            {
                "test": str(result.method),
                "statistic": result.statistic,
                "p_value": result.p_value,
                "effect": result.effect,
                "ci_low": result.ci_low,
                "ci_high": result.ci_high,
                "alpha": result.alpha,
            }
            for result in results
        ]
    )


def cif_frame(curves: Mapping[str, StepCurve]) -> pd.DataFrame:
    """Cumulative incidence step points per group, starting at (0, 0)."""

    frames = [
        pd.DataFrame(
            {
                "group": group,
                "time": [0.0, *curve.knots.tolist()],
                "cif": [curve.baseline, *curve.values.tolist()],
            }
        )
        for group, curve in curves.items()
    ]
    if not frames:
        return pd.DataFrame(columns=["group", "time", "cif"])
    return pd.concat(frames, ignore_index=True)


def fit_frame(models: Mapping[str, CompetingRisksModel]) -> pd.DataFrame:
    records: list[dict[str, object]] = []
    for group, model in models.items():
        for cause_label, params in (("1", model.cause1), ("2", model.cause2)):
            records.append(
                {
                    "group": group,
                    "cause": int(cause_label),
                    "family": str(params.family),
                    "shape": params.shape,
                    "rate": params.rate,
                }
            )
    return pd.DataFrame(records)


def write_records_json(frame: pd.DataFrame, path: Path) -> Path:
    path.write_text(frame.to_json(orient="records", indent=2, double_precision=10) + "\n")
    log.info(f"Wrote {len(frame)} records to {path}")
    return path
