from __future__ import annotations

import math

import numpy as np
import pytest

from rmtlsize.domain.estimation import (
    aj_cif,
    estimate_rmtl,
    fit_competing_risks_model,
    fit_weibull_cause,
    km_event_free,
    risk_table,
    rmtl_hat,
    rmtl_se,
    rtl_var_hat,
)
from rmtlsize.domain.model import (
    Cause,
    EstimationError,
    InputError,
    RestrictionError,
    SeMethod,
    Status,
    SurvivalDataset,
    SurvivalRecord,
)
from rmtlsize.domain.numerics import RngStream
from rmtlsize.domain.parametric import CompetingRisksModel, rmtl_true, sample_events

def _records(*pairs: tuple[float, int]) -> list[SurvivalRecord]:
    return [SurvivalRecord(time=t, status=Status(s), group="A") for t, s in pairs]


def _simulated(
    n: int, seed: int, *, censor_rate: float | None = None, model: CompetingRisksModel | None = None
) -> SurvivalDataset:
    model = model or CompetingRisksModel.weibull(1.0, 0.1, 1.0, 0.1)
    rng = RngStream(seed, 0)
    times, causes = sample_events(model, rng, n)
    if censor_rate is None:
        return SurvivalDataset.from_arrays(times, causes)
    censor = rng.generator.exponential(1.0 / censor_rate, n)
    observed = np.minimum(times, censor)
    statuses = np.where(times <= censor, causes, Status.CENSORED)
    return SurvivalDataset.from_arrays(observed, statuses)


def test_km_hand_example() -> None:
    curve = km_event_free(_records((1, 1), (2, 0), (3, 1)))
    assert float(curve(1.0)) == pytest.approx(2 / 3)
    assert float(curve(2.5)) == pytest.approx(2 / 3)
    assert float(curve(3.0)) == 0.0
    assert float(curve(0.5)) == 1.0


def test_km_all_censored_stays_at_one() -> None:
    curve = km_event_free(_records((1, 0), (2, 0)))
    assert curve.knots.size == 0
    assert float(curve(10.0)) == 1.0


def test_km_single_event() -> None:
    curve = km_event_free(_records((5, 2)))
    assert float(curve(4.999)) == 1.0
    assert float(curve(5.0)) == 0.0


def test_empty_data_is_rejected() -> None:
    with pytest.raises(InputError):
        km_event_free([])
    with pytest.raises(InputError):
        aj_cif([], 1)


TOY = ((1, 1), (2, 2), (3, 0), (4, 1))


def test_aj_hand_example() -> None:
    data = _records(*TOY)
    cif1 = aj_cif(data, Cause.EVENT_OF_INTEREST)
    cif2 = aj_cif(data, Cause.COMPETING)
    assert float(cif1(1.0)) == pytest.approx(0.25)
    assert float(cif2(2.0)) == pytest.approx(0.25)
    assert float(cif1(4.0)) == pytest.approx(0.75)
    np.testing.assert_allclose(cif1.knots, [1.0, 4.0])


def test_aj_without_events_of_cause_is_zero() -> None:
    curve = aj_cif(_records((1, 2), (2, 0)), 1)
    assert float(curve(5.0)) == 0.0


def test_aj_additivity_with_event_free_curve() -> None:
    data = _simulated(300, 3, censor_rate=0.05)
    survival = km_event_free(data)
    both = aj_cif(data, 1)(survival.knots) + aj_cif(data, 2)(survival.knots)
    np.testing.assert_allclose(both, 1.0 - survival.values, atol=1e-12)
    assert np.all(np.diff(aj_cif(data, 1).values) >= 0)


def test_events_precede_censorings_at_tied_times() -> None:
    table = risk_table(_records((2, 1), (2, 0), (3, 1)))
    assert table.at_risk.tolist() == [3, 1]
    assert table.d1.tolist() == [1, 1]


def test_rmtl_hat_and_variance_hand_example() -> None:
    data = _records(*TOY)
    assert rmtl_hat(data, 1, 4.0).value == pytest.approx(0.75)
    assert rtl_var_hat(data, 1, 4.0) == pytest.approx(1.6875)


def test_rmtl_hat_small_tau_and_all_censored() -> None:
    assert rmtl_hat(_records(*TOY), 1, 1e-9).value == 0.0
    censored = _records((1, 0), (3, 0))
    assert rmtl_hat(censored, 1, 2.0).value == 0.0
    assert rtl_var_hat(censored, 1, 2.0) == 0.0


def test_single_failure_is_known_beyond_its_time() -> None:
    data = _records((1, 1))
    assert rmtl_hat(data, 1, 2.0).value == pytest.approx(1.0)
    assert rtl_var_hat(data, 1, 2.0) == pytest.approx(0.0)


def test_tau_beyond_follow_up_is_a_restriction_error() -> None:
    with pytest.raises(RestrictionError) as exc:
        rmtl_hat(_records((1, 1), (3, 0)), 1, 5.0)
    assert exc.value.bound == 3.0


def test_rmtl_hat_ignores_what_happens_beyond_tau() -> None:
    base = _records(*TOY, (9, 0), (12, 1))
    moved = _records((1, 1), (2, 2), (3, 0), (7, 0), (6, 0), (30, 2))
    truncated = SurvivalDataset.from_records(base).truncated(3.5)

    expected = 2.5 / 6
    assert rmtl_hat(base, 1, 3.5).value == pytest.approx(expected)
    assert rmtl_hat(moved, 1, 3.5).value == pytest.approx(expected)
    assert rmtl_hat(truncated, 1, 3.5).value == pytest.approx(expected)


def test_martingale_se_two_record_hand_value() -> None:
    data = _records((1, 1), (3, 1))
    # (t2 - t1)^2 / 8
    assert rmtl_se(data, 1, 4.0) == pytest.approx(math.sqrt(0.5))


def test_martingale_se_without_censoring_matches_sample_variance() -> None:
    data = _simulated(400, 9)
    tau = 10.0
    expected = math.sqrt(rtl_var_hat(data, 1, tau) / len(data))
    assert rmtl_se(data, 1, tau) == pytest.approx(expected, rel=1e-8)


def test_martingale_se_scales_with_sample_size() -> None:
    small = rmtl_se(_simulated(1000, 1, censor_rate=0.03), 1, 10.0)
    large = rmtl_se(_simulated(4000, 2, censor_rate=0.03), 1, 10.0)
    assert large / small == pytest.approx(0.5, rel=0.1)


def test_bootstrap_agrees_with_martingale() -> None:
    model = CompetingRisksModel.weibull(1.5, 0.1, 1.0, 0.05)
    data = _simulated(500, 21, censor_rate=0.04, model=model)
    tau = 8.0
    martingale = rmtl_se(data, 1, tau)
    bootstrap = estimate_rmtl(data, 1, tau, SeMethod.BOOTSTRAP, replicates=500, rng=RngStream(4, 0))
    assert bootstrap.se == pytest.approx(martingale, rel=0.1)
    assert bootstrap.skipped_resamples == 0


def test_bootstrap_is_deterministic_given_stream() -> None:
    data = _simulated(100, 5, censor_rate=0.05)
    first = estimate_rmtl(data, 1, 5.0, SeMethod.BOOTSTRAP, replicates=100, rng=RngStream(8, 0))
    again = estimate_rmtl(data, 1, 5.0, SeMethod.BOOTSTRAP, replicates=100, rng=RngStream(8, 0))
    assert first.se == again.se


def test_bootstrap_requirements() -> None:
    data = _simulated(50, 5)
    with pytest.raises(InputError):
        estimate_rmtl(data, 1, 5.0, SeMethod.BOOTSTRAP)
    with pytest.raises(InputError):
        estimate_rmtl(data, 1, 5.0, SeMethod.BOOTSTRAP, replicates=50, rng=RngStream(1, 0))


def test_confidence_interval() -> None:
    estimate = estimate_rmtl(_records(*TOY), 1, 4.0)
    low, high = estimate.confidence_interval(0.05)
    assert low < estimate.value < high
    assert (high - low) / 2 == pytest.approx(1.959964 * (estimate.se or 0.0), rel=1e-6)
    with pytest.raises(EstimationError):
        rmtl_hat(_records(*TOY), 1, 4.0).confidence_interval()


def test_rmtl_hat_is_consistent_for_exponential_truth() -> None:
    model = CompetingRisksModel.weibull(1.0, 0.1, 1.0, 0.1)
    estimates = [
        rmtl_hat(_simulated(10_000, seed, model=model), 1, 10.0).value for seed in range(50)
    ]
    assert float(np.mean(estimates)) == pytest.approx(rmtl_true(model, 1, 10.0), abs=0.02)


def test_weibull_fit_recovers_parameters() -> None:
    truth = CompetingRisksModel.weibull(1.5, 0.1, 0.8, 0.05)
    fitted = fit_competing_risks_model(_simulated(20_000, 13, censor_rate=0.02, model=truth))
    assert fitted.cause1.shape == pytest.approx(1.5, rel=0.05)
    assert fitted.cause1.rate == pytest.approx(0.1, rel=0.05)
    assert fitted.cause2.shape == pytest.approx(0.8, rel=0.05)
    assert fitted.cause2.rate == pytest.approx(0.05, rel=0.1)


def test_weibull_fit_needs_events() -> None:
    with pytest.raises(EstimationError):
        fit_weibull_cause(_records((1, 1), (2, 0)), 1)


@pytest.mark.slow
def test_martingale_se_tracks_replicate_spread() -> None:
    values: list[float] = []
    ses: list[float] = []
    for seed in range(2000):
        estimate = estimate_rmtl(_simulated(1000, seed, censor_rate=0.05), 1, 10.0)
        assert estimate.se is not None
        values.append(estimate.value)
        ses.append(estimate.se)
    assert float(np.mean(ses)) == pytest.approx(float(np.std(values, ddof=1)), rel=0.05)
