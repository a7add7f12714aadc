from __future__ import annotations

import math

import numpy as np
import pytest

from rmtlsize.domain.model import Cause, DomainError, Family, InputError, UnsupportedCaseError
from rmtlsize.domain.numerics import RngStream
from rmtlsize.domain.parametric import (
    CauseSpecificParams,
    CompetingRisksModel,
    all_cause_survival,
    cif,
    hazard,
    model_rmtl_closed,
    model_rtl_variance_closed,
    rmtl_true,
    rmtl_weibull_closed,
    rtl_variance_true,
    rtl_variance_weibull_closed,
    sample_event,
    sample_events,
)


def test_weibull_hazard_and_survival() -> None:
    params = CauseSpecificParams.weibull(2.0, 0.5)
    # k rho^k t^(k-1) = 2 * 0.25 * 3
    assert hazard(params, 3.0) == pytest.approx(1.5)
    model = CompetingRisksModel.weibull(1.0, 0.1, 1.0, 0.2)
    assert all_cause_survival(model, 2.0) == pytest.approx(math.exp(-0.6))
    assert all_cause_survival(model, 0.0) == 1.0


def test_hazard_is_unbounded_at_zero_for_small_shape() -> None:
    with pytest.raises(DomainError):
        hazard(CauseSpecificParams.weibull(0.7, 0.05), 0.0)
    assert hazard(CauseSpecificParams.weibull(1.0, 0.05), 0.0) == pytest.approx(0.05)


def test_parameters_must_be_positive() -> None:
    with pytest.raises(InputError):
        CauseSpecificParams.weibull(0.0, 1.0)
    with pytest.raises(InputError):
        CauseSpecificParams.weibull(1.0, math.inf)


def test_exponential_cif_closed_form() -> None:
    model = CompetingRisksModel.weibull(1.0, 0.1, 1.0, 0.1)
    assert cif(model, Cause.EVENT_OF_INTEREST, 10.0) == pytest.approx(0.5 * (1 - math.exp(-2)))
    assert cif(model, Cause.EVENT_OF_INTEREST, 0.0) == 0.0


def test_cifs_sum_to_one_minus_survival() -> None:
    model = CompetingRisksModel(
        CauseSpecificParams.gompertz(0.05, 0.02), CauseSpecificParams.lognormal(0.8, 0.1)
    )
    total = cif(model, 1, 7.0) + cif(model, 2, 7.0)
    assert total == pytest.approx(1 - all_cause_survival(model, 7.0), rel=1e-8)


def test_exponential_rmtl_and_variance_reference_values() -> None:
    model = CompetingRisksModel.weibull(1.0, 0.1, 1.0, 0.1)
    assert rmtl_weibull_closed(1.0, 0.1, 0.1, Cause.EVENT_OF_INTEREST, 10.0) == pytest.approx(
        2.838338, abs=1e-6
    )
    assert rtl_variance_weibull_closed(1.0, 0.1, 0.1, 1, 10.0) == pytest.approx(
        13.5605, abs=1e-4
    )
    assert rmtl_true(model, 1, 10.0) == pytest.approx(2.838338, abs=1e-6)
    assert rtl_variance_true(model, 1, 10.0) == pytest.approx(13.5605, abs=1e-4)


def test_rmtl_difference_of_exponential_pipeline() -> None:
    control = CompetingRisksModel.weibull(1.0, 0.1, 1.0, 0.1)
    experimental = CompetingRisksModel.weibull(1.0, 0.15, 1.0, 0.1)
    delta = rmtl_true(experimental, 1, 10.0) - rmtl_true(control, 1, 10.0)
    assert delta == pytest.approx(0.95866, abs=1e-5)
    assert rtl_variance_true(experimental, 1, 10.0) == pytest.approx(15.2067, abs=1e-4)


@pytest.mark.parametrize("k", [0.5, 1.0, 2.0, 3.0])
@pytest.mark.parametrize("ratio", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("tau", [1.0, 5.0, 20.0])
def test_closed_forms_agree_with_quadrature(k: float, ratio: float, tau: float) -> None:
    rho2 = 0.1
    rho1 = ratio * rho2
    model = CompetingRisksModel.weibull(k, rho1, k, rho2)
    for cause in Cause:
        closed_mean = rmtl_weibull_closed(k, rho1, rho2, cause, tau)
        closed_var = rtl_variance_weibull_closed(k, rho1, rho2, cause, tau)
        assert closed_mean == pytest.approx(rmtl_true(model, cause, tau), rel=1e-6)
        assert closed_var == pytest.approx(rtl_variance_true(model, cause, tau), rel=1e-6)


def test_rmtl_is_zero_at_origin() -> None:
    assert rmtl_weibull_closed(1.5, 0.1, 0.2, 1, 0.0) == 0.0
    assert rtl_variance_weibull_closed(1.5, 0.1, 0.2, 1, 0.0) == 0.0


def test_model_closed_forms_need_common_shape() -> None:
    equal = CompetingRisksModel.weibull(1.5, 0.1, 1.5, 0.2)
    assert model_rmtl_closed(equal, 2, 4.0) == pytest.approx(rmtl_true(equal, 2, 4.0), rel=1e-6)
    assert model_rtl_variance_closed(equal, 2, 4.0) == pytest.approx(
        rtl_variance_true(equal, 2, 4.0), rel=1e-6
    )
    unequal = CompetingRisksModel.weibull(1.5, 0.1, 1.0, 0.2)
    assert unequal.common_weibull_shape is None
    with pytest.raises(UnsupportedCaseError):
        model_rmtl_closed(unequal, 1, 4.0)


def test_distribution_families() -> None:
    assert CauseSpecificParams.gompertz(0.1, 0.05).family is Family.GOMPERTZ
    lognormal = CauseSpecificParams.lognormal(0.5, 0.2)
    assert lognormal.distribution().median() == pytest.approx(5.0)
    gompertz = CauseSpecificParams.gompertz(0.1, 0.05)
    survival = float(gompertz.distribution().sf(3.0))
    assert survival == pytest.approx(math.exp(-float(gompertz.cumulative_hazard(3.0))), rel=1e-10)


def test_sample_events_law_matches_cif() -> None:
    model = CompetingRisksModel.weibull(1.5, 0.1, 1.0, 0.05)
    times, causes = sample_events(model, RngStream(11, 0), 100_000)
    assert times.shape == causes.shape == (100_000,)
    assert set(np.unique(causes)) <= {1, 2}
    for t in (2.0, 5.0, 10.0):
        empirical = float(np.mean((times <= t) & (causes == 1)))
        assert empirical == pytest.approx(cif(model, 1, t), abs=0.01)


def test_sample_event_is_reproducible() -> None:
    model = CompetingRisksModel.weibull(1.0, 0.1, 1.0, 0.1)
    first = sample_event(model, RngStream(5, 2))
    again = sample_event(model, RngStream(5, 2))
    assert first == again
    assert first[0] > 0
    assert isinstance(first[1], Cause)
