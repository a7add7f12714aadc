"""Parametric competing-risks models built from independent latent cause times.

Weibull is the design family (hazard ``k rho^k t^(k-1)``, rate ``rho``). Gompertz
(hazard ``rate * exp(shape * t)``) and log-normal (``log T ~ N(-log rate, shape^2)``)
exist for robustness scenarios and go through the same quadrature path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
from scipy import stats

from .model.enums import Cause, Family
from .model.errors import DomainError, InputError, UnsupportedCaseError
from .numerics import DEFAULT_TOLERANCE, integrate, lower_incomplete_gamma

if TYPE_CHECKING:
    from numpy.typing import ArrayLike, NDArray
    from scipy.stats._distn_infrastructure import rv_continuous_frozen

    from .numerics import RngStream, ToleranceConfig


@dataclass(frozen=True, slots=True)
class CauseSpecificParams:
    family: Family
    shape: float
    rate: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "family", Family(self.family))
        for name in ("shape", "rate"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise InputError(f"{self.family} {name} must be finite and > 0, got {value}")

    @classmethod
    def weibull(cls, k: float, rho: float) -> CauseSpecificParams:
        return cls(Family.WEIBULL, k, rho)

    @classmethod
    def gompertz(cls, shape: float, rate: float) -> CauseSpecificParams:
        return cls(Family.GOMPERTZ, shape, rate)

    @classmethod
    def lognormal(cls, sigma: float, rate: float) -> CauseSpecificParams:
        return cls(Family.LOGNORMAL, sigma, rate)

    def distribution(self) -> rv_continuous_frozen:
        match self.family:
            case Family.WEIBULL:
                return stats.weibull_min(c=self.shape, scale=1.0 / self.rate)
            case Family.GOMPERTZ:
                return stats.gompertz(c=self.rate / self.shape, scale=1.0 / self.shape)
            case Family.LOGNORMAL:
                return stats.lognorm(s=self.shape, scale=1.0 / self.rate)

    def hazard_values(self, t: ArrayLike) -> NDArray[np.float64]:
        times = np.asarray(t, dtype=np.float64)
        match self.family:
            case Family.WEIBULL:
                with np.errstate(divide="ignore"):
                    return self.shape * self.rate**self.shape * times ** (self.shape - 1.0)
            case Family.GOMPERTZ:
                return self.rate * np.exp(self.shape * times)
            case Family.LOGNORMAL:
                dist = self.distribution()
                with np.errstate(divide="ignore"):
                    return np.exp(dist.logpdf(times) - dist.logsf(times))

    def cumulative_hazard(self, t: ArrayLike) -> NDArray[np.float64]:
        times = np.asarray(t, dtype=np.float64)
        match self.family:
            case Family.WEIBULL:
                return (self.rate * times) ** self.shape
            case Family.GOMPERTZ:
                return self.rate / self.shape * np.expm1(self.shape * times)
            case Family.LOGNORMAL:
                return -self.distribution().logsf(times)


@dataclass(frozen=True, slots=True)
class CompetingRisksModel:
    """Event of interest (cause 1) and competing event (cause 2) for one arm."""

    cause1: CauseSpecificParams
    cause2: CauseSpecificParams

    @classmethod
    def weibull(cls, k1: float, rho1: float, k2: float, rho2: float) -> CompetingRisksModel:
        return cls(CauseSpecificParams.weibull(k1, rho1), CauseSpecificParams.weibull(k2, rho2))

    def params(self, cause: Cause | int) -> CauseSpecificParams:
        return self.cause1 if Cause(cause) is Cause.EVENT_OF_INTEREST else self.cause2

    @property
    def common_weibull_shape(self) -> float | None:
        """Shared shape when both causes are Weibull with equal k, else None."""

        if self.cause1.family is Family.WEIBULL and self.cause2.family is Family.WEIBULL:
            if math.isclose(self.cause1.shape, self.cause2.shape, rel_tol=1e-12):
                return self.cause1.shape
        return None

    def survival_values(self, t: ArrayLike) -> NDArray[np.float64]:
        return np.exp(-(self.cause1.cumulative_hazard(t) + self.cause2.cumulative_hazard(t)))

    def subdensity_values(self, cause: Cause | int, t: ArrayLike) -> NDArray[np.float64]:
        """Derivative of the cumulative incidence: all-cause survival times cause hazard."""

        return self.survival_values(t) * self.params(cause).hazard_values(t)


def _check_time(t: float, what: str = "t") -> None:
    if not t >= 0:
        raise DomainError(f"{what} must be >= 0, got {t}")


def hazard(params: CauseSpecificParams, t: float) -> float:
    _check_time(t)
    if t == 0 and params.family is Family.WEIBULL and params.shape < 1:
        raise DomainError(f"Weibull hazard with k={params.shape} < 1 is unbounded at t=0")
    return float(params.hazard_values(t))


def all_cause_survival(model: CompetingRisksModel, t: float) -> float:
    _check_time(t)
    return float(model.survival_values(t))


def cif(
    model: CompetingRisksModel,
    cause: Cause | int,
    t: float,
    cfg: ToleranceConfig = DEFAULT_TOLERANCE,
) -> float:
    _check_time(t)
    return integrate(lambda u: float(model.subdensity_values(cause, u)), 0.0, t, cfg)


def rmtl_true(
    model: CompetingRisksModel,
    cause: Cause | int,
    tau: float,
    cfg: ToleranceConfig = DEFAULT_TOLERANCE,
) -> float:
    """Area under the cause-``cause`` incidence curve on ``[0, tau]``."""

    _check_time(tau, "tau")
    # integral of F_j over [0, tau] equals the integral of (tau - u) dF_j(u)
    return integrate(lambda u: (tau - u) * float(model.subdensity_values(cause, u)), 0.0, tau, cfg)


def rtl_variance_true(
    model: CompetingRisksModel,
    cause: Cause | int,
    tau: float,
    cfg: ToleranceConfig = DEFAULT_TOLERANCE,
) -> float:
    """Variance of the restricted time lost ``X = (tau - T) 1{T <= tau, cause}``."""

    _check_time(tau, "tau")
    mean = rmtl_true(model, cause, tau, cfg)
    second = integrate(
        lambda u: (tau - u) ** 2 * float(model.subdensity_values(cause, u)), 0.0, tau, cfg
    )
    return max(second - mean**2, 0.0)


def _weibull_closed_parts(
    k: float, rho1: float, rho2: float, cause: Cause | int, tau: float
) -> tuple[float, float, float]:
    if not (k > 0 and rho1 > 0 and rho2 > 0):
        raise InputError(f"closed forms need k, rho1, rho2 > 0, got {k}, {rho1}, {rho2}")
    _check_time(tau, "tau")
    total = rho1**k + rho2**k
    share = (rho1 if Cause(cause) is Cause.EVENT_OF_INTEREST else rho2) ** k / total
    x = total * tau**k
    first = lower_incomplete_gamma(1.0 / k, x) / (k * total ** (1.0 / k)) if tau > 0 else 0.0
    second = lower_incomplete_gamma(2.0 / k, x) / (k * total ** (2.0 / k)) if tau > 0 else 0.0
    return share, first, second


def rmtl_weibull_closed(
    k: float, rho1: float, rho2: float, cause: Cause | int, tau: float
) -> float:
    """RMTL for two Weibull causes sharing shape ``k``.

    With ``L = rho1^k + rho2^k`` the cause-j incidence is ``p_j (1 - exp(-L t^k))``,
    ``p_j = rho_j^k / L``, so the RMTL is ``p_j (tau - I0)`` with
    ``I0 = lower_gamma(1/k, L tau^k) / (k L^(1/k))``.
    """

    share, first, _ = _weibull_closed_parts(k, rho1, rho2, cause, tau)
    return share * (tau - first)


def rtl_variance_weibull_closed(
    k: float, rho1: float, rho2: float, cause: Cause | int, tau: float
) -> float:
    """Variance companion of :func:`rmtl_weibull_closed`.

    Uses ``I1 = lower_gamma(2/k, L tau^k) / (k L^(2/k))``.
    """

    share, first, second = _weibull_closed_parts(k, rho1, rho2, cause, tau)
    mean = share * (tau - first)
    return max(share * (tau**2 - 2.0 * tau * first + 2.0 * second) - mean**2, 0.0)


def model_rmtl_closed(model: CompetingRisksModel, cause: Cause | int, tau: float) -> float:
    k = model.common_weibull_shape
    if k is None:
        raise UnsupportedCaseError("closed form needs equal Weibull shapes; use rmtl_true")
    return rmtl_weibull_closed(k, model.cause1.rate, model.cause2.rate, cause, tau)


def model_rtl_variance_closed(model: CompetingRisksModel, cause: Cause | int, tau: float) -> float:
    k = model.common_weibull_shape
    if k is None:
        raise UnsupportedCaseError("closed form needs equal Weibull shapes; use rtl_variance_true")
    return rtl_variance_weibull_closed(k, model.cause1.rate, model.cause2.rate, cause, tau)


def sample_events(
    model: CompetingRisksModel, rng: RngStream, size: int
) -> tuple[NDArray[np.float64], NDArray[np.int8]]:
    """Draw ``size`` (time, cause) pairs from independent latent cause times.

    Each latent time comes from its marginal by inverse CDF; ties go to cause 1.
    """

    if size < 0:
        raise InputError(f"sample size must be >= 0, got {size}")
    uniforms = rng.generator.random((2, size))
    latent1 = model.cause1.distribution().ppf(uniforms[0])
    latent2 = model.cause2.distribution().ppf(uniforms[1])
    first = latent1 <= latent2
    times = np.where(first, latent1, latent2).astype(np.float64)
    causes = np.where(first, Cause.EVENT_OF_INTEREST, Cause.COMPETING).astype(np.int8)
    return times, causes


def sample_event(model: CompetingRisksModel, rng: RngStream) -> tuple[float, Cause]:
    times, causes = sample_events(model, rng, 1)
    return float(times[0]), Cause(int(causes[0]))
