"""Numerical kernel: normal distribution, incomplete gamma, quadrature, roots, RNG streams.

Everything here is a thin, validated layer over scipy and numpy so that the rest of
the domain raises the package's own error types instead of scipy warnings.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Final

import numpy as np
from scipy import integrate as sp_integrate
from scipy import optimize, special, stats

from .model.errors import (
    BracketingError,
    ConvergenceError,
    DomainError,
    InputError,
    NonFiniteError,
)

if TYPE_CHECKING:
    from collections.abc import Callable, Iterable

MAX_SEED: Final[int] = 2**64 - 1

# Reserved stream-id ranges; replicate streams use 0, 1, 2, ...
PHI_STREAM_BASE: Final[int] = 1 << 40
PILOT_STREAM_BASE: Final[int] = 1 << 41


@dataclass(frozen=True, slots=True)
class ToleranceConfig:
    quadrature_rel_tol: float = 1e-9
    quadrature_abs_tol: float = 1e-13
    root_tol: float = 1e-8
    max_iter: int = 200

    def __post_init__(self) -> None:
        for name in ("quadrature_rel_tol", "quadrature_abs_tol", "root_tol"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise InputError(f"{name} must be strictly positive, got {value}")
        if self.max_iter < 1:
            raise InputError(f"max_iter must be >= 1, got {self.max_iter}")


DEFAULT_TOLERANCE: Final = ToleranceConfig()


def normal_quantile(p: float) -> float:
    if not 0.0 < p < 1.0:
        raise DomainError(f"normal quantile needs 0 < p < 1, got {p}")
    return float(stats.norm.ppf(p))


def normal_cdf(x: float) -> float:
    return float(stats.norm.cdf(x))


def upper_incomplete_gamma(a: float, x: float) -> float:
    """Non-normalised upper incomplete gamma, integral of t^(a-1) e^(-t) over [x, inf)."""

    _check_gamma_args(a, x)
    return float(special.gammaincc(a, x) * special.gamma(a))


def lower_incomplete_gamma(a: float, x: float) -> float:
    """Non-normalised lower incomplete gamma, integral of t^(a-1) e^(-t) over [0, x]."""

    _check_gamma_args(a, x)
    return float(special.gammainc(a, x) * special.gamma(a))


def _check_gamma_args(a: float, x: float) -> None:
    if not a > 0:
        raise DomainError(f"incomplete gamma needs a > 0, got {a}")
    if not x >= 0:
        raise DomainError(f"incomplete gamma needs x >= 0, got {x}")


def integrate(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    cfg: ToleranceConfig = DEFAULT_TOLERANCE,
    *,
    breakpoints: Iterable[float] = (),
) -> float:
    """Adaptive Gauss-Kronrod quadrature of ``f`` over ``[lo, hi]``.

    ``breakpoints`` are kinks or jumps of ``f``; those strictly inside the interval
    are handed to the integrator so it splits there.
    """

    if lo > hi:
        raise DomainError(f"integration bounds out of order: [{lo}, {hi}]")
    if lo == hi:
        return 0.0

    def checked(t: float) -> float:
        value = float(f(t))
        if not math.isfinite(value):
            raise NonFiniteError(f"integrand is not finite at t={t}: {value}")
        return value

    points = sorted({p for p in breakpoints if lo < p < hi})
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", sp_integrate.IntegrationWarning)
        value, _abserr = sp_integrate.quad(
            checked,
            lo,
            hi,
            epsabs=cfg.quadrature_abs_tol,
            epsrel=cfg.quadrature_rel_tol,
            limit=cfg.max_iter,
            points=points or None,
        )
    trouble = [w for w in caught if issubclass(w.category, sp_integrate.IntegrationWarning)]
    if trouble:
        raise ConvergenceError(f"quadrature on [{lo}, {hi}] failed: {trouble[0].message}")
    return float(value)


def find_root(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    cfg: ToleranceConfig = DEFAULT_TOLERANCE,
) -> float:
    """Brent's method on a sign-changing bracket."""

    f_lo, f_hi = float(f(lo)), float(f(hi))
    if not (math.isfinite(f_lo) and math.isfinite(f_hi)):
        raise NonFiniteError(f"objective is not finite at the bracket ends: {f_lo}, {f_hi}")
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if math.copysign(1.0, f_lo) == math.copysign(1.0, f_hi):
        raise BracketingError(f"no sign change on [{lo}, {hi}]: f={f_lo:.6g}, {f_hi:.6g}")
    root, result = optimize.brentq(
        f, lo, hi, xtol=cfg.root_tol, maxiter=cfg.max_iter, full_output=True, disp=False
    )
    if not result.converged:
        raise ConvergenceError(
            f"root search on [{lo}, {hi}] stopped after {result.iterations} iterations"
        )
    return float(root)


@dataclass(frozen=True, slots=True)
class RngStream:
    """Random stream keyed by ``(master_seed, stream_id)``.

    Streams are derived with ``SeedSequence`` so distinct ids are independent and the
    draw sequence for a key never depends on which worker owns it. An instance holds
    mutable generator state and belongs to a single consumer.
    """

    master_seed: int
    stream_id: int
    path: tuple[int, ...] = ()
    generator: np.random.Generator = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not 0 <= self.master_seed <= MAX_SEED:
            raise InputError(
                f"master seed must be an unsigned 64-bit value, got {self.master_seed}"
            )
        if self.stream_id < 0 or any(key < 0 for key in self.path):
            raise InputError("stream ids must be non-negative")
        sequence = np.random.SeedSequence([self.master_seed, self.stream_id, *self.path])
        object.__setattr__(self, "generator", np.random.default_rng(sequence))

    def child(self, key: int) -> RngStream:
        """Independent sub-stream, for example one per bootstrap resample."""

        return RngStream(self.master_seed, self.stream_id, (*self.path, key))


def fresh_seed() -> int:
    """Draw a master seed from OS entropy, for runs where the caller gave none."""

    return int(np.random.SeedSequence().generate_state(1, dtype=np.uint64)[0])
