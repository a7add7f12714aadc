"""Subject-level survival data and right-continuous step curves."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .enums import Cause, Status
from .errors import InputError

if TYPE_CHECKING:
    from collections.abc import Iterable, Iterator

    from numpy.typing import ArrayLike, NDArray


@dataclass(frozen=True, slots=True)
class SurvivalRecord:
    """One subject: observed follow-up from entry, status code and arm label."""

    time: float
    status: Status
    group: str

    def __post_init__(self) -> None:
        if not math.isfinite(self.time) or self.time < 0:
            raise InputError(f"record time must be finite and non-negative, got {self.time}")
        try:
            object.__setattr__(self, "status", Status(self.status))
        except ValueError as exc:
            raise InputError(f"record status must be 0, 1 or 2, got {self.status}") from exc


@dataclass(frozen=True, slots=True, eq=False)
class SurvivalDataset:
    """Column-oriented collection of records belonging to one arm."""

    times: NDArray[np.float64]
    statuses: NDArray[np.int8]
    group: str = ""

    def __post_init__(self) -> None:
        times = np.array(self.times, dtype=np.float64)
        statuses = np.array(self.statuses, dtype=np.int8)
        if times.ndim != 1 or times.shape != statuses.shape:
            raise InputError("times and statuses must be one-dimensional and of equal length")
        if not np.all(np.isfinite(times)) or np.any(times < 0):
            raise InputError("times must be finite and non-negative")
        if np.any((statuses < Status.CENSORED) | (statuses > Status.CAUSE_2)):
            raise InputError("statuses must be 0 (censored), 1 or 2")
        times.flags.writeable = False
        statuses.flags.writeable = False
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "statuses", statuses)

    @classmethod
    def from_arrays(
        cls, times: ArrayLike, statuses: ArrayLike, *, group: str = ""
    ) -> SurvivalDataset:
        return cls(times=np.asarray(times), statuses=np.asarray(statuses), group=group)

    @classmethod
    def from_records(
        cls, records: Iterable[SurvivalRecord], *, group: str | None = None
    ) -> SurvivalDataset:
        items = list(records)
        labels = {record.group for record in items}
        if group is None:
            if len(labels) > 1:
                raise InputError(f"records span several groups: {sorted(labels)}")
            group = labels.pop() if labels else ""
        return cls(
            times=np.array([record.time for record in items], dtype=np.float64),
            statuses=np.array([record.status for record in items], dtype=np.int8),
            group=group,
        )

    def __len__(self) -> int:
        return int(self.times.shape[0])

    def records(self) -> Iterator[SurvivalRecord]:
        for time, status in zip(self.times, self.statuses, strict=True):
            yield SurvivalRecord(time=float(time), status=Status(int(status)), group=self.group)

    @property
    def max_time(self) -> float:
        return float(self.times.max()) if len(self) else 0.0

    def event_count(self, cause: Cause | None = None) -> int:
        if cause is None:
            return int(np.count_nonzero(self.statuses != Status.CENSORED))
        return int(np.count_nonzero(self.statuses == cause))

    @property
    def censored_fraction(self) -> float:
        return 1.0 - self.event_count() / len(self) if len(self) else 0.0

    def take(self, indices: NDArray[np.intp]) -> SurvivalDataset:
        return SurvivalDataset(
            times=self.times[indices], statuses=self.statuses[indices], group=self.group
        )

    def truncated(self, tau: float) -> SurvivalDataset:
        """Censor every record observed beyond ``tau`` at ``tau``."""

        beyond = self.times > tau
        return SurvivalDataset(
            times=np.where(beyond, tau, self.times),
            statuses=np.where(beyond, Status.CENSORED, self.statuses),
            group=self.group,
        )

    def relabelled(self, group: str) -> SurvivalDataset:
        return SurvivalDataset(times=self.times, statuses=self.statuses, group=group)


@dataclass(frozen=True, slots=True, eq=False)
class StepCurve:
    """Right-continuous step function: ``baseline`` before the first knot."""

    knots: NDArray[np.float64]
    values: NDArray[np.float64]
    baseline: float

    def __post_init__(self) -> None:
        knots = np.array(self.knots, dtype=np.float64)
        values = np.array(self.values, dtype=np.float64)
        if knots.shape != values.shape or knots.ndim != 1:
            raise InputError("knots and values must be one-dimensional and of equal length")
        if knots.size > 1 and np.any(np.diff(knots) <= 0):
            raise InputError("knots must be strictly ascending")
        knots.flags.writeable = False
        values.flags.writeable = False
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "values", values)

    def __call__(self, t: ArrayLike) -> NDArray[np.float64]:
        index = np.searchsorted(self.knots, np.asarray(t, dtype=np.float64), side="right") - 1
        padded = np.concatenate(([self.baseline], self.values))
        return padded[index + 1]

    def left_limit(self, t: ArrayLike) -> NDArray[np.float64]:
        index = np.searchsorted(self.knots, np.asarray(t, dtype=np.float64), side="left") - 1
        padded = np.concatenate(([self.baseline], self.values))
        return padded[index + 1]

    @property
    def jumps(self) -> NDArray[np.float64]:
        return np.diff(np.concatenate(([self.baseline], self.values)))

    def cumulative_integral(self, points: ArrayLike) -> NDArray[np.float64]:
        """Exact integral of the curve over ``[0, p]`` for every ``p`` in ``points``."""

        upper = np.asarray(points, dtype=np.float64)
        if self.knots.size == 0:
            return self.baseline * upper
        widths = np.diff(self.knots)
        area_at_knots = self.baseline * self.knots[0] + np.concatenate(
            ([0.0], np.cumsum(self.values[:-1] * widths))
        )
        index = np.searchsorted(self.knots, upper, side="right") - 1
        before_first = index < 0
        safe = np.where(before_first, 0, index)
        area = area_at_knots[safe] + self.values[safe] * (upper - self.knots[safe])
        return np.where(before_first, self.baseline * upper, area)

    def integral(self, upper: float) -> float:
        """Exact integral of the curve over ``[0, upper]``."""

        return float(self.cumulative_integral(upper))
