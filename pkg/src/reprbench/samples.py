"""Supervised samples: a history representation, target-time calendar features
and the target value."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd

from .calendar_features import CalendarVector
from .errors import ShapeMismatch
from .transforms import ReprInput, ReprKind


@dataclass(frozen=True)
class Sample:
    repr: ReprInput
    calendar: CalendarVector
    target_absolute: float
    x_k: float
    horizon: int
    origin_timestamp: pd.Timestamp

    @property
    def target_timestamp(self) -> pd.Timestamp:
        return self.origin_timestamp + pd.Timedelta(hours=self.horizon)

    @property
    def target_delta(self) -> float:
        return self.target_absolute - self.x_k

    @property
    def kind(self) -> ReprKind:
        return self.repr.kind


@dataclass(frozen=True)
class SampleSet:
    """Column-wise storage for many samples of one representation and horizon.

    Behaves as a sequence of :class:`Sample`; models consume the stacked arrays.
    """

    kind: ReprKind
    horizon: int
    inputs: np.ndarray
    calendar: np.ndarray
    target_absolute: np.ndarray
    x_k: np.ndarray
    origin_index: np.ndarray
    origin_timestamps: pd.DatetimeIndex

    def __post_init__(self):
        n = len(self.target_absolute)
        lengths = {len(self.inputs), len(self.calendar), len(self.x_k),
                   len(self.origin_index), len(self.origin_timestamps)}
        if lengths != {n}:
            raise ShapeMismatch("SampleSet columns have different lengths")

    def __len__(self) -> int:
        return len(self.target_absolute)

    def __getitem__(self, i):
        if isinstance(i, (int, np.integer)):
            return Sample(
                repr=ReprInput(self.inputs[i], self.kind, int(self.origin_index[i]), self.horizon),
                calendar=CalendarVector(*self.calendar[i, :6].tolist(),
                                        int(self.calendar[i, 6]), int(self.calendar[i, 7])),
                target_absolute=float(self.target_absolute[i]),
                x_k=float(self.x_k[i]),
                horizon=self.horizon,
                origin_timestamp=self.origin_timestamps[i],
            )
        return self.take(np.arange(len(self))[i])

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    def take(self, idx) -> "SampleSet":
        idx = np.asarray(idx)
        return SampleSet(
            self.kind, self.horizon, self.inputs[idx], self.calendar[idx],
            self.target_absolute[idx], self.x_k[idx], self.origin_index[idx],
            self.origin_timestamps[idx],
        )

    @property
    def target_delta(self) -> np.ndarray:
        return self.target_absolute - self.x_k

    @property
    def targets(self) -> np.ndarray:
        """What a model of this representation is trained to emit."""
        return self.target_delta if self.kind.differenced else self.target_absolute

    @classmethod
    def from_samples(cls, samples) -> "SampleSet":
        if isinstance(samples, SampleSet):
            return samples
        samples = list(samples)
        if not samples:
            raise ValueError("no samples")
        kinds = {s.kind for s in samples}
        horizons = {s.horizon for s in samples}
        if len(kinds) != 1 or len(horizons) != 1:
            raise ShapeMismatch("samples mix representations or horizons")
        return cls(
            kind=kinds.pop(),
            horizon=horizons.pop(),
            inputs=np.stack([s.repr.data for s in samples]),
            calendar=np.array([tuple(s.calendar) for s in samples], dtype=np.float64),
            target_absolute=np.array([s.target_absolute for s in samples]),
            x_k=np.array([s.x_k for s in samples]),
            origin_index=np.array([s.repr.origin_index for s in samples]),
            origin_timestamps=pd.DatetimeIndex([s.origin_timestamp for s in samples]),
        )

    @classmethod
    def concat(cls, sets) -> "SampleSet":
        sets = [cls.from_samples(s) for s in sets]
        first = sets[0]
        if any(s.kind != first.kind or s.horizon != first.horizon for s in sets):
            raise ShapeMismatch("cannot concatenate sample sets of different kind/horizon")
        return cls(
            first.kind, first.horizon,
            np.concatenate([s.inputs for s in sets]),
            np.concatenate([s.calendar for s in sets]),
            np.concatenate([s.target_absolute for s in sets]),
            np.concatenate([s.x_k for s in sets]),
            np.concatenate([s.origin_index for s in sets]),
            first.origin_timestamps.append([s.origin_timestamps for s in sets[1:]]),
        )
