"""Loading and validating the hourly demand series.

The CSV layout follows the Open Power System Data "time_series_60min_singleindex"
file: a ``utc_timestamp`` column in ISO 8601 with a ``Z`` suffix, plus one column
per country/source. Raw values are MW; the package works in GW throughout.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import pandas as pd

from .errors import (
    EmptyRange,
    GapTooLarge,
    IrregularSpacing,
    MissingColumn,
    NotMonotonic,
    UnparsableTimestamp,
)

log = logging.getLogger(__name__)

TIMESTAMP_COLUMN = "utc_timestamp"
DEFAULT_COLUMN = "DE_load_actual_entsoe_transparency"
HOUR = pd.Timedelta(hours=1)


def _utc(value) -> pd.Timestamp:
    ts = pd.Timestamp(value)
    return ts.tz_localize("UTC") if ts.tzinfo is None else ts.tz_convert("UTC")


@dataclass(frozen=True)
class TimeSeries:
    """Hourly demand values in GW indexed by UTC timestamps."""

    timestamps: pd.DatetimeIndex
    values: np.ndarray
    name: str = ""

    def __post_init__(self):
        ts = pd.DatetimeIndex(self.timestamps)
        ts = ts.tz_localize("UTC") if ts.tz is None else ts.tz_convert("UTC")
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1 or len(values) != len(ts):
            raise ValueError(
                f"timestamps ({len(ts)}) and values ({values.shape}) must have equal length"
            )
        values.setflags(write=False)
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return len(self.values)

    def index_of(self, t) -> int:
        """Position of timestamp ``t`` (naive values are read as UTC)."""
        loc = self.timestamps.get_indexer([_utc(t)])[0]
        if loc < 0:
            raise KeyError(f"{t} not in series")
        return int(loc)

    def equals(self, other: "TimeSeries") -> bool:
        return (
            self.timestamps.equals(other.timestamps)
            and np.array_equal(self.values, other.values)
        )


@dataclass
class IngestConfig:
    column_name: str = DEFAULT_COLUMN
    start: datetime = field(default_factory=lambda: datetime(2014, 1, 1, tzinfo=timezone.utc))
    end: datetime = field(default_factory=lambda: datetime(2019, 12, 31, 23, tzinfo=timezone.utc))
    max_gap_fill_hours: int = 3
    unit_scale: float = 0.001

    def __post_init__(self):
        if _utc(self.start) >= _utc(self.end):
            raise ValueError("IngestConfig.start must precede end")
        if self.max_gap_fill_hours < 0:
            raise ValueError("max_gap_fill_hours must be >= 0")


def load_demand_csv(path, cfg: IngestConfig | None = None) -> TimeSeries:
    """Read one demand column from an OPSD-style CSV.

    Rows with an empty demand cell are dropped, so the result may contain gaps;
    pass it through :func:`validate_hourly` (or use :func:`load_series`).

    Raises:
        MissingColumn: the timestamp column or ``cfg.column_name`` is absent.
        UnparsableTimestamp: a timestamp cell cannot be parsed; ``row`` is the
            0-based data row (header excluded).
        EmptyRange: no non-empty rows fall inside ``[cfg.start, cfg.end]``.
    """
    cfg = cfg or IngestConfig()
    path = Path(path)
    header = pd.read_csv(path, nrows=0, encoding="utf-8").columns
    for col in (TIMESTAMP_COLUMN, cfg.column_name):
        if col not in header:
            raise MissingColumn(f"column {col!r} not found in {path}")

    frame = pd.read_csv(
        path,
        usecols=[TIMESTAMP_COLUMN, cfg.column_name],
        dtype={TIMESTAMP_COLUMN: str},
        encoding="utf-8",
    )
    raw = frame[TIMESTAMP_COLUMN]
    stamps = pd.to_datetime(raw, utc=True, errors="coerce", format="ISO8601")
    bad = np.flatnonzero(stamps.isna().to_numpy())
    if len(bad):
        row = int(bad[0])
        raise UnparsableTimestamp(row, raw.iloc[row])

    values = pd.to_numeric(frame[cfg.column_name], errors="coerce").to_numpy(np.float64)
    mask = (stamps >= _utc(cfg.start)) & (stamps <= _utc(cfg.end))
    mask = mask.to_numpy() & np.isfinite(values)
    if not mask.any():
        raise EmptyRange(f"no {cfg.column_name!r} values between {cfg.start} and {cfg.end}")

    return TimeSeries(
        timestamps=pd.DatetimeIndex(stamps[mask]),
        values=values[mask] * cfg.unit_scale,
        name=cfg.column_name,
    )


def validate_hourly(ts: TimeSeries, max_gap_fill_hours: int = 3) -> TimeSeries:
    """Return a gap-free hourly series.

    Runs of up to ``max_gap_fill_hours`` missing hours are filled by linear
    interpolation between the flanking observations. Non-finite values count as
    missing.
    """
    keep = np.isfinite(ts.values)
    stamps = ts.timestamps[keep]
    values = ts.values[keep]
    if len(values) == 0:
        raise EmptyRange("series has no finite values")

    steps = np.diff(stamps.asi8) / HOUR.value
    if np.any(steps <= 0):
        i = int(np.flatnonzero(steps <= 0)[0])
        raise NotMonotonic(f"timestamps not strictly increasing at position {i + 1}")
    if np.any(steps != np.round(steps)):
        i = int(np.flatnonzero(steps != np.round(steps))[0])
        raise IrregularSpacing(f"timestamp {stamps[i + 1]} is off the hourly grid")

    missing = steps.astype(np.int64) - 1
    if not missing.any() and keep.all():
        return ts
    worst = np.flatnonzero(missing > max_gap_fill_hours)
    if len(worst):
        i = int(worst[0])
        raise GapTooLarge(stamps[i] + HOUR, int(missing[i]), max_gap_fill_hours)

    full = pd.date_range(stamps[0], stamps[-1], freq="h")
    pos = (stamps.asi8 - stamps.asi8[0]) // HOUR.value
    filled = np.interp(np.arange(len(full)), pos, values)
    log.debug("filled %d missing hour(s) in %s", int(missing.sum()), ts.name)
    return TimeSeries(full, filled, ts.name)


def load_series(path, cfg: IngestConfig | None = None) -> TimeSeries:
    """:func:`load_demand_csv` followed by :func:`validate_hourly`."""
    cfg = cfg or IngestConfig()
    return validate_hourly(load_demand_csv(path, cfg), cfg.max_gap_fill_hours)
