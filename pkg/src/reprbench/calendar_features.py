"""Calendar feature vector of a target timestamp.

Eight components in fixed order: hour, day-of-week and day-of-year as sine/cosine
pairs, then weekend and holiday flags. Local time is UTC plus a fixed offset.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import NamedTuple

import numpy as np
import pandas as pd

from .errors import UnparsableDate

DEFAULT_TZ_OFFSET_HOURS = 1
HOURS_PER_DAY = 24
DAYS_PER_WEEK = 7
DOY_PERIOD = 366

FEATURE_NAMES = (
    "hour_sin", "hour_cos", "dow_sin", "dow_cos",
    "doy_sin", "doy_cos", "weekend", "holiday",
)


class CalendarVector(NamedTuple):
    hour_sin: float
    hour_cos: float
    dow_sin: float
    dow_cos: float
    doy_sin: float
    doy_cos: float
    weekend: int
    holiday: int

    def to_array(self) -> np.ndarray:
        return np.array(self, dtype=np.float64)


@dataclass(frozen=True)
class HolidayCalendar:
    dates: frozenset = frozenset()

    def __contains__(self, day: dt.date) -> bool:
        return day in self.dates

    def __len__(self) -> int:
        return len(self.dates)


def load_holidays(path) -> HolidayCalendar:
    """Read one ``YYYY-MM-DD`` date per non-empty line."""
    dates = set()
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        text = line.strip()
        if not text:
            continue
        try:
            dates.add(dt.date.fromisoformat(text))
        except ValueError:
            raise UnparsableDate(lineno, text) from None
    return HolidayCalendar(frozenset(dates))


def german_holidays() -> HolidayCalendar:
    """Bundled German nationwide public holidays, 2014-2019."""
    with resources.as_file(resources.files("reprbench") / "data" / "de_holidays.txt") as p:
        return load_holidays(p)


def _cyc(value, period):
    angle = 2.0 * np.pi * value / period
    return np.sin(angle), np.cos(angle)


def encode_calendar(
    t: dt.datetime,
    hol: HolidayCalendar,
    tz_offset_hours: int = DEFAULT_TZ_OFFSET_HOURS,
) -> CalendarVector:
    t = pd.Timestamp(t)
    if t.tzinfo is not None:
        t = t.tz_convert("UTC").tz_localize(None)
    local = t + pd.Timedelta(hours=tz_offset_hours)
    dow = local.dayofweek
    hs, hc = _cyc(local.hour, HOURS_PER_DAY)
    ds, dc = _cyc(dow, DAYS_PER_WEEK)
    ys, yc = _cyc(local.dayofyear, DOY_PERIOD)
    return CalendarVector(
        float(hs), float(hc), float(ds), float(dc), float(ys), float(yc),
        int(dow >= 5), int(local.date() in hol),
    )


def encode_calendar_many(
    stamps: pd.DatetimeIndex,
    hol: HolidayCalendar,
    tz_offset_hours: int = DEFAULT_TZ_OFFSET_HOURS,
) -> np.ndarray:
    """Vectorised :func:`encode_calendar`; returns an ``(n, 8)`` array."""
    stamps = pd.DatetimeIndex(stamps)
    if stamps.tz is not None:
        stamps = stamps.tz_convert("UTC").tz_localize(None)
    local = stamps + pd.Timedelta(hours=tz_offset_hours)
    dow = local.dayofweek.to_numpy()
    out = np.empty((len(local), 8))
    out[:, 0], out[:, 1] = _cyc(local.hour.to_numpy(), HOURS_PER_DAY)
    out[:, 2], out[:, 3] = _cyc(dow, DAYS_PER_WEEK)
    out[:, 4], out[:, 5] = _cyc(local.dayofyear.to_numpy(), DOY_PERIOD)
    out[:, 6] = dow >= 5
    days = local.normalize().date
    out[:, 7] = [d in hol.dates for d in days]
    return out
