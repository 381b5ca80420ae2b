"""Synthetic stand-in for an hourly national load curve (GW).

Daily, weekly and yearly cycles, lower demand on holidays, and AR(1) noise.
Only for exercising the pipeline; it is not a substitute for measured data.
"""

import numpy as np
import pandas as pd

from reprbench.calendar_features import german_holidays
from reprbench.ingest import TimeSeries
from reprbench.samples import SampleSet
from reprbench.transforms import ReprKind, window_matrix


def synthetic_load(start="2014-12-01", end="2019-12-31 23:00", seed=0, noise=0.6) -> TimeSeries:
    stamps = pd.date_range(start, end, freq="h", tz="UTC")
    local = stamps + pd.Timedelta(hours=1)
    hour = local.hour.to_numpy()
    dow = local.dayofweek.to_numpy()
    doy = local.dayofyear.to_numpy()
    hol = german_holidays()
    off = np.isin(local.normalize().date, list(hol.dates)) | (dow == 6)

    daily = 9.0 * np.sin(np.pi * np.clip(hour - 5, 0, 17) / 17) ** 0.8 - 3.0 * (hour < 5)
    yearly = 6.0 * np.cos(2 * np.pi * (doy - 15) / 365.25)
    weekly = np.where(dow == 5, -6.0, 0.0) + np.where(off, -10.0, 0.0)
    rng = np.random.default_rng(seed)
    eps = rng.normal(0.0, noise, len(stamps))
    ar = np.empty_like(eps)
    ar[0] = eps[0]
    for i in range(1, len(eps)):
        ar[i] = 0.95 * ar[i - 1] + eps[i]
    values = 55.0 + daily * np.where(off, 0.6, 1.0) + yearly + weekly + ar
    return TimeSeries(stamps, values, "synthetic")


def write_opsd_csv(ts: TimeSeries, path, column="DE_load_actual_entsoe_transparency"):
    frame = pd.DataFrame({
        "utc_timestamp": ts.timestamps.strftime("%Y-%m-%dT%H:%M:%SZ"),
        column: np.round(ts.values * 1000.0, 1),
    })
    frame.to_csv(path, index=False)
    return path


def make_set(x, kind, h=1, start=None, n=None, seed=0):
    """SampleSet over series ``x`` with random calendar columns."""
    x = np.asarray(x, dtype=float)
    first = 167 + h if start is None else start
    origins = np.arange(first, len(x) - h if n is None else first + n)
    rng = np.random.default_rng(seed)
    cal = np.hstack([rng.uniform(-1, 1, (len(origins), 6)), rng.integers(0, 2, (len(origins), 2))])
    stamps = pd.date_range("2019-01-01", periods=len(x), freq="h", tz="UTC")
    return SampleSet(ReprKind(kind), h, window_matrix(x, origins, kind, h), cal,
                     x[origins + h].copy(), x[origins].copy(), origins, stamps[origins])
