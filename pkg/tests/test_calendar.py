import datetime as dt

import numpy as np
import pandas as pd
import pytest
from dateutil.easter import easter
from hypothesis import given, settings
from hypothesis import strategies as st

from reprbench.calendar_features import (
    HolidayCalendar,
    encode_calendar,
    encode_calendar_many,
    german_holidays,
    load_holidays,
)
from reprbench.errors import UnparsableDate

NONE = HolidayCalendar()


def test_hour_zero():
    c = encode_calendar(pd.Timestamp("2019-03-05T23:00Z"), NONE, 1)
    assert c.hour_sin == 0.0 and c.hour_cos == 1.0


def test_hour_six():
    c = encode_calendar(pd.Timestamp("2019-03-05T05:00Z"), NONE, 1)
    assert c.hour_sin == pytest.approx(1.0, abs=1e-15)
    assert c.hour_cos == pytest.approx(0.0, abs=1e-15)


def test_saturday_is_weekend_not_holiday():
    c = encode_calendar(pd.Timestamp("2019-03-09T12:00Z"), german_holidays(), 1)
    assert (c.weekend, c.holiday) == (1, 0)


def test_new_year_2019_is_holiday():
    c = encode_calendar(pd.Timestamp("2019-01-01T12:00Z"), german_holidays(), 1)
    assert c.holiday == 1
    assert c.weekend == 0


def test_offset_moves_local_date():
    # 23:00 UTC on 31 Dec is already New Year in UTC+1
    assert encode_calendar(pd.Timestamp("2018-12-31T23:00Z"), german_holidays(), 1).holiday == 1
    assert encode_calendar(pd.Timestamp("2018-12-31T23:00Z"), german_holidays(), 0).holiday == 0


def test_monday_is_dow_zero():
    c = encode_calendar(pd.Timestamp("2019-03-04T12:00Z"), NONE, 0)
    assert (c.dow_sin, c.dow_cos) == (0.0, 1.0)


def test_bundled_list_matches_easter_rules():
    """Nationwide German holidays recomputed from the Easter date."""
    expected = set()
    for y in range(2014, 2020):
        e = easter(y)
        expected |= {
            dt.date(y, 1, 1), dt.date(y, 5, 1), dt.date(y, 10, 3), dt.date(y, 12, 25), dt.date(y, 12, 26),
            e - dt.timedelta(days=2), e + dt.timedelta(days=1),
            e + dt.timedelta(days=39), e + dt.timedelta(days=50),
        }
    expected.add(dt.date(2017, 10, 31))  # 500th Reformation anniversary, nationwide once
    assert german_holidays().dates == expected


def test_load_holidays(tmp_path):
    p = tmp_path / "h.txt"
    p.write_text("2019-01-01\n\n2019-10-03\n")
    assert load_holidays(p).dates == {dt.date(2019, 1, 1), dt.date(2019, 10, 3)}


def test_duplicate_dates_collapse(tmp_path):
    p = tmp_path / "h.txt"
    p.write_text("2019-01-01\n2019-01-01\n")
    assert len(load_holidays(p)) == 1


def test_bad_date_reports_line(tmp_path):
    p = tmp_path / "h.txt"
    p.write_text("2019-01-01\n2019-13-01\n")
    with pytest.raises(UnparsableDate) as info:
        load_holidays(p)
    assert info.value.line == 2


stamps = st.datetimes(dt.datetime(2014, 1, 1), dt.datetime(2019, 12, 31, 23)).map(
    lambda d: pd.Timestamp(d.replace(minute=0, second=0, microsecond=0), tz="UTC")
)


@settings(max_examples=200, deadline=None)
@given(stamps, st.integers(-12, 14))
def test_vector_invariants(t, offset):
    c = encode_calendar(t, german_holidays(), offset)
    assert len(c) == 8
    for s, co in [(c.hour_sin, c.hour_cos), (c.dow_sin, c.dow_cos), (c.doy_sin, c.doy_cos)]:
        assert abs(s * s + co * co - 1.0) <= 1e-12
        assert -1 <= s <= 1 and -1 <= co <= 1
    assert c.weekend in (0, 1) and c.holiday in (0, 1)
    assert encode_calendar(t, german_holidays(), offset) == c


@settings(max_examples=100, deadline=None)
@given(stamps)
def test_weekly_periodicity(t):
    a = encode_calendar(t, NONE, 1)
    b = encode_calendar(t + pd.Timedelta(days=7), NONE, 1)
    assert a.dow_sin == pytest.approx(b.dow_sin, abs=1e-9)
    assert a.dow_cos == pytest.approx(b.dow_cos, abs=1e-9)
    assert a.hour_sin == b.hour_sin


def test_vectorised_matches_scalar():
    idx = pd.date_range("2017-12-20", "2018-01-10", freq="7h", tz="UTC")
    hol = german_holidays()
    many = encode_calendar_many(idx, hol, 1)
    single = np.array([encode_calendar(t, hol, 1).to_array() for t in idx])
    np.testing.assert_allclose(many, single, atol=1e-15)
