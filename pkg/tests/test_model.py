"""Calendar arithmetic and ISO 8601 value tests, checked against a
Julian-day-number oracle that is computed independently of the library."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from timexanchor.model import (
    CalendarDate,
    CalendarError,
    IsoParseError,
    TimeOfDay,
    TimeUnit,
    TimexValue,
    ValueKind,
    add_days,
    add_units,
    day_distance,
    days_in_month,
    format_iso8601,
    is_leap_year,
    parse_iso8601,
)


def julian_day_number(year: int, month: int, day: int) -> int:
    # Standard JDN formula; independent of the implementation under test.
    a = (14 - month) // 12
    y = year + 4800 - a
    m = month + 12 * a - 3
    return day + (153 * m + 2) // 5 + 365 * y + y // 4 - y // 100 + y // 400 - 32045


def dates(min_year=1583, max_year=9999):
    return st.builds(
        lambda y, m, frac: CalendarDate(y, m, 1 + int(frac * (days_in_month(y, m) - 1))),
        st.integers(min_year, max_year),
        st.integers(1, 12),
        st.floats(0.0, 1.0, allow_nan=False),
    )


def test_parse_figure_date():
    value = parse_iso8601("2017-04-26")
    assert value == TimexValue.from_date(CalendarDate(2017, 4, 26))


def test_parse_datetime_composition():
    value = parse_iso8601("2017-04-26T06:00")
    assert value.kind is ValueKind.DATETIME
    assert value.date == CalendarDate(2017, 4, 26)
    assert value.time == TimeOfDay(6, 0)


def test_parse_month_out_of_range():
    with pytest.raises(IsoParseError, match="month"):
        parse_iso8601("2013-13-01")


@pytest.mark.parametrize(
    "text",
    ["2017-4-26", "20170426", "2017-04-26T6:00", "not a date", "2017-04-32", "2017-02-30"],
)
def test_parse_rejects_malformed(text):
    with pytest.raises(IsoParseError):
        parse_iso8601(text)


def test_format_round_trip_examples():
    assert format_iso8601(parse_iso8601("2017-04-27")) == "2017-04-27"
    assert format_iso8601(parse_iso8601("2017-04-26T06:00")) == "2017-04-26T06:00"


def test_format_rejects_partial():
    with pytest.raises(ValueError):
        format_iso8601(TimexValue.partial_time(TimeOfDay(6, 0)))
    with pytest.raises(ValueError):
        format_iso8601(TimexValue.unresolved())


def test_add_days_next_day():
    assert add_days(CalendarDate(2017, 4, 26), 1) == CalendarDate(2017, 4, 27)


def test_add_days_leap_day():
    assert add_days(CalendarDate(2012, 2, 28), 1) == CalendarDate(2012, 2, 29)
    assert add_days(CalendarDate(2013, 2, 28), 1) == CalendarDate(2013, 3, 1)


def test_add_days_matches_day_count_oracle():
    # The narrative gives "2007-09-22" for this sum; the calendar disagrees
    # and the arithmetic answer is the one implemented.
    start = CalendarDate(2006, 9, 16)
    result = add_days(start, 6)
    assert result == CalendarDate(2006, 9, 22)
    assert julian_day_number(result.year, result.month, result.day) == (
        julian_day_number(2006, 9, 16) + 6
    )


def test_add_days_range_errors():
    with pytest.raises(CalendarError):
        add_days(CalendarDate(9999, 12, 31), 1)
    with pytest.raises(CalendarError):
        add_days(CalendarDate(1583, 1, 1), -1)


def test_add_units_weeks_oracle():
    result = add_units(CalendarDate(2017, 4, 26), 2, TimeUnit.WEEK)
    assert result == CalendarDate(2017, 5, 10)
    assert julian_day_number(2017, 5, 10) == julian_day_number(2017, 4, 26) + 14


def test_add_units_month_clamps():
    # Oracle: largest valid day-of-month in the target month, never past it.
    assert add_units(CalendarDate(2017, 1, 31), 1, TimeUnit.MONTH) == CalendarDate(2017, 2, 28)
    assert add_units(CalendarDate(2016, 1, 31), 1, TimeUnit.MONTH) == CalendarDate(2016, 2, 29)
    for day in range(28, 32):
        shifted = add_units(CalendarDate(2017, 3, day), -1, TimeUnit.MONTH)
        assert shifted.month == 2
        assert shifted.day == min(day, 28)


def test_add_units_identity():
    d = CalendarDate(2017, 4, 26)
    assert add_units(d, 0, TimeUnit.MONTH) == d
    assert add_units(d, 0, TimeUnit.YEAR) == d


def test_add_units_year_clamps_leap_day():
    assert add_units(CalendarDate(2016, 2, 29), 1, TimeUnit.YEAR) == CalendarDate(2017, 2, 28)


def test_calendar_date_validation():
    with pytest.raises(CalendarError, match="month"):
        CalendarDate(2017, 13, 1)
    with pytest.raises(CalendarError, match="day"):
        CalendarDate(2017, 2, 29)
    with pytest.raises(CalendarError, match="year"):
        CalendarDate(1500, 1, 1)
    CalendarDate(2016, 2, 29)  # leap year: valid


def test_leap_year_rule():
    assert is_leap_year(2000) and is_leap_year(1996) and is_leap_year(2016)
    assert not is_leap_year(1900) and not is_leap_year(2017)


@settings(max_examples=300)
@given(dates(min_year=1700, max_year=9900), st.integers(-5000, 5000))
def test_add_days_round_trip(d, n):
    assert add_days(add_days(d, n), -n) == d


@settings(max_examples=300)
@given(dates(min_year=1700, max_year=9900), st.integers(-2000, 2000), st.integers(-2000, 2000))
def test_add_days_monotone(d, n, m):
    if n < m:
        assert add_days(d, n) < add_days(d, m)


@settings(max_examples=200)
@given(dates(min_year=1700, max_year=9900), st.integers(-500, 500))
def test_week_equals_seven_days(d, n):
    assert add_units(d, n, TimeUnit.WEEK) == add_days(d, 7 * n)


@settings(max_examples=200)
@given(dates())
def test_parse_format_identity(d):
    assert parse_iso8601(format_iso8601(TimexValue.from_date(d))) == TimexValue.from_date(d)


@settings(max_examples=300)
@given(dates(min_year=1700, max_year=9900), st.integers(-5000, 5000))
def test_add_days_agrees_with_jdn_oracle(d, n):
    result = add_days(d, n)
    assert julian_day_number(result.year, result.month, result.day) == (
        julian_day_number(d.year, d.month, d.day) + n
    )


def test_day_distance():
    assert day_distance(CalendarDate(2017, 4, 26), CalendarDate(2017, 4, 28)) == 2
    assert day_distance(CalendarDate(2017, 4, 28), CalendarDate(2017, 4, 26)) == -2


def test_timex_value_shapes():
    with pytest.raises(ValueError):
        TimexValue(ValueKind.DATE)  # missing date
    with pytest.raises(ValueError):
        TimexValue(ValueKind.DATETIME, date=CalendarDate(2017, 1, 1))  # missing time
    v = TimexValue.partial_date(day_of_month=29)
    assert v.day_of_month == 29 and v.month is None


def test_timex_value_json_round_trip():
    values = [
        parse_iso8601("2017-04-26"),
        parse_iso8601("2017-04-26T06:00"),
        TimexValue.partial_time(TimeOfDay(6, 0)),
        TimexValue.partial_date(day_of_month=29, month=3),
        TimexValue.unresolved(raw="P3D"),
        TimexValue.unresolved(),
    ]
    for v in values:
        assert TimexValue.from_json(v.to_json()) == v
