"""Core value types and Gregorian calendar arithmetic.

Everything here is an immutable value with pure operations, so the types are
safe to share freely across threads.
"""

from __future__ import annotations

import datetime as _dt
import re
from dataclasses import dataclass
from enum import Enum

MIN_YEAR = 1583
MAX_YEAR = 9999

_DAYS_IN_MONTH = (31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31)


class CalendarError(ValueError):
    """Invalid date/time component or arithmetic outside the supported years."""


class IsoParseError(ValueError):
    """An ISO 8601 string could not be parsed; the message names the bad part."""


class TimexType(str, Enum):
    DATE = "DATE"
    TIME = "TIME"
    DURATION = "DURATION"
    FREQUENCY = "FREQUENCY"


class SectionKind(str, Enum):
    CLINICAL_HISTORY = "CLINICAL_HISTORY"
    HOSPITAL_COURSE = "HOSPITAL_COURSE"


class AnchorPointLabel(str, Enum):
    ADMISSION = "ADMISSION"
    DISCHARGE = "DISCHARGE"
    PREVIOUS_TIMEX = "PREVIOUS_TIMEX"
    PREVIOUS_ABSOLUTE_TIMEX = "PREVIOUS_ABSOLUTE_TIMEX"


class AnchorRelation(str, Enum):
    BEFORE = "BEFORE"
    AFTER = "AFTER"
    EQUAL_DURING = "EQUAL_DURING"


class TimeUnit(str, Enum):
    DAY = "day"
    WEEK = "week"
    MONTH = "month"
    YEAR = "year"


def is_leap_year(year: int) -> bool:
    return year % 4 == 0 and (year % 100 != 0 or year % 400 == 0)


def days_in_month(year: int, month: int) -> int:
    if month == 2 and is_leap_year(year):
        return 29
    return _DAYS_IN_MONTH[month - 1]


@dataclass(frozen=True, order=True)
class CalendarDate:
    """A valid Gregorian calendar date within years 1583-9999."""

    year: int
    month: int
    day: int

    def __post_init__(self) -> None:
        if not MIN_YEAR <= self.year <= MAX_YEAR:
            raise CalendarError(f"year out of range {MIN_YEAR}..{MAX_YEAR}: {self.year}")
        if not 1 <= self.month <= 12:
            raise CalendarError(f"month out of range 1..12: {self.month}")
        limit = days_in_month(self.year, self.month)
        if not 1 <= self.day <= limit:
            raise CalendarError(
                f"day out of range 1..{limit} for {self.year:04d}-{self.month:02d}: {self.day}"
            )

    def isoformat(self) -> str:
        return f"{self.year:04d}-{self.month:02d}-{self.day:02d}"

    def to_ordinal(self) -> int:
        """Day count since 0001-01-01 (proleptic Gregorian, day 1)."""
        return _dt.date(self.year, self.month, self.day).toordinal()

    @classmethod
    def from_ordinal(cls, ordinal: int) -> "CalendarDate":
        try:
            d = _dt.date.fromordinal(ordinal)
        except (ValueError, OverflowError) as exc:
            raise CalendarError(f"ordinal out of range: {ordinal}") from exc
        return cls(d.year, d.month, d.day)


@dataclass(frozen=True, order=True)
class TimeOfDay:
    """A clock time at minute resolution."""

    hour: int
    minute: int

    def __post_init__(self) -> None:
        if not 0 <= self.hour <= 23:
            raise CalendarError(f"hour out of range 0..23: {self.hour}")
        if not 0 <= self.minute <= 59:
            raise CalendarError(f"minute out of range 0..59: {self.minute}")

    def isoformat(self) -> str:
        return f"{self.hour:02d}:{self.minute:02d}"


def add_days(date: CalendarDate, n: int) -> CalendarDate:
    """Exact Gregorian day arithmetic; inverse of itself under negated n."""
    return CalendarDate.from_ordinal(date.to_ordinal() + n)


def add_units(date: CalendarDate, quantity: int, unit: TimeUnit) -> CalendarDate:
    """Shift a date by whole days, weeks, months, or years.

    Month and year shifts clamp the day-of-month to the target month's length
    (Jan 31 + 1 month = Feb 28/29).
    """
    if unit is TimeUnit.DAY:
        return add_days(date, quantity)
    if unit is TimeUnit.WEEK:
        return add_days(date, 7 * quantity)
    if unit is TimeUnit.MONTH:
        total = date.year * 12 + (date.month - 1) + quantity
        year, month = divmod(total, 12)
        month += 1
    else:
        year, month = date.year + quantity, date.month
    if not MIN_YEAR <= year <= MAX_YEAR:
        raise CalendarError(f"year out of range {MIN_YEAR}..{MAX_YEAR}: {year}")
    return CalendarDate(year, month, min(date.day, days_in_month(year, month)))


def day_distance(a: CalendarDate, b: CalendarDate) -> int:
    """Signed number of days from a to b."""
    return b.to_ordinal() - a.to_ordinal()


class ValueKind(str, Enum):
    DATE = "date"
    DATETIME = "datetime"
    PARTIAL_TIME = "partial_time"
    PARTIAL_DATE = "partial_date"
    UNRESOLVED = "unresolved"


@dataclass(frozen=True)
class TimexValue:
    """Normalized TIMEX value: a full date/datetime, a partial value, or unresolved.

    Unresolved values optionally carry the original raw string (duration and
    frequency strings such as "P3D" ride along untouched) or a diagnostic.
    """

    kind: ValueKind
    date: CalendarDate | None = None
    time: TimeOfDay | None = None
    day_of_month: int | None = None
    month: int | None = None
    raw: str | None = None

    def __post_init__(self) -> None:
        k = self.kind
        if k is ValueKind.DATE:
            ok = self.date is not None and (self.time, self.day_of_month, self.month, self.raw) == (None,) * 4
        elif k is ValueKind.DATETIME:
            ok = (
                self.date is not None
                and self.time is not None
                and (self.day_of_month, self.month, self.raw) == (None,) * 3
            )
        elif k is ValueKind.PARTIAL_TIME:
            ok = self.time is not None and (self.date, self.day_of_month, self.month, self.raw) == (None,) * 4
        elif k is ValueKind.PARTIAL_DATE:
            ok = (
                (self.day_of_month is not None or self.month is not None)
                and (self.date, self.time, self.raw) == (None,) * 3
                and (self.day_of_month is None or 1 <= self.day_of_month <= 31)
                and (self.month is None or 1 <= self.month <= 12)
            )
        else:
            ok = (self.date, self.time, self.day_of_month, self.month) == (None,) * 4
        if not ok:
            raise ValueError(f"inconsistent fields for {k.value} value")

    @classmethod
    def from_date(cls, date: CalendarDate) -> "TimexValue":
        return cls(ValueKind.DATE, date=date)

    @classmethod
    def from_datetime(cls, date: CalendarDate, time: TimeOfDay) -> "TimexValue":
        return cls(ValueKind.DATETIME, date=date, time=time)

    @classmethod
    def partial_time(cls, time: TimeOfDay) -> "TimexValue":
        return cls(ValueKind.PARTIAL_TIME, time=time)

    @classmethod
    def partial_date(cls, day_of_month: int | None = None, month: int | None = None) -> "TimexValue":
        return cls(ValueKind.PARTIAL_DATE, day_of_month=day_of_month, month=month)

    @classmethod
    def unresolved(cls, raw: str | None = None) -> "TimexValue":
        return cls(ValueKind.UNRESOLVED, raw=raw)

    @property
    def is_full(self) -> bool:
        """True for values that serialize to a complete ISO 8601 form."""
        return self.kind in (ValueKind.DATE, ValueKind.DATETIME)

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind.value}
        if self.date is not None:
            out["date"] = self.date.isoformat()
        if self.time is not None:
            out["time"] = self.time.isoformat()
        if self.day_of_month is not None:
            out["day_of_month"] = self.day_of_month
        if self.month is not None:
            out["month"] = self.month
        if self.raw is not None:
            out["raw"] = self.raw
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "TimexValue":
        kind = ValueKind(obj["kind"])
        date = _parse_date_part(obj["date"]) if "date" in obj else None
        time = _parse_time_part(obj["time"]) if "time" in obj else None
        return cls(
            kind,
            date=date,
            time=time,
            day_of_month=obj.get("day_of_month"),
            month=obj.get("month"),
            raw=obj.get("raw"),
        )


_ISO_RE = re.compile(
    r"^(?P<year>\d{4})-(?P<month>\d{2})-(?P<day>\d{2})"
    r"(?:T(?P<hour>\d{2}):(?P<minute>\d{2}))?$"
)


def _parse_date_part(text: str) -> CalendarDate:
    value = parse_iso8601(text)
    if value.kind is not ValueKind.DATE:
        raise IsoParseError(f"expected a plain date, got {text!r}")
    assert value.date is not None
    return value.date


def _parse_time_part(text: str) -> TimeOfDay:
    m = re.fullmatch(r"(\d{2}):(\d{2})", text)
    if not m:
        raise IsoParseError(f"malformed time {text!r}: expected hh:mm")
    try:
        return TimeOfDay(int(m.group(1)), int(m.group(2)))
    except CalendarError as exc:
        raise IsoParseError(f"invalid time {text!r}: {exc}") from exc


def parse_iso8601(text: str) -> TimexValue:
    """Parse YYYY-MM-DD or YYYY-MM-DDThh:mm into a Date or DateTime value."""
    m = _ISO_RE.match(text)
    if not m:
        raise IsoParseError(
            f"malformed ISO 8601 value {text!r}: expected YYYY-MM-DD or YYYY-MM-DDThh:mm"
        )
    try:
        date = CalendarDate(int(m.group("year")), int(m.group("month")), int(m.group("day")))
    except CalendarError as exc:
        raise IsoParseError(f"invalid date {text!r}: {exc}") from exc
    if m.group("hour") is None:
        return TimexValue.from_date(date)
    try:
        time = TimeOfDay(int(m.group("hour")), int(m.group("minute")))
    except CalendarError as exc:
        raise IsoParseError(f"invalid time {text!r}: {exc}") from exc
    return TimexValue.from_datetime(date, time)


def format_iso8601(value: TimexValue) -> str:
    """Canonical zero-padded ISO form; only full Date/DateTime values qualify."""
    if value.kind is ValueKind.DATE:
        assert value.date is not None
        return value.date.isoformat()
    if value.kind is ValueKind.DATETIME:
        assert value.date is not None and value.time is not None
        return f"{value.date.isoformat()}T{value.time.isoformat()}"
    raise ValueError(f"cannot format a {value.kind.value} value as ISO 8601")
