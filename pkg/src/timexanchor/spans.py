"""Rule-based interpretation of TIMEX surface spans.

Three jobs live here: detecting fully-specified (absolute) date surfaces,
normalizing digit and spelled-out numbers to a unified NUM token, and parsing
relative/incomplete spans into a structured offset / ordinal / partial
description. The rule tables are plain-text data files under data/.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from .model import AnchorRelation, CalendarDate, TimeOfDay, TimeUnit, TimexValue, parse_iso8601
from .tables import absolute_patterns, number_words, ordinal_families
from .text import tokenize

NUM_TOKEN = "NUM"


class SpanFamily(str, Enum):
    OFFSET = "OFFSET"
    POST_EVENT_ORDINAL = "POST_EVENT_ORDINAL"
    PARTIAL_TIME = "PARTIAL_TIME"
    PARTIAL_DATE = "PARTIAL_DATE"
    DEICTIC_DAY = "DEICTIC_DAY"
    UNPARSEABLE = "UNPARSEABLE"


@dataclass(frozen=True)
class ParsedSpan:
    """Structured reading of one RI-TIMEX surface span."""

    family: SpanFamily
    quantity: int | None = None
    unit: TimeUnit | None = None
    direction_hint: AnchorRelation | None = None
    time_of_day: TimeOfDay | None = None
    day_of_month: int | None = None
    month: int | None = None
    ordinal_family: str | None = None

    def __post_init__(self) -> None:
        if self.direction_hint is AnchorRelation.EQUAL_DURING:
            raise ValueError("direction hint must be BEFORE, AFTER, or None")
        f = self.family
        if f is SpanFamily.OFFSET and (self.quantity is None or self.unit is None):
            raise ValueError("offset spans need a quantity and a unit")
        if f is SpanFamily.POST_EVENT_ORDINAL:
            if self.quantity is None or self.quantity < 1 or self.unit is not TimeUnit.DAY:
                raise ValueError("post-event ordinals count days, starting at 1")
            if self.ordinal_family is None:
                raise ValueError("post-event ordinals carry an ordinal family tag")
        if f is SpanFamily.PARTIAL_TIME and self.time_of_day is None:
            raise ValueError("partial time spans need a time of day")

    def describe(self) -> str:
        if self.family is SpanFamily.OFFSET:
            hint = self.direction_hint.value if self.direction_hint else "None"
            return f"Offset{{quantity={self.quantity}, unit={self.unit.value}, hint={hint}}}"
        if self.family is SpanFamily.POST_EVENT_ORDINAL:
            return f"PostEventOrdinal{{quantity={self.quantity}, family={self.ordinal_family}}}"
        if self.family is SpanFamily.PARTIAL_TIME:
            return f"PartialTime{{{self.time_of_day.isoformat()}}}"
        if self.family is SpanFamily.PARTIAL_DATE:
            return f"PartialDate{{day={self.day_of_month}, month={self.month}}}"
        if self.family is SpanFamily.DEICTIC_DAY:
            return "DeicticDay{}"
        return "Unparseable{}"


_DIGITS_RE = re.compile(r"\d+")
_PLAIN_NUMBER_RE = re.compile(r"(#?)(\d+)(st|nd|rd|th)?", re.IGNORECASE)
_DECIMAL_RE = re.compile(r"\d+\.\d+")


def number_token_value(token: str) -> tuple[int | float, bool] | None:
    """(value, is_ordinal) when the token is a recognized number form."""
    m = _PLAIN_NUMBER_RE.fullmatch(token)
    if m:
        return int(m.group(2)), bool(m.group(3))
    if _DECIMAL_RE.fullmatch(token):
        return float(token), False
    return number_words().get(token.lower())


def normalize_numbers(tokens: list[str]) -> tuple[list[str], list[int | float | None]]:
    """Replace every recognized number token with NUM.

    Digit forms ("2", "2nd", "#2", "23.1"), spelled-out forms ("two",
    "second"), a "#" fused with the number it precedes, and any other
    digit-bearing token (dates such as "2017-04-26") all become NUM. The
    second list records the numeric value at each replacement, None when no
    single number applies. Unrecognized tokens pass through unchanged.
    """
    out: list[str] = []
    values: list[int | float | None] = []
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if tok == "#" and i + 1 < len(tokens):
            nxt = number_token_value(tokens[i + 1])
            if nxt is not None:
                out.append(NUM_TOKEN)
                values.append(nxt[0])
                i += 2
                continue
        parsed = number_token_value(tok)
        if parsed is not None:
            out.append(NUM_TOKEN)
            values.append(parsed[0])
        elif tok != NUM_TOKEN and _DIGITS_RE.search(tok):
            out.append(NUM_TOKEN)
            values.append(None)
        else:
            out.append(tok)
        i += 1
    return out, values


def is_absolute(text: str) -> bool:
    """True iff the span matches a documented fully-specified date pattern."""
    normalized = " ".join(text.split())
    return any(rx.fullmatch(normalized) for _, rx in absolute_patterns())


_MONTH_NAMES = {
    name: i + 1
    for i, name in enumerate(
        [
            "january", "february", "march", "april", "may", "june",
            "july", "august", "september", "october", "november", "december",
        ]
    )
}
_MONTH_NAMES.update(
    {
        "jan": 1, "feb": 2, "mar": 3, "apr": 4, "jun": 6, "jul": 7,
        "aug": 8, "sep": 9, "sept": 9, "oct": 10, "nov": 11, "dec": 12,
    }
)

DEFAULT_YEAR_PIVOT = 30  # two-digit years below the pivot fall in the 2000s


def _expand_year(two_digits: int, pivot: int) -> int:
    return 2000 + two_digits if two_digits < pivot else 1900 + two_digits


def parse_absolute(text: str, year_pivot: int = DEFAULT_YEAR_PIVOT) -> TimexValue:
    """Normalize an absolute surface form to its Date/DateTime value.

    Raises ValueError when the span is not a recognized absolute pattern, or
    CalendarError when the matched components are not a real date.
    """
    normalized = " ".join(text.split())
    for name, rx in absolute_patterns():
        if not rx.fullmatch(normalized):
            continue
        if name in ("yyyy-mm-dd", "yyyy-mm-ddThh:mm"):
            return parse_iso8601(normalized)
        if name in ("mm/dd/yy", "mm/dd/yyyy", "mm-dd-yy", "mm-dd-yyyy"):
            sep = "/" if "/" in name else "-"
            mm, dd, yy = (int(part) for part in normalized.split(sep))
            year = _expand_year(yy, year_pivot) if yy < 100 else yy
            return TimexValue.from_date(CalendarDate(year, mm, dd))
        if name == "month-dd-yyyy":
            parts = normalized.replace(",", " ").split()
            month = _MONTH_NAMES[parts[0].rstrip(".").lower()]
            day = int(re.sub(r"(st|nd|rd|th)$", "", parts[1], flags=re.IGNORECASE))
            return TimexValue.from_date(CalendarDate(int(parts[2]), month, day))
    raise ValueError(f"not a recognized absolute date form: {text!r}")


_DEICTIC_DAY = {"today", "that day", "that same day", "the same day"}

_UNIT_WORDS = {
    "day": TimeUnit.DAY, "days": TimeUnit.DAY,
    "week": TimeUnit.WEEK, "weeks": TimeUnit.WEEK,
    "month": TimeUnit.MONTH, "months": TimeUnit.MONTH,
    "year": TimeUnit.YEAR, "years": TimeUnit.YEAR,
}

# Lexical direction cues. "next"/"later"/"after"/"ago"/"prior"/"before"/
# "previous" are the core inventory; the rest are documented extensions.
_AFTER_CUES = {
    "next", "later", "after", "following", "from", "in", "subsequent",
    "afterward", "afterwards", "hence", "tomorrow",
}
_BEFORE_CUES = {
    "before", "prior", "earlier", "ago", "previous", "previously",
    "preceding", "last", "yesterday",
}

_TIME_RE = re.compile(r"(\d{1,2})(?::(\d{2}))? ?(am|pm|a\.m\.?|p\.m\.?)")
_TIME_24H_RE = re.compile(r"([01]\d|2[0-3]):([0-5]\d)")


def _direction_hint(tokens: list[str]) -> AnchorRelation | None:
    for tok in tokens:
        if tok in _AFTER_CUES:
            return AnchorRelation.AFTER
        if tok in _BEFORE_CUES:
            return AnchorRelation.BEFORE
    return None


def _match_partial_time(normalized: str) -> TimeOfDay | None:
    if normalized in ("noon", "midday"):
        return TimeOfDay(12, 0)
    if normalized == "midnight":
        return TimeOfDay(0, 0)
    m = _TIME_RE.fullmatch(normalized)
    if m:
        hour, minute = int(m.group(1)), int(m.group(2) or 0)
        if not 1 <= hour <= 12 or minute > 59:
            return None
        if m.group(3).startswith("a"):
            hour = 0 if hour == 12 else hour
        else:
            hour = hour if hour == 12 else hour + 12
        return TimeOfDay(hour, minute)
    m = _TIME_24H_RE.fullmatch(normalized)
    if m:
        return TimeOfDay(int(m.group(1)), int(m.group(2)))
    return None


def _match_ordinal(tokens: list[str]) -> ParsedSpan | None:
    for family in ordinal_families():
        trigger = family.trigger.split()
        for i in range(len(tokens) - len(trigger) + 1):
            if tokens[i : i + len(trigger)] != trigger:
                continue
            rest = tokens[i + len(trigger) :]
            while rest and rest[0] in ("number", "no", "no."):
                rest = rest[1:]
            _, values = normalize_numbers(rest)
            quantity = next((v for v in values if isinstance(v, int) and v >= 1), None)
            if quantity is None:
                continue
            return ParsedSpan(
                SpanFamily.POST_EVENT_ORDINAL,
                quantity=quantity,
                unit=TimeUnit.DAY,
                direction_hint=_direction_hint(tokens),
                ordinal_family=family.tag,
            )
    return None


def _match_offset(tokens: list[str]) -> ParsedSpan | None:
    unit_index = next((i for i, t in enumerate(tokens) if t in _UNIT_WORDS), None)
    if unit_index is None:
        return None
    quantity: int | None = None
    for j in range(unit_index - 1, -1, -1):
        if tokens[j] in ("a", "an"):
            quantity = 1
            break
        parsed = number_token_value(tokens[j])
        if parsed is not None and isinstance(parsed[0], int):
            quantity = parsed[0]
            break
    hint = _direction_hint(tokens)
    if quantity is None:
        if hint is None:
            return None
        quantity = 1
    return ParsedSpan(SpanFamily.OFFSET, quantity=quantity, unit=_UNIT_WORDS[tokens[unit_index]], direction_hint=hint)


def _match_partial_date(tokens: list[str]) -> ParsedSpan | None:
    if tokens and tokens[0] in _MONTH_NAMES and len(tokens) <= 2:
        month = _MONTH_NAMES[tokens[0]]
        if len(tokens) == 1:
            return ParsedSpan(SpanFamily.PARTIAL_DATE, month=month)
        parsed = number_token_value(tokens[1])
        if parsed is not None and isinstance(parsed[0], int) and 1 <= parsed[0] <= 31:
            return ParsedSpan(SpanFamily.PARTIAL_DATE, day_of_month=parsed[0], month=month)
        return None
    if len(tokens) >= 2 and tokens[0] == "the":
        parsed = number_token_value(tokens[1])
        if parsed is None or not parsed[1] or not 1 <= parsed[0] <= 31:
            return None
        month = None
        if len(tokens) == 4 and tokens[2] == "of" and tokens[3] in _MONTH_NAMES:
            month = _MONTH_NAMES[tokens[3]]
        elif len(tokens) != 2:
            return None
        return ParsedSpan(SpanFamily.PARTIAL_DATE, day_of_month=int(parsed[0]), month=month)
    return None


def parse_span(text: str) -> ParsedSpan:
    """Parse an RI-TIMEX span into a structured description.

    Deterministic and total: spans no rule recognizes come back with family
    UNPARSEABLE so the caller can fall back rather than fail. Rules fire in a
    fixed order: deictic day words, partial clock times, post-event ordinals,
    unit offsets, then partial dates.
    """
    tokens = [t.text.lower() for t in tokenize(text)]
    joined = " ".join(tokens)
    normalized = " ".join(text.lower().split())

    if joined in _DEICTIC_DAY:
        return ParsedSpan(SpanFamily.DEICTIC_DAY)
    if joined == "yesterday":
        return ParsedSpan(
            SpanFamily.OFFSET, quantity=1, unit=TimeUnit.DAY, direction_hint=AnchorRelation.BEFORE
        )
    if joined == "tomorrow":
        return ParsedSpan(
            SpanFamily.OFFSET, quantity=1, unit=TimeUnit.DAY, direction_hint=AnchorRelation.AFTER
        )

    time_of_day = _match_partial_time(normalized)
    if time_of_day is not None:
        return ParsedSpan(SpanFamily.PARTIAL_TIME, time_of_day=time_of_day)

    for matcher in (_match_ordinal, _match_offset, _match_partial_date):
        span = matcher(tokens)
        if span is not None:
            return span
    return ParsedSpan(SpanFamily.UNPARSEABLE)
