"""Loaders for the plain-text rule tables shipped under timexanchor/data/."""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources


def _read_lines(name: str) -> list[str]:
    data = (resources.files("timexanchor") / "data" / name).read_text("utf-8")
    lines = []
    for raw in data.splitlines():
        line = raw.strip()
        if line and not line.startswith("#"):
            lines.append(line)
    return lines


@lru_cache(maxsize=None)
def number_words() -> dict[str, tuple[int, bool]]:
    """word -> (value, is_ordinal) for spelled-out numbers one..thirty-first."""
    table: dict[str, tuple[int, bool]] = {}
    for line in _read_lines("number_words.txt"):
        word, value, kind = line.split("\t")
        table[word] = (int(value), kind == "ordinal")
    return table


@dataclass(frozen=True)
class OrdinalFamily:
    trigger: str
    tag: str
    day_offset_base: int


@lru_cache(maxsize=None)
def ordinal_families() -> tuple[OrdinalFamily, ...]:
    """Post-event day conventions, longest trigger phrase first."""
    rows = []
    for line in _read_lines("ordinal_families.txt"):
        trigger, tag, base = line.split("\t")
        rows.append(OrdinalFamily(trigger, tag, int(base)))
    rows.sort(key=lambda r: (-len(r.trigger.split()), r.trigger))
    return tuple(rows)


@lru_cache(maxsize=None)
def ordinal_family_bases() -> dict[str, int]:
    return {row.tag: row.day_offset_base for row in ordinal_families()}


@lru_cache(maxsize=None)
def absolute_patterns() -> tuple[tuple[str, re.Pattern[str]], ...]:
    rows = []
    for line in _read_lines("absolute_patterns.txt"):
        name, pattern = line.split("\t")
        rows.append((name, re.compile(pattern, re.IGNORECASE)))
    return tuple(rows)


@lru_cache(maxsize=None)
def tense_rules() -> dict[str, frozenset[str]]:
    sections: dict[str, set[str]] = {}
    current: set[str] | None = None
    for line in _read_lines("tense_rules.txt"):
        if line.startswith("[") and line.endswith("]"):
            current = sections.setdefault(line[1:-1], set())
        elif current is not None:
            current.add(line)
    return {name: frozenset(words) for name, words in sections.items()}
