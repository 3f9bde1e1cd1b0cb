"""Sparse feature extraction and chi-square selection for anchor classification.

Feature names are namespaced by feature set (``B:win:weaned``, ``D1:type:DATE``)
so ablations remove exactly one set's features and nothing else. All weights
are binary presence weights.
"""

from __future__ import annotations

import hashlib
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property

from .corpus import Document, TimexMention
from .model import SectionKind, TimexType
from .spans import normalize_numbers
from .tables import tense_rules
from .text import Token, clause_token_ranges, sentence_containing, tokenize

FEATURE_SETS = ("A", "B", "C", "D1", "D2", "D3", "D4", "D5", "E")

FeatureVector = dict[str, float]


@dataclass(frozen=True)
class FeatureConfig:
    """Which feature sets to extract and the selection thresholds."""

    window_tokens: int = 8
    feature_sets: frozenset[str] = frozenset({"B", "D1", "D2"})
    chi2_threshold_anchor_point: float = 7.88
    chi2_threshold_anchor_relation: float = 9.58

    def __post_init__(self) -> None:
        unknown = set(self.feature_sets) - set(FEATURE_SETS)
        if unknown:
            raise ValueError(f"unknown feature sets: {sorted(unknown)}")
        if {"A", "B"} <= set(self.feature_sets):
            raise ValueError("feature sets A and B are mutually exclusive")
        if self.window_tokens < 1:
            raise ValueError("window_tokens must be positive")
        if self.chi2_threshold_anchor_point < 0 or self.chi2_threshold_anchor_relation < 0:
            raise ValueError("chi-square thresholds must be non-negative")

    def stable_hash(self) -> str:
        text = "|".join(
            [
                f"window={self.window_tokens}",
                "sets=" + ",".join(sorted(self.feature_sets)),
                f"ap={self.chi2_threshold_anchor_point!r}",
                f"ar={self.chi2_threshold_anchor_relation!r}",
            ]
        )
        return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


class Tense(str, Enum):
    PAST = "Past"
    PRESENT = "Present"
    FUTURE = "Future"
    UNKNOWN = "Unknown"


def _is_verbish(word: str) -> bool:
    rules = tense_rules()
    w = word.lower()
    return (
        w in rules["past_verbs"]
        or w in rules["present_verbs"]
        or w in rules["base_verbs"]
        or (len(w) > 3 and w.endswith("ed"))
    )


def detect_tense(words: list[str]) -> Tense:
    """Heuristic sentence tense from the documented verb tables."""
    rules = tense_rules()
    lowered = [w.lower() for w in words]
    for i, w in enumerate(lowered):
        if w in rules["future_modals"] and any(t.isalpha() for t in lowered[i + 1 :]):
            return Tense.FUTURE
    if any(w in rules["past_verbs"] or (len(w) > 3 and w.endswith("ed")) for w in lowered):
        return Tense.PAST
    if any(w in rules["present_verbs"] for w in lowered):
        return Tense.PRESENT
    return Tense.UNKNOWN


def _window_tokens(doc: Document, mention: TimexMention, n: int) -> tuple[list[str], list[str]]:
    ends = [t.end for t in doc.tokens]
    starts = [t.start for t in doc.tokens]
    before_stop = bisect_right(ends, mention.start)
    after_start = bisect_left(starts, mention.end)
    before = [t.text for t in doc.tokens[max(0, before_stop - n) : before_stop]]
    after = [t.text for t in doc.tokens[after_start : after_start + n]]
    return before, after


def _lexical_features(out: FeatureVector, set_name: str, region: str, words: list[str],
                      normalize: bool) -> None:
    words = [w.lower() for w in words]
    if normalize:
        words, _ = normalize_numbers(words)
    for w in words:
        out[f"{set_name}:{region}:{w}"] = 1.0
    for a, b in zip(words, words[1:]):
        out[f"{set_name}:{region}2:{a}_{b}"] = 1.0


def _previous_span_features(out: FeatureVector, set_name: str,
                            prev: TimexMention | None) -> None:
    if prev is None:
        out[f"{set_name}:none"] = 1.0
        return
    words = [t.text.lower() for t in tokenize(prev.text)]
    words, _ = normalize_numbers(words)
    for w in words:
        out[f"{set_name}:tok:{w}"] = 1.0


def extract_features(doc: Document, mention: TimexMention, config: FeatureConfig) -> FeatureVector:
    """Feature vector for one RI-TIMEX, the union of the enabled sets."""
    sets = config.feature_sets
    out: FeatureVector = {}

    if "A" in sets or "B" in sets:
        set_name = "B" if "B" in sets else "A"
        normalize = set_name == "B"
        before, after = _window_tokens(doc, mention, config.window_tokens)
        _lexical_features(out, set_name, "win", before, normalize)
        _lexical_features(out, set_name, "win", after, normalize)
        _lexical_features(out, set_name, "span", [t.text for t in tokenize(mention.text)], normalize)

    if "C" in sets:
        for event in _events_in_clause(doc, mention):
            out[f"C:etype:{event.etype.value}"] = 1.0
            words = [t.text.lower() for t in tokenize(event.text)]
            words, _ = normalize_numbers(words)
            for w in words:
                out[f"C:tok:{w}"] = 1.0

    prev_any = doc.previous_timex(mention)
    if "D1" in sets:
        out["D1:none" if prev_any is None else f"D1:type:{prev_any.ttype.value}"] = 1.0
    if "D2" in sets:
        _previous_span_features(out, "D2", prev_any)
    if "D3" in sets:
        prev_dt = doc.previous_timex(mention, types=frozenset({TimexType.DATE, TimexType.TIME}))
        _previous_span_features(out, "D3", prev_dt)
    if "D4" in sets:
        prev_abs = doc.previous_timex(
            mention, types=frozenset({TimexType.DATE, TimexType.TIME}), absolute_only=True
        )
        _previous_span_features(out, "D4", prev_abs)
    if "D5" in sets:
        out[f"D5:flag:{_sectime_flag(doc, prev_any)}"] = 1.0

    if "E" in sets:
        start, end = sentence_containing(doc.text, mention.start)
        words = [t.text for t in doc.tokens if start <= t.start and t.end <= end]
        out[f"E:tense:{detect_tense(words).value}"] = 1.0

    return out


def _sectime_flag(doc: Document, prev: TimexMention | None) -> str:
    if prev is not None:
        for s in doc.sections:
            if (s.sectime.start, s.sectime.end) == (prev.start, prev.end):
                if s.kind is SectionKind.CLINICAL_HISTORY:
                    return "prev-is-admission-sectime"
                return "prev-is-discharge-sectime"
    return "neither"


def _events_in_clause(doc: Document, mention: TimexMention):
    start, end = sentence_containing(doc.text, mention.start)
    sentence_tokens = [t for t in doc.tokens if start <= t.start and t.end <= end]
    if not sentence_tokens:
        return []
    clause_start, clause_end = start, end
    for lo, hi in clause_token_ranges(sentence_tokens, _is_verbish):
        span_lo, span_hi = sentence_tokens[lo].start, sentence_tokens[hi - 1].end
        if span_lo <= mention.start < span_hi or (span_lo <= mention.start and mention.end <= span_hi):
            clause_start, clause_end = span_lo, span_hi
            break
    return [e for e in doc.events if e.start < clause_end and e.end > clause_start]


@dataclass(frozen=True)
class ContingencyTable:
    """Observed 2x2 counts of feature presence against a binary label."""

    a: int  # present, positive
    b: int  # present, negative
    c: int  # absent, positive
    d: int  # absent, negative

    def __post_init__(self) -> None:
        if min(self.a, self.b, self.c, self.d) < 0:
            raise ValueError("contingency counts must be non-negative")
        if self.a + self.b + self.c + self.d == 0:
            raise ValueError("contingency table is empty")


def chi_square(table: ContingencyTable) -> float:
    """Pearson chi-square for a 2x2 table; zero when a marginal is empty."""
    a, b, c, d = table.a, table.b, table.c, table.d
    n = a + b + c + d
    denom = (a + b) * (c + d) * (a + c) * (b + d)
    if denom == 0:
        return 0.0
    diff = a * d - b * c
    return n * diff * diff / denom


def select_features(vectors: list[FeatureVector], labels: list[bool], threshold: float) -> set[str]:
    """Feature names whose chi-square against the labels reaches the threshold."""
    if not vectors or len(vectors) != len(labels):
        raise ValueError("need one label per feature vector and at least one instance")
    n = len(vectors)
    n_pos = sum(1 for y in labels if y)
    present_pos: dict[str, int] = {}
    present_neg: dict[str, int] = {}
    for fv, y in zip(vectors, labels):
        bucket = present_pos if y else present_neg
        for name in fv:
            bucket[name] = bucket.get(name, 0) + 1
    selected = set()
    for name in set(present_pos) | set(present_neg):
        a = present_pos.get(name, 0)
        b = present_neg.get(name, 0)
        table = ContingencyTable(a=a, b=b, c=n_pos - a, d=(n - n_pos) - b)
        if chi_square(table) >= threshold:
            selected.add(name)
    return selected


@dataclass(frozen=True)
class VocabularyIndex:
    """Frozen bijection between feature names and dense column indices."""

    names: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate feature names in vocabulary")

    @classmethod
    def from_names(cls, names) -> "VocabularyIndex":
        return cls(tuple(sorted(names)))

    @cached_property
    def index(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.names)}

    def __len__(self) -> int:
        return len(self.names)

    def encode(self, fv: FeatureVector) -> list[tuple[int, float]]:
        """Sparse (column, weight) pairs; unseen feature names are ignored."""
        idx = self.index
        pairs = [(idx[name], weight) for name, weight in fv.items() if name in idx]
        pairs.sort()
        return pairs


def format_sparse_instance(label: str, fv: FeatureVector) -> str:
    """One instance per line: label then name:weight pairs sorted by name."""
    parts = [label]
    parts.extend(f"{name}:{fv[name]:g}" for name in sorted(fv))
    return " ".join(parts)


def parse_sparse_instance(line: str) -> tuple[str, FeatureVector]:
    parts = line.split(" ")
    fv: FeatureVector = {}
    for chunk in parts[1:]:
        name, _, weight = chunk.rpartition(":")
        fv[name] = float(weight)
    return parts[0], fv
