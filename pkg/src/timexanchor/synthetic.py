"""Deterministic synthetic discharge summaries with gold anchor annotations.

Each document is a sequence of "blocks". A block plants one absolute-date
filler sentence followed by one (or, for chained blocks, two) relative
date/time expressions whose anchor is fully controlled:

  ADM_PLAIN    filler X not in {A, D}; target anchored to the admission date
  ADM_CO       filler restates the admission date; target co-anchors to
               {admission, previous timex, previous absolute timex}
  DISC_PLAIN / DISC_CO   the discharge-date analogues
  PREV_BOTH    target anchored to the filler, which is absolute, so the
               previous-timex and previous-absolute labels coincide
  CHAIN_ABS    filler X, a bridge expression anchored to X, then a target
               anchored to X as its previous *absolute* timex only
  CHAIN_ONLY   as above but the target anchors to the bridge itself, the
               previous (non-absolute) timex only

The block-type mix is solved in closed form so that the per-instance gold
label marginals converge to the configured anchor-point probabilities; gold
relations are assigned by per-document quotas. Every surface span is
parseable by the span rules, and every gold value is computed here from the
anchor value and the template semantics, independently of the pipeline, so
an oracle-mode run over a generated corpus is a genuine end-to-end check.

The window cue vocabulary ("admission", "discharge", "thereafter",
"postoperatively", "interim", ...) is chosen one-per-block-type so linear
classifiers can learn the anchor point from nearby tokens, mirroring how
clinical narratives signal their reference times.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum

from .corpus import Document, EventMention, EventType, GoldAnchor, Section, TimexMention
from .model import (
    AnchorPointLabel,
    AnchorRelation,
    CalendarDate,
    SectionKind,
    TimeOfDay,
    TimeUnit,
    TimexType,
    TimexValue,
    add_days,
    add_units,
    days_in_month,
)
from .tables import number_words


class SyntheticError(ValueError):
    """Raised for invalid or infeasible generator configurations."""


_DEFAULT_ANCHOR_PROBS = {
    AnchorPointLabel.ADMISSION: 0.53,
    AnchorPointLabel.DISCHARGE: 0.16,
    AnchorPointLabel.PREVIOUS_TIMEX: 0.37,
    AnchorPointLabel.PREVIOUS_ABSOLUTE_TIMEX: 0.35,
}

# Raw relation frequencies 11/46/41 leave 2% unclassified in the source
# statistics; the default distribution renormalizes them to sum to one.
_RAW_RELATION_FREQS = {
    AnchorRelation.BEFORE: 0.11,
    AnchorRelation.AFTER: 0.46,
    AnchorRelation.EQUAL_DURING: 0.41,
}


def default_relation_probs() -> dict[AnchorRelation, float]:
    total = sum(_RAW_RELATION_FREQS.values())
    return {rel: p / total for rel, p in _RAW_RELATION_FREQS.items()}


@dataclass(frozen=True)
class SyntheticConfig:
    """Knobs for the synthetic corpus generator."""

    document_count: int = 200
    ri_per_document: tuple[int, int] = (8, 12)
    anchor_probs: dict[AnchorPointLabel, float] = field(
        default_factory=lambda: dict(_DEFAULT_ANCHOR_PROBS)
    )
    relation_probs: dict[AnchorRelation, float] = field(default_factory=default_relation_probs)
    seed: int = 42

    def __post_init__(self) -> None:
        if self.document_count < 1:
            raise SyntheticError("document_count must be at least 1")
        lo, hi = self.ri_per_document
        if not 1 <= lo <= hi:
            raise SyntheticError("ri_per_document must satisfy 1 <= min <= max")
        if set(self.anchor_probs) != set(AnchorPointLabel):
            raise SyntheticError("anchor_probs must cover all four anchor point labels")
        for label, p in self.anchor_probs.items():
            if not 0.0 <= p <= 1.0:
                raise SyntheticError(f"anchor probability for {label.value} outside [0, 1]: {p}")
        if set(self.relation_probs) != set(AnchorRelation):
            raise SyntheticError("relation_probs must cover all three relations")
        for rel, p in self.relation_probs.items():
            if p < 0.0:
                raise SyntheticError(f"negative relation probability for {rel.value}: {p}")
        if abs(sum(self.relation_probs.values()) - 1.0) > 1e-9:
            raise SyntheticError("relation probabilities must sum to 1")


class _Block(str, Enum):
    ADM_PLAIN = "ADM_PLAIN"
    ADM_CO = "ADM_CO"
    DISC_PLAIN = "DISC_PLAIN"
    DISC_CO = "DISC_CO"
    PREV_BOTH = "PREV_BOTH"
    CHAIN_ABS = "CHAIN_ABS"
    CHAIN_ONLY = "CHAIN_ONLY"


_CHAIN_BLOCKS = (_Block.CHAIN_ABS, _Block.CHAIN_ONLY)


def solve_block_mix(anchor_probs: dict[AnchorPointLabel, float]) -> dict[_Block, float]:
    """Block-type probabilities whose per-instance gold marginals match the config.

    Chained blocks emit two instances (the bridge counts as a co-anchored
    previous-timex/previous-absolute instance), which the linear system below
    accounts for. Raises SyntheticError when no non-negative mix exists.
    """
    a = anchor_probs[AnchorPointLabel.ADMISSION]
    d = anchor_probs[AnchorPointLabel.DISCHARGE]
    p = anchor_probs[AnchorPointLabel.PREVIOUS_TIMEX]
    q = anchor_probs[AnchorPointLabel.PREVIOUS_ABSOLUTE_TIMEX]

    denom = 2 * a + 2 * d + p + q - 1
    if denom <= 1e-9:
        raise SyntheticError(
            "infeasible anchor marginals: 2*admission + 2*discharge + "
            "previous + previous_absolute must exceed 1"
        )

    # c is the probability mass of the sectime co-anchor blocks (ADM_CO +
    # DISC_CO); the remaining block masses are determined by c.
    def bound_or_none(numer: float, denom_local: float) -> float | None:
        if numer <= 0:
            return None
        if denom_local <= 0:
            return float("inf")
        return numer / denom_local

    c_lo = 0.0
    for numer, denom_local in ((a + d + p - 1, 1 + q - p), (a + d + q - 1, 1 + p - q)):
        bound = bound_or_none(numer, denom_local)
        if bound is not None:
            c_lo = max(c_lo, bound)
    m2 = 3 * a + 3 * d + p + q
    c_hi = (3 * denom - m2) / (2 * (a + d + 1))
    if p + q > 1:
        c_hi = min(c_hi, (a + d) / (p + q - 1))
    c_hi = min(c_hi, a + d)
    if c_lo > c_hi + 1e-12:
        raise SyntheticError("infeasible anchor marginals: no valid block mix exists")
    c = (c_lo + min(c_hi, c_lo + 0.25)) / 2  # keep co-anchor mass modest

    z = (1 + 2 * c) / denom
    chain_abs = z * (q + a + d) - 1 - c
    chain_only = z * (p + a + d) - 1 - c
    prev_both = 1 - (a + d) * z - chain_abs - chain_only
    alpha = c * a / (a + d) if a + d > 0 else 0.0
    beta = c - alpha
    mix = {
        _Block.ADM_PLAIN: a * z - alpha,
        _Block.ADM_CO: alpha,
        _Block.DISC_PLAIN: d * z - beta,
        _Block.DISC_CO: beta,
        _Block.PREV_BOTH: prev_both,
        _Block.CHAIN_ABS: chain_abs,
        _Block.CHAIN_ONLY: chain_only,
    }
    for block, mass in mix.items():
        if mass < -1e-9:
            raise SyntheticError("infeasible anchor marginals: no valid block mix exists")
        mix[block] = max(0.0, mass)
    total = sum(mix.values())
    return {block: mass / total for block, mass in mix.items()}


def expected_instances_per_block(mix: dict[_Block, float]) -> float:
    return 1.0 + sum(mix[b] for b in _CHAIN_BLOCKS)


def _quota_counts(targets: list[tuple[object, float]], total: int, rng: random.Random) -> dict:
    """Integer counts summing to total; floors plus weighted remainder draws."""
    counts = {key: int(share) for key, share in targets}
    fracs = {key: share - int(share) for key, share in targets}
    remaining = total - sum(counts.values())
    pool = [key for key, _ in targets]
    for _ in range(max(0, remaining)):
        weights = [max(fracs[k], 1e-12) for k in pool]
        pick = rng.choices(pool, weights=weights, k=1)[0]
        counts[pick] += 1
        fracs[pick] = 0.0
    while sum(counts.values()) > total:
        for key in reversed(pool):
            if counts[key] > 0 and sum(counts.values()) > total:
                counts[key] -= 1
    return counts


_MONTH_RENDER = (
    "January", "February", "March", "April", "May", "June",
    "July", "August", "September", "October", "November", "December",
)

_CARDINAL_WORDS: dict[int, str] = {}
_ORDINAL_WORDS: dict[int, str] = {}


def _word_tables() -> tuple[dict[int, str], dict[int, str]]:
    if not _CARDINAL_WORDS:
        for word, (value, is_ordinal) in number_words().items():
            target = _ORDINAL_WORDS if is_ordinal else _CARDINAL_WORDS
            target.setdefault(value, word)
    return _CARDINAL_WORDS, _ORDINAL_WORDS


def _render_date(date: CalendarDate, rng: random.Random) -> str:
    style = rng.random()
    if style < 0.5:
        return date.isoformat()
    if style < 0.8:
        return f"{date.month:02d}/{date.day:02d}/{date.year:04d}"
    return f"{_MONTH_RENDER[date.month - 1]} {date.day}, {date.year}"


def _ordinal_suffix(n: int) -> str:
    if 10 <= n % 100 <= 20:
        return "th"
    return {1: "st", 2: "nd", 3: "rd"}.get(n % 10, "th")


@dataclass
class _TimexSeg:
    text: str
    ttype: TimexType
    value: TimexValue
    gold: GoldAnchor | None = None


@dataclass
class _EventSeg:
    text: str
    etype: EventType


class _Builder:
    def __init__(self, doc_id: str) -> None:
        self.doc_id = doc_id
        self.parts: list[str] = []
        self.pos = 0
        self.timexes: list[TimexMention] = []
        self.events: list[EventMention] = []
        self.gold: dict[str, GoldAnchor] = {}
        self.sections: list[tuple[SectionKind, int, TimexMention]] = []
        self.last_datetime_value: TimexValue | None = None
        self.last_absolute_value: TimexValue | None = None
        self._counter = 0

    def _append(self, piece: str) -> tuple[int, int]:
        start = self.pos
        self.parts.append(piece)
        self.pos += len(piece)
        return start, self.pos

    def sentence(self, segments: list) -> None:
        for i, seg in enumerate(segments):
            if i:
                self._append(" ")
            text = seg if isinstance(seg, str) else seg.text
            start, end = self._append(text)
            if isinstance(seg, _TimexSeg):
                self._register_timex(seg, start, end)
            elif isinstance(seg, _EventSeg):
                self.events.append(
                    EventMention(id=f"E{len(self.events)}", start=start, end=end, text=seg.text, etype=seg.etype)
                )
        self._append("\n")

    def _register_timex(self, seg: _TimexSeg, start: int, end: int) -> None:
        mid = f"T{self._counter}"
        self._counter += 1
        absolute = seg.ttype in (TimexType.DATE, TimexType.TIME) and seg.value.is_full and seg.gold is None
        # Section kinds are patched in when sections close, so use a placeholder.
        mention = TimexMention(
            id=mid,
            start=start,
            end=end,
            text=seg.text,
            ttype=seg.ttype,
            value=seg.value,
            is_absolute=absolute,
            section=SectionKind.CLINICAL_HISTORY,
        )
        self.timexes.append(mention)
        if seg.gold is not None:
            self.gold[mid] = seg.gold
        if seg.ttype in (TimexType.DATE, TimexType.TIME):
            self.last_datetime_value = seg.gold.value if seg.gold else seg.value
            if absolute:
                self.last_absolute_value = seg.value

    def open_section(self, kind: SectionKind, sectime_date: CalendarDate) -> None:
        if kind is SectionKind.CLINICAL_HISTORY:
            label = "Admission Date :"
        else:
            label = "HOSPITAL COURSE - Discharge Date :"
        section_start = self.pos
        value = TimexValue.from_date(sectime_date)
        seg = _TimexSeg(sectime_date.isoformat(), TimexType.DATE, value)
        # Remember where the date lands so the SECTIME mention can mirror it.
        before = len(self.timexes)
        self.sentence([label, seg, "."])
        date_mention = self.timexes[before]
        sectime = TimexMention(
            id=f"S{len(self.sections)}",
            start=date_mention.start,
            end=date_mention.end,
            text=date_mention.text,
            ttype=TimexType.DATE,
            value=value,
            is_absolute=True,
            section=kind,
        )
        self.sections.append((kind, section_start, sectime))

    def build(self) -> Document:
        text = "".join(self.parts)
        bounds = [start for _, start, _ in self.sections] + [len(text)]
        sections = [
            Section(kind=kind, start=bounds[i], end=bounds[i + 1], sectime=sectime)
            for i, (kind, _, sectime) in enumerate(self.sections)
        ]

        def kind_at(offset: int) -> SectionKind:
            for s in sections:
                if s.start <= offset < s.end:
                    return s.kind
            raise SyntheticError(f"offset {offset} outside sections")

        timexes = [
            TimexMention(
                id=m.id, start=m.start, end=m.end, text=m.text, ttype=m.ttype,
                value=m.value, is_absolute=m.is_absolute, section=kind_at(m.start),
            )
            for m in self.timexes
        ]
        return Document(
            id=self.doc_id,
            text=text,
            sections=sections,
            timexes=timexes,
            events=self.events,
            gold_anchors=self.gold,
        )


_SUBJECTS = ("the patient", "she", "he")

_RI_VERB_PHRASES: tuple[tuple[tuple[str, EventType | None], ...], ...] = (
    (("was", None), ("transfused", EventType.TREATMENT)),
    (("remained", None), ("afebrile", EventType.PROBLEM)),
    (("underwent", None), ("evaluation", EventType.TEST)),
    (("was", None), ("extubated", EventType.TREATMENT)),
    (("improved", EventType.OCCURRENCE),),
    (("remained", None), ("stable", None)),
)

_CUES: dict[_Block, tuple[str, ...]] = {
    _Block.ADM_PLAIN: ("Upon admission ,", "On admission ,"),
    _Block.ADM_CO: ("Upon admission ,", "On admission ,"),
    _Block.DISC_PLAIN: ("In anticipation of discharge ,", "Approaching discharge ,"),
    _Block.DISC_CO: ("In anticipation of discharge ,", "Approaching discharge ,"),
    _Block.PREV_BOTH: ("Shortly thereafter ,", "Soon thereafter ,"),
}
_CUE_BRIDGE = ("Shortly thereafter ,", "Soon thereafter ,")
_CUE_CHAIN_ABS = ("Postoperatively ,", "Regarding the procedure ,")
_CUE_CHAIN_ONLY = ("In the interim ,", "Meanwhile ,")

_FILLER_TEMPLATES = (
    ("An", ("echocardiogram", EventType.TEST), "was obtained on"),
    ("A chest", ("radiograph", EventType.TEST), "was obtained on"),
    ("Blood", ("cultures", EventType.TEST), "were drawn on"),
)
_FILLER_OPERATION = ("The patient underwent bypass", ("grafting", EventType.TREATMENT), "on")
_FILLER_ADM_CO = ("The patient was", ("admitted", EventType.OCCURRENCE), "on")
_FILLER_DISC_CO = ("Discharge planning was reviewed on",)

_DECORATIONS = (
    (
        "He was treated with",
        ("antibiotics", EventType.TREATMENT),
        "for",
        ("five days", "P5D", TimexType.DURATION),
    ),
    (
        "Aspirin was",
        ("continued", EventType.TREATMENT),
        None,
        ("twice daily", "RP12H", TimexType.FREQUENCY),
    ),
)


@dataclass
class _SpanPlan:
    text: str
    prefix: str | None
    value: TimexValue
    ttype: TimexType = TimexType.DATE


def _offset_span(rng: random.Random, anchor: CalendarDate, relation: AnchorRelation,
                 unit: TimeUnit, n: int) -> _SpanPlan:
    cardinal, _ = _word_tables()
    after = relation is AnchorRelation.AFTER
    sign = 1 if after else -1
    value = TimexValue.from_date(add_units(anchor, sign * n, unit))
    unit_word = unit.value if n == 1 else unit.value + "s"
    if unit is TimeUnit.DAY and n == 1:
        text = rng.choice(("the next day", "the following day") if after else ("the day before", "the previous day"))
        return _SpanPlan(text, None, value)
    number = rng.choice((str(n), cardinal[n]))
    tail = rng.choice(("later", "afterward") if after else ("earlier", "prior", "previously"))
    return _SpanPlan(f"{number} {unit_word} {tail}", None, value)


def _ordinal_span(rng: random.Random, anchor: CalendarDate, family: str, n: int) -> _SpanPlan:
    cardinal, _ = _word_tables()
    base = 0 if family == "post-operative-day" else -1
    value = TimexValue.from_date(add_days(anchor, n + base))
    if family == "post-operative-day":
        text = rng.choice(
            (
                f"postoperative day {cardinal[n]}",
                f"postoperative day number {cardinal[n]}",
                f"post-operative day # {n}",
                f"pod # {n}",
            )
        )
    else:
        text = rng.choice((f"day of life {n}", f"day of life # {n}", f"day of life {cardinal[n]}"))
    return _SpanPlan(text, "on", value)


def _partial_time_span(rng: random.Random, anchor: CalendarDate) -> _SpanPlan:
    hour12 = rng.randint(1, 12)
    minute = rng.choice((0, 0, 15, 30, 45))
    meridian = rng.choice(("am", "pm"))
    if meridian == "am":
        hour24 = 0 if hour12 == 12 else hour12
    else:
        hour24 = 12 if hour12 == 12 else hour12 + 12
    clock = str(hour12) if minute == 0 else f"{hour12}:{minute:02d}"
    text = rng.choice((f"{clock}{meridian}", f"{clock} {meridian}"))
    value = TimexValue.from_datetime(anchor, TimeOfDay(hour24, minute))
    return _SpanPlan(text, "at", value, ttype=TimexType.TIME)


def _deictic_span(rng: random.Random, anchor: CalendarDate) -> _SpanPlan:
    text = rng.choice(("that day", "the same day", "that same day", "today"))
    return _SpanPlan(text, None, TimexValue.from_date(anchor))


def _partial_date_span(rng: random.Random, anchor: CalendarDate) -> _SpanPlan:
    _, ordinal = _word_tables()
    day = rng.randint(1, min(28, days_in_month(anchor.year, anchor.month)))
    text = rng.choice((f"the {day}{_ordinal_suffix(day)}", f"the {ordinal[day]}"))
    return _SpanPlan(text, "on", TimexValue.from_date(CalendarDate(anchor.year, anchor.month, day)))


def _plan_span(rng: random.Random, anchor: CalendarDate, relation: AnchorRelation,
               *, bridge: bool, forbidden: frozenset[CalendarDate]) -> _SpanPlan:
    """Render one span for the sampled relation, avoiding forbidden values."""
    if bridge:
        if relation is AnchorRelation.EQUAL_DURING:
            return _partial_time_span(rng, anchor)
        sign = 1 if relation is AnchorRelation.AFTER else -1
        candidates = list(range(1, 7))
        rng.shuffle(candidates)
        for n in candidates:
            if add_days(anchor, sign * n) not in forbidden:
                return _offset_span(rng, anchor, relation, TimeUnit.DAY, n)
        raise SyntheticError("cannot satisfy bridge collision constraints")
    roll = rng.random()
    if relation is AnchorRelation.AFTER:
        if roll < 0.45:
            return _offset_span(rng, anchor, relation, TimeUnit.DAY, rng.randint(1, 6))
        if roll < 0.60:
            return _offset_span(rng, anchor, relation, TimeUnit.WEEK, rng.randint(1, 3))
        if roll < 0.70:
            return _offset_span(rng, anchor, relation, TimeUnit.MONTH, rng.randint(1, 4))
        if roll < 0.88:
            return _ordinal_span(rng, anchor, "post-operative-day", rng.randint(1, 6))
        return _ordinal_span(rng, anchor, "day-of-life", rng.randint(2, 7))
    if relation is AnchorRelation.BEFORE:
        if roll < 0.60:
            return _offset_span(rng, anchor, relation, TimeUnit.DAY, rng.randint(1, 6))
        if roll < 0.85:
            return _offset_span(rng, anchor, relation, TimeUnit.WEEK, rng.randint(1, 3))
        return _offset_span(rng, anchor, relation, TimeUnit.MONTH, rng.randint(1, 4))
    # Equal/during menu. Day-of-life #1 is deliberately absent: after number
    # normalization it is indistinguishable from the after-relation ordinals,
    # which would put a hard ceiling on relation learnability.
    if roll < 0.40:
        return _deictic_span(rng, anchor)
    if roll < 0.80:
        return _partial_time_span(rng, anchor)
    return _partial_date_span(rng, anchor)


def _gold_labels(
    anchor_value: TimexValue,
    admission: TimexValue,
    discharge: TimexValue,
    prev_value: TimexValue | None,
    prev_abs_value: TimexValue | None,
) -> frozenset[AnchorPointLabel]:
    labels = set()
    if admission == anchor_value:
        labels.add(AnchorPointLabel.ADMISSION)
    if discharge == anchor_value:
        labels.add(AnchorPointLabel.DISCHARGE)
    if prev_value == anchor_value:
        labels.add(AnchorPointLabel.PREVIOUS_TIMEX)
    if prev_abs_value == anchor_value:
        labels.add(AnchorPointLabel.PREVIOUS_ABSOLUTE_TIMEX)
    if not labels:
        raise SyntheticError("generated instance whose anchor matches no candidate")
    return frozenset(labels)


def _anchor_date(value: TimexValue) -> CalendarDate:
    assert value.date is not None
    return value.date


class _DocumentWriter:
    """Emits one document's blocks, tracking anchor candidates as it goes."""

    def __init__(self, doc_id: str, rng: random.Random, admission: CalendarDate,
                 discharge: CalendarDate, relations: list[AnchorRelation]) -> None:
        self.rng = rng
        self.admission = TimexValue.from_date(admission)
        self.discharge = TimexValue.from_date(discharge)
        self.adm_date = admission
        self.disc_date = discharge
        self.relations = relations
        self.builder = _Builder(doc_id)

    def _next_relation(self) -> AnchorRelation:
        return self.relations.pop()

    def _filler_value(self) -> CalendarDate:
        while True:
            k = self.rng.randint(-45, 45)
            date = add_days(self.adm_date, k)
            if date not in (self.adm_date, self.disc_date):
                return date

    def _emit_filler(self, template: tuple, date: CalendarDate) -> None:
        segs: list = []
        for part in template:
            if isinstance(part, tuple):
                segs.append(_EventSeg(part[0], part[1]))
            else:
                segs.append(part)
        segs.append(_TimexSeg(_render_date(date, self.rng), TimexType.DATE, TimexValue.from_date(date)))
        segs.append(".")
        self.builder.sentence(segs)

    def _emit_ri(self, cue_pool: tuple[str, ...], anchor_value: TimexValue,
                 *, bridge: bool = False, forbidden: frozenset[CalendarDate] = frozenset()) -> TimexValue:
        relation = self._next_relation()
        plan = _plan_span(
            self.rng, _anchor_date(anchor_value), relation, bridge=bridge, forbidden=forbidden
        )
        gold = GoldAnchor(
            anchor_points=_gold_labels(
                anchor_value,
                self.admission,
                self.discharge,
                self.builder.last_datetime_value,
                self.builder.last_absolute_value,
            ),
            relation=relation,
            value=plan.value,
        )
        segs: list = [self.rng.choice(cue_pool), self.rng.choice(_SUBJECTS)]
        for word, etype in self.rng.choice(_RI_VERB_PHRASES):
            segs.append(_EventSeg(word, etype) if etype else word)
        if plan.prefix:
            segs.append(plan.prefix)
        segs.append(_TimexSeg(plan.text, plan.ttype, plan.value, gold=gold))
        segs.append(".")
        self.builder.sentence(segs)
        return plan.value

    def emit_block(self, block: _Block) -> None:
        if block is _Block.ADM_PLAIN:
            self._emit_filler(self.rng.choice(_FILLER_TEMPLATES), self._filler_value())
            self._emit_ri(_CUES[block], self.admission)
        elif block is _Block.ADM_CO:
            self._emit_filler(_FILLER_ADM_CO, self.adm_date)
            self._emit_ri(_CUES[block], self.admission)
        elif block is _Block.DISC_PLAIN:
            self._emit_filler(self.rng.choice(_FILLER_TEMPLATES), self._filler_value())
            self._emit_ri(_CUES[block], self.discharge)
        elif block is _Block.DISC_CO:
            self._emit_filler(_FILLER_DISC_CO, self.disc_date)
            self._emit_ri(_CUES[block], self.discharge)
        elif block is _Block.PREV_BOTH:
            filler = self._filler_value()
            self._emit_filler(self.rng.choice(_FILLER_TEMPLATES), filler)
            self._emit_ri(_CUES[block], TimexValue.from_date(filler))
        elif block is _Block.CHAIN_ABS:
            filler = self._filler_value()
            self._emit_filler(_FILLER_OPERATION, filler)
            self._emit_ri(
                _CUE_BRIDGE,
                TimexValue.from_date(filler),
                bridge=True,
                forbidden=frozenset((self.adm_date, self.disc_date, filler)),
            )
            # Target anchors to the filler as its previous absolute timex.
            self._emit_ri(_CUE_CHAIN_ABS, TimexValue.from_date(filler))
        else:
            filler = self._filler_value()
            self._emit_filler(self.rng.choice(_FILLER_TEMPLATES), filler)
            bridge_value = self._emit_ri(
                _CUE_BRIDGE,
                TimexValue.from_date(filler),
                bridge=True,
                forbidden=frozenset((self.adm_date, self.disc_date, filler)),
            )
            # Target anchors to the bridge expression, a non-absolute timex.
            self._emit_ri(_CUE_CHAIN_ONLY, bridge_value)

    def emit_decoration(self) -> None:
        lead, event, link, (span, raw, ttype) = self.rng.choice(_DECORATIONS)
        segs: list = [lead, _EventSeg(event[0], event[1])]
        if link:
            segs.append(link)
        segs.append(_TimexSeg(span, ttype, TimexValue.unresolved(raw=raw)))
        segs.append(".")
        self.builder.sentence(segs)


def _generate_document(config: SyntheticConfig, index: int,
                       mix: dict[_Block, float], yield_per_block: float) -> Document:
    rng = random.Random(f"{config.seed}:{index}")
    doc_id = f"synth-{config.seed}-{index:04d}"

    admission = CalendarDate(2009 + rng.randint(0, 9), rng.randint(1, 12), rng.randint(1, 28))
    discharge = add_days(admission, rng.randint(3, 21))

    target_n = rng.randint(*config.ri_per_document)
    n_blocks = max(1, round(target_n / yield_per_block))
    block_counts = _quota_counts(
        [(block, mix[block] * n_blocks) for block in _Block], n_blocks, rng
    )
    blocks: list[_Block] = [b for b in _Block for _ in range(block_counts[b])]
    rng.shuffle(blocks)

    n_instances = sum(2 if b in _CHAIN_BLOCKS else 1 for b in blocks)
    relation_counts = _quota_counts(
        [(rel, config.relation_probs[rel] * n_instances) for rel in AnchorRelation],
        n_instances,
        rng,
    )
    relations: list[AnchorRelation] = [r for r in AnchorRelation for _ in range(relation_counts[r])]
    rng.shuffle(relations)

    writer = _DocumentWriter(doc_id, rng, admission, discharge, relations)
    split = rng.randint(0, len(blocks))
    writer.builder.open_section(SectionKind.CLINICAL_HISTORY, admission)
    for block in blocks[:split]:
        writer.emit_block(block)
        if rng.random() < 0.15:
            writer.emit_decoration()
    writer.builder.open_section(SectionKind.HOSPITAL_COURSE, discharge)
    for block in blocks[split:]:
        writer.emit_block(block)
        if rng.random() < 0.15:
            writer.emit_decoration()
    return writer.builder.build()


def generate_synthetic(config: SyntheticConfig) -> list[Document]:
    """Generate a deterministic corpus with gold anchors, relations, and values."""
    mix = solve_block_mix(config.anchor_probs)
    yield_per_block = expected_instances_per_block(mix)
    return [
        _generate_document(config, index, mix, yield_per_block)
        for index in range(config.document_count)
    ]
