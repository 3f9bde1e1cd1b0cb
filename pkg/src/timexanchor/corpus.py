"""Document model, i2b2-style XML reading, and the canonical JSON schema.

The XML dialect accepted here is documented in the README: a root element
with an ``id`` attribute containing one TEXT element and one TAGS element;
TAGS holds TIMEX3 / EVENT / SECTIME annotations with a fixed attribute set.
Character offsets are 0-based and half-open against the TEXT payload.
Anything outside the documented dialect is rejected loudly (TLINK elements,
which this library does not consume, are the one documented exception and
are skipped).
"""

from __future__ import annotations

import json
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from enum import Enum

from .model import (
    AnchorPointLabel,
    AnchorRelation,
    IsoParseError,
    SectionKind,
    TimexType,
    TimexValue,
    ValueKind,
    parse_iso8601,
)
from .spans import is_absolute, parse_absolute
from .text import Token, tokenize


class CorpusError(ValueError):
    """Malformed corpus input; messages carry document and element ids."""


class EventType(str, Enum):
    PROBLEM = "PROBLEM"
    TREATMENT = "TREATMENT"
    TEST = "TEST"
    CLINICAL_DEPT = "CLINICAL_DEPT"
    OCCURRENCE = "OCCURRENCE"
    EVIDENTIAL = "EVIDENTIAL"


@dataclass(frozen=True)
class TimexMention:
    """One annotated temporal expression."""

    id: str
    start: int
    end: int
    text: str
    ttype: TimexType
    value: TimexValue
    is_absolute: bool
    section: SectionKind

    def __post_init__(self) -> None:
        if self.start >= self.end:
            raise CorpusError(f"timex {self.id}: empty or inverted span")
        if self.is_absolute and not self.value.is_full:
            raise CorpusError(f"timex {self.id}: absolute mention with incomplete value")


@dataclass(frozen=True)
class EventMention:
    id: str
    start: int
    end: int
    text: str
    etype: EventType


@dataclass(frozen=True)
class Section:
    kind: SectionKind
    start: int
    end: int
    sectime: TimexMention


@dataclass(frozen=True)
class GoldAnchor:
    """Gold annotation for one RI-TIMEX: anchor label set, relation, value."""

    anchor_points: frozenset[AnchorPointLabel]
    relation: AnchorRelation
    value: TimexValue

    def __post_init__(self) -> None:
        if not self.anchor_points:
            raise CorpusError("gold anchor needs at least one anchor point label")


@dataclass
class Document:
    """A narrative with sections, timexes, events, and optional gold anchors.

    Construction validates the span/ordering invariants and derives the token
    list from the text, so a Document in hand is always internally consistent.
    """

    id: str
    text: str
    sections: list[Section]
    timexes: list[TimexMention]
    events: list[EventMention]
    gold_anchors: dict[str, GoldAnchor] | None = None
    tokens: list[Token] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self.timexes = sorted(self.timexes, key=lambda t: (t.start, t.end - t.start, t.id))
        self.tokens = tokenize(self.text)
        self._validate()

    def _validate(self) -> None:
        if not self.sections:
            raise CorpusError(f"document {self.id}: no sections")
        kinds = [s.kind for s in self.sections]
        if len(set(kinds)) != len(kinds):
            raise CorpusError(f"document {self.id}: duplicate section kinds")
        ordered = sorted(self.sections, key=lambda s: s.start)
        for a, b in zip(ordered, ordered[1:]):
            if a.end > b.start:
                raise CorpusError(f"document {self.id}: overlapping sections")
        for s in self.sections:
            if not (0 <= s.start < s.end <= len(self.text)):
                raise CorpusError(f"document {self.id}: section {s.kind.value} out of bounds")
            if not s.sectime.value.is_full:
                raise CorpusError(
                    f"document {self.id}: SECTIME for {s.kind.value} lacks a full date value"
                )
        seen: set[str] = set()
        for m in self.timexes:
            if m.id in seen:
                raise CorpusError(f"document {self.id}: duplicate timex id {m.id}")
            seen.add(m.id)
            self._check_span(m.id, m.start, m.end, m.text)
        for e in self.events:
            self._check_span(e.id, e.start, e.end, e.text)
        if self.gold_anchors is not None:
            for mid in self.gold_anchors:
                if mid not in seen:
                    raise CorpusError(f"document {self.id}: gold anchor for unknown timex {mid}")

    def _check_span(self, eid: str, start: int, end: int, text: str) -> None:
        if not (0 <= start < end <= len(self.text)):
            raise CorpusError(f"document {self.id}: element {eid} span out of bounds")
        if self.text[start:end] != text:
            raise CorpusError(
                f"document {self.id}: element {eid} text {text!r} does not match "
                f"span {self.text[start:end]!r}"
            )

    def section_at(self, offset: int) -> Section:
        for s in self.sections:
            if s.start <= offset < s.end:
                return s
        raise CorpusError(f"document {self.id}: offset {offset} outside every section")

    def section(self, kind: SectionKind) -> Section | None:
        for s in self.sections:
            if s.kind is kind:
                return s
        return None

    def previous_timex(
        self,
        mention: TimexMention,
        *,
        types: frozenset[TimexType] | None = None,
        absolute_only: bool = False,
        same_section: bool = False,
    ) -> TimexMention | None:
        """Nearest mention that starts strictly before the given one."""
        best: TimexMention | None = None
        for m in self.timexes:
            if m.start >= mention.start:
                break
            if types is not None and m.ttype not in types:
                continue
            if absolute_only and not m.is_absolute:
                continue
            if same_section and m.section is not mention.section:
                continue
            best = m
        return best

    def ri_timexes(self) -> list[TimexMention]:
        """Date/time mentions whose value depends on context."""
        return [
            m
            for m in self.timexes
            if m.ttype in (TimexType.DATE, TimexType.TIME) and not m.is_absolute
        ]


_ROOT_TAG = "ClinicalDocument"
_TIMEX_ATTRS = {"id", "start", "end", "text", "type", "val"}
_EVENT_ATTRS = {"id", "start", "end", "text", "type"}
_SECTIME_ATTRS = {"id", "start", "end", "text", "type", "val", "section_start", "section_end"}
_SECTIME_KINDS = {"ADMISSION": SectionKind.CLINICAL_HISTORY, "DISCHARGE": SectionKind.HOSPITAL_COURSE}


def _attr(elem: ET.Element, name: str, doc_id: str) -> str:
    value = elem.get(name)
    if value is None:
        raise CorpusError(
            f"document {doc_id}: {elem.tag} element {elem.get('id', '?')} missing attribute {name!r}"
        )
    return value


def _int_attr(elem: ET.Element, name: str, doc_id: str) -> int:
    raw = _attr(elem, name, doc_id)
    try:
        return int(raw)
    except ValueError as exc:
        raise CorpusError(
            f"document {doc_id}: {elem.tag} element {elem.get('id', '?')} has non-integer {name}={raw!r}"
        ) from exc


def _check_attrs(elem: ET.Element, allowed: set[str], doc_id: str) -> None:
    unknown = set(elem.keys()) - allowed
    if unknown:
        raise CorpusError(
            f"document {doc_id}: {elem.tag} element {elem.get('id', '?')} has "
            f"unsupported attributes {sorted(unknown)}"
        )


def _timex_value(raw_val: str, text: str, doc_id: str, eid: str) -> tuple[TimexValue, bool]:
    absolute = is_absolute(text)
    value: TimexValue
    if raw_val:
        try:
            value = parse_iso8601(raw_val)
        except IsoParseError:
            value = TimexValue.unresolved(raw=raw_val)
    else:
        value = TimexValue.unresolved()
    if absolute and not value.is_full:
        # Fall back to the surface form when the val attribute is unusable.
        try:
            value = parse_absolute(text)
        except ValueError as exc:
            raise CorpusError(
                f"document {doc_id}: timex {eid} looks absolute but has no usable value"
            ) from exc
    return value, absolute


def read_i2b2_xml(data: bytes, gold_sidecar: bytes | None = None) -> Document:
    """Parse annotated XML (and an optional gold-anchor sidecar) into a Document."""
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        raise CorpusError(f"malformed XML: {exc}") from exc
    if root.tag != _ROOT_TAG:
        raise CorpusError(f"expected root element {_ROOT_TAG!r}, got {root.tag!r}")
    doc_id = root.get("id") or ""
    if not doc_id:
        raise CorpusError(f"root element lacks an id attribute")

    text_elem = root.find("TEXT")
    tags_elem = root.find("TAGS")
    if text_elem is None or tags_elem is None:
        raise CorpusError(f"document {doc_id}: TEXT and TAGS elements are both required")
    text = text_elem.text or ""

    sections: list[Section] = []
    raw_timexes: list[dict] = []
    events: list[EventMention] = []
    for elem in tags_elem:
        if elem.tag == "TLINK":
            continue
        if elem.tag == "TIMEX3":
            _check_attrs(elem, _TIMEX_ATTRS, doc_id)
            eid = _attr(elem, "id", doc_id)
            try:
                ttype = TimexType(_attr(elem, "type", doc_id))
            except ValueError as exc:
                raise CorpusError(f"document {doc_id}: timex {eid} has unknown type") from exc
            raw_timexes.append(
                {
                    "id": eid,
                    "start": _int_attr(elem, "start", doc_id),
                    "end": _int_attr(elem, "end", doc_id),
                    "text": _attr(elem, "text", doc_id),
                    "ttype": ttype,
                    "val": elem.get("val", ""),
                }
            )
        elif elem.tag == "EVENT":
            _check_attrs(elem, _EVENT_ATTRS, doc_id)
            eid = _attr(elem, "id", doc_id)
            try:
                etype = EventType(_attr(elem, "type", doc_id))
            except ValueError as exc:
                raise CorpusError(f"document {doc_id}: event {eid} has unknown type") from exc
            events.append(
                EventMention(
                    id=eid,
                    start=_int_attr(elem, "start", doc_id),
                    end=_int_attr(elem, "end", doc_id),
                    text=_attr(elem, "text", doc_id),
                    etype=etype,
                )
            )
        elif elem.tag == "SECTIME":
            _check_attrs(elem, _SECTIME_ATTRS, doc_id)
            eid = _attr(elem, "id", doc_id)
            kind_name = _attr(elem, "type", doc_id)
            if kind_name not in _SECTIME_KINDS:
                raise CorpusError(
                    f"document {doc_id}: SECTIME {eid} type must be ADMISSION or DISCHARGE"
                )
            sec_kind = _SECTIME_KINDS[kind_name]
            stext = _attr(elem, "text", doc_id)
            value, absolute = _timex_value(_attr(elem, "val", doc_id), stext, doc_id, eid)
            if not value.is_full:
                raise CorpusError(f"document {doc_id}: SECTIME {eid} value is not a full date")
            sectime = TimexMention(
                id=eid,
                start=_int_attr(elem, "start", doc_id),
                end=_int_attr(elem, "end", doc_id),
                text=stext,
                ttype=TimexType.DATE,
                value=value,
                is_absolute=absolute,
                section=sec_kind,
            )
            sections.append(
                Section(
                    kind=sec_kind,
                    start=_int_attr(elem, "section_start", doc_id),
                    end=_int_attr(elem, "section_end", doc_id),
                    sectime=sectime,
                )
            )
        else:
            raise CorpusError(f"document {doc_id}: unsupported element {elem.tag!r} in TAGS")

    if not sections:
        raise CorpusError(f"document {doc_id}: missing SECTIME elements")

    def section_kind_at(offset: int) -> SectionKind:
        for s in sections:
            if s.start <= offset < s.end:
                return s.kind
        raise CorpusError(f"document {doc_id}: offset {offset} outside every section")

    timexes = []
    for raw in raw_timexes:
        value, absolute = _timex_value(raw["val"], raw["text"], doc_id, raw["id"])
        timexes.append(
            TimexMention(
                id=raw["id"],
                start=raw["start"],
                end=raw["end"],
                text=raw["text"],
                ttype=raw["ttype"],
                value=value,
                is_absolute=absolute,
                section=section_kind_at(raw["start"]),
            )
        )

    gold = _parse_gold_sidecar(gold_sidecar, doc_id, timexes) if gold_sidecar else None
    return Document(id=doc_id, text=text, sections=sections, timexes=timexes, events=events, gold_anchors=gold)


def _parse_gold_sidecar(data: bytes, doc_id: str, timexes: list[TimexMention]) -> dict[str, GoldAnchor]:
    try:
        obj = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CorpusError(f"document {doc_id}: malformed gold sidecar: {exc}") from exc
    if obj.get("id") != doc_id:
        raise CorpusError(
            f"document {doc_id}: gold sidecar is for document {obj.get('id')!r}"
        )
    by_id = {m.id: m for m in timexes}
    gold: dict[str, GoldAnchor] = {}
    for mid, entry in obj.get("anchors", {}).items():
        if mid not in by_id:
            raise CorpusError(f"document {doc_id}: gold sidecar names unknown timex {mid}")
        if "value" in entry:
            value = TimexValue.from_json(entry["value"])
        else:
            value = by_id[mid].value
            if not value.is_full:
                raise CorpusError(
                    f"document {doc_id}: gold entry for {mid} has no value and the "
                    f"mention value is incomplete"
                )
        gold[mid] = GoldAnchor(
            anchor_points=frozenset(AnchorPointLabel(p) for p in entry["anchor_points"]),
            relation=AnchorRelation(entry["relation"]),
            value=value,
        )
    return gold


def write_i2b2_xml(doc: Document) -> bytes:
    """Serialize a Document back to the documented XML dialect."""
    root = ET.Element(_ROOT_TAG, {"id": doc.id})
    ET.SubElement(root, "TEXT").text = doc.text
    tags = ET.SubElement(root, "TAGS")
    for i, s in enumerate(doc.sections):
        kind_name = "ADMISSION" if s.kind is SectionKind.CLINICAL_HISTORY else "DISCHARGE"
        ET.SubElement(
            tags,
            "SECTIME",
            {
                "id": s.sectime.id,
                "start": str(s.sectime.start),
                "end": str(s.sectime.end),
                "text": s.sectime.text,
                "type": kind_name,
                "val": _value_attr(s.sectime.value),
                "section_start": str(s.start),
                "section_end": str(s.end),
            },
        )
    for m in doc.timexes:
        ET.SubElement(
            tags,
            "TIMEX3",
            {
                "id": m.id,
                "start": str(m.start),
                "end": str(m.end),
                "text": m.text,
                "type": m.ttype.value,
                "val": _value_attr(m.value),
            },
        )
    for e in doc.events:
        ET.SubElement(
            tags,
            "EVENT",
            {
                "id": e.id,
                "start": str(e.start),
                "end": str(e.end),
                "text": e.text,
                "type": e.etype.value,
            },
        )
    return ET.tostring(root, encoding="utf-8", xml_declaration=True)


def _value_attr(value: TimexValue) -> str:
    if value.is_full:
        from .model import format_iso8601

        return format_iso8601(value)
    if value.kind is ValueKind.UNRESOLVED and value.raw:
        return value.raw
    return ""


def write_gold_sidecar(doc: Document) -> bytes:
    """Serialize a document's gold anchors to the sidecar JSON form."""
    anchors = {}
    for mid, g in sorted((doc.gold_anchors or {}).items()):
        anchors[mid] = {
            "anchor_points": sorted(p.value for p in g.anchor_points),
            "relation": g.relation.value,
            "value": g.value.to_json(),
        }
    payload = {"id": doc.id, "anchors": anchors}
    return (json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n").encode("utf-8")


class SchemaError(CorpusError):
    """Canonical-schema violation; the message carries a field path."""


def _expect(obj, path: str, kind) -> object:
    if not isinstance(obj, kind):
        raise SchemaError(f"{path}: expected {kind.__name__}, got {type(obj).__name__}")
    return obj


def _mention_to_json(m: TimexMention) -> dict:
    return {
        "id": m.id,
        "start": m.start,
        "end": m.end,
        "text": m.text,
        "type": m.ttype.value,
        "value": m.value.to_json(),
        "is_absolute": m.is_absolute,
    }


def _mention_from_json(obj: dict, path: str, section: SectionKind) -> TimexMention:
    _expect(obj, path, dict)
    try:
        return TimexMention(
            id=str(_expect(obj["id"], f"{path}.id", str)),
            start=_expect(obj["start"], f"{path}.start", int),
            end=_expect(obj["end"], f"{path}.end", int),
            text=_expect(obj["text"], f"{path}.text", str),
            ttype=TimexType(obj["type"]),
            value=TimexValue.from_json(_expect(obj["value"], f"{path}.value", dict)),
            is_absolute=_expect(obj["is_absolute"], f"{path}.is_absolute", bool),
            section=section,
        )
    except KeyError as exc:
        raise SchemaError(f"{path}: missing field {exc.args[0]!r}") from exc
    except (ValueError, IsoParseError) as exc:
        if isinstance(exc, SchemaError):
            raise
        raise SchemaError(f"{path}: {exc}") from exc


def write_canonical(doc: Document) -> bytes:
    """One document as deterministic UTF-8 JSON (sorted keys, two-space indent)."""
    payload = {
        "id": doc.id,
        "text": doc.text,
        "sections": [
            {
                "kind": s.kind.value,
                "start": s.start,
                "end": s.end,
                "sectime": _mention_to_json(s.sectime),
            }
            for s in doc.sections
        ],
        "timexes": [_mention_to_json(m) for m in doc.timexes],
        "events": [
            {"id": e.id, "start": e.start, "end": e.end, "text": e.text, "type": e.etype.value}
            for e in doc.events
        ],
        "gold_anchors": None
        if doc.gold_anchors is None
        else {
            mid: {
                "anchor_points": sorted(p.value for p in g.anchor_points),
                "relation": g.relation.value,
                "value": g.value.to_json(),
            }
            for mid, g in sorted(doc.gold_anchors.items())
        },
    }
    return (json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n").encode("utf-8")


def read_canonical(data: bytes) -> Document:
    """Parse the canonical JSON schema back into a validated Document."""
    try:
        obj = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise SchemaError(f"invalid JSON: {exc}") from exc
    _expect(obj, "$", dict)
    missing = {"id", "text", "sections", "timexes", "events", "gold_anchors"} - set(obj)
    if missing:
        raise SchemaError(f"$: missing top-level keys {sorted(missing)}")
    doc_id = str(_expect(obj["id"], "$.id", str))
    text = _expect(obj["text"], "$.text", str)

    sections = []
    for i, s in enumerate(_expect(obj["sections"], "$.sections", list)):
        path = f"$.sections[{i}]"
        _expect(s, path, dict)
        try:
            kind = SectionKind(s["kind"])
            sections.append(
                Section(
                    kind=kind,
                    start=_expect(s["start"], f"{path}.start", int),
                    end=_expect(s["end"], f"{path}.end", int),
                    sectime=_mention_from_json(s["sectime"], f"{path}.sectime", kind),
                )
            )
        except KeyError as exc:
            raise SchemaError(f"{path}: missing field {exc.args[0]!r}") from exc
        except ValueError as exc:
            if isinstance(exc, SchemaError):
                raise
            raise SchemaError(f"{path}: {exc}") from exc

    def kind_at(offset: int, path: str) -> SectionKind:
        for s in sections:
            if s.start <= offset < s.end:
                return s.kind
        raise SchemaError(f"{path}: offset {offset} outside every section")

    timexes = []
    for i, t in enumerate(_expect(obj["timexes"], "$.timexes", list)):
        path = f"$.timexes[{i}]"
        _expect(t, path, dict)
        start = _expect(t.get("start"), f"{path}.start", int)
        timexes.append(_mention_from_json(t, path, kind_at(start, path)))

    events = []
    for i, e in enumerate(_expect(obj["events"], "$.events", list)):
        path = f"$.events[{i}]"
        _expect(e, path, dict)
        try:
            events.append(
                EventMention(
                    id=str(_expect(e["id"], f"{path}.id", str)),
                    start=_expect(e["start"], f"{path}.start", int),
                    end=_expect(e["end"], f"{path}.end", int),
                    text=_expect(e["text"], f"{path}.text", str),
                    etype=EventType(e["type"]),
                )
            )
        except KeyError as exc:
            raise SchemaError(f"{path}: missing field {exc.args[0]!r}") from exc
        except ValueError as exc:
            if isinstance(exc, SchemaError):
                raise
            raise SchemaError(f"{path}: {exc}") from exc

    gold = None
    if obj["gold_anchors"] is not None:
        gold = {}
        for mid, g in _expect(obj["gold_anchors"], "$.gold_anchors", dict).items():
            path = f"$.gold_anchors.{mid}"
            _expect(g, path, dict)
            try:
                gold[mid] = GoldAnchor(
                    anchor_points=frozenset(
                        AnchorPointLabel(p)
                        for p in _expect(g["anchor_points"], f"{path}.anchor_points", list)
                    ),
                    relation=AnchorRelation(g["relation"]),
                    value=TimexValue.from_json(_expect(g["value"], f"{path}.value", dict)),
                )
            except KeyError as exc:
                raise SchemaError(f"{path}: missing field {exc.args[0]!r}") from exc
            except (ValueError, IsoParseError) as exc:
                if isinstance(exc, SchemaError):
                    raise
                raise SchemaError(f"{path}: {exc}") from exc

    try:
        return Document(
            id=doc_id, text=text, sections=sections, timexes=timexes, events=events, gold_anchors=gold
        )
    except CorpusError as exc:
        raise SchemaError(str(exc)) from exc
