"""Anchor resolution and value integration for RI-TIMEXes.

Each relative/incomplete date or time mention is processed in document order:
classify (or take gold) anchor point and relation, parse the span, resolve
the anchor mention's value (recursively when the anchor is itself relative),
and combine the three into a final ISO value. Resolved values are memoized
per document, which keeps the recursion well-founded: anchors always lie
strictly earlier in the document or are section times.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping

from .classifiers import ModelSet, predict_anchor_point, predict_anchor_relation
from .corpus import Document, TimexMention
from .features import FeatureConfig, extract_features
from .model import (
    AnchorPointLabel,
    AnchorRelation,
    CalendarDate,
    CalendarError,
    SectionKind,
    TimeUnit,
    TimexType,
    TimexValue,
    ValueKind,
    add_units,
    days_in_month,
)
from .spans import ParsedSpan, SpanFamily, parse_span
from .tables import ordinal_family_bases


class PipelineError(ValueError):
    """Unrecoverable pipeline misuse (cycles, missing gold in oracle mode)."""


_DATE_TIME_TYPES = frozenset({TimexType.DATE, TimexType.TIME})


def find_previous_timex(doc: Document, ri: TimexMention, *, same_section: bool = False) -> TimexMention | None:
    """Nearest preceding DATE/TIME mention, the previous-timex anchor candidate."""
    return doc.previous_timex(ri, types=_DATE_TIME_TYPES, same_section=same_section)


def find_previous_absolute(doc: Document, ri: TimexMention, *, same_section: bool = False) -> TimexMention | None:
    """Nearest preceding absolute DATE/TIME mention."""
    return doc.previous_timex(
        ri, types=_DATE_TIME_TYPES, absolute_only=True, same_section=same_section
    )


class ResolutionStatus(str, Enum):
    RESOLVED = "RESOLVED"
    FALLBACK_USED = "FALLBACK_USED"
    UNRESOLVED = "UNRESOLVED"


@dataclass(frozen=True)
class AnchorDecision:
    """Predicted (or gold) anchor point and relation, with decision scores."""

    anchor_point: AnchorPointLabel
    anchor_relation: AnchorRelation
    anchor_scores: dict[AnchorPointLabel, float] = field(default_factory=dict)
    relation_scores: dict[AnchorRelation, float] = field(default_factory=dict)


@dataclass(frozen=True)
class NormalizationResult:
    mention_id: str
    decision: AnchorDecision
    anchor_ref: str  # mention id, "SECTIME:ADMISSION"/"SECTIME:DISCHARGE", or "NONE"
    parsed: ParsedSpan
    value: TimexValue
    status: ResolutionStatus


@dataclass
class ResolutionContext:
    """Per-document memo of resolved values plus a recursion cycle guard."""

    memo: dict[str, TimexValue] = field(default_factory=dict)
    stack: list[str] = field(default_factory=list)


def _sectime_value(doc: Document, kind: SectionKind) -> TimexValue | None:
    section = doc.section(kind)
    return section.sectime.value if section else None


def resolve_anchor_value(
    label: AnchorPointLabel,
    doc: Document,
    ri: TimexMention,
    ctx: ResolutionContext,
    *,
    cross_sections: bool = True,
    resolver=None,
) -> tuple[TimexValue | None, str]:
    """Value of the chosen anchor and a reference tag naming it.

    Returns (None, "NONE") when the anchor cannot be found or has no usable
    value; the caller decides the fallback. For previous-timex anchors that
    are themselves relative, the memoized value is used when present,
    otherwise the optional resolver callback computes it recursively.
    """
    if ri.id in ctx.stack:
        raise PipelineError(f"anchor resolution cycle at mention {ri.id}")

    if label is AnchorPointLabel.ADMISSION:
        value = _sectime_value(doc, SectionKind.CLINICAL_HISTORY)
        return (value, "SECTIME:ADMISSION") if value is not None else (None, "NONE")
    if label is AnchorPointLabel.DISCHARGE:
        value = _sectime_value(doc, SectionKind.HOSPITAL_COURSE)
        return (value, "SECTIME:DISCHARGE") if value is not None else (None, "NONE")

    finder = (
        find_previous_absolute
        if label is AnchorPointLabel.PREVIOUS_ABSOLUTE_TIMEX
        else find_previous_timex
    )
    anchor = finder(doc, ri, same_section=not cross_sections)
    if anchor is None:
        return None, "NONE"
    if anchor.is_absolute:
        return anchor.value, anchor.id
    if anchor.id in ctx.memo:
        value = ctx.memo[anchor.id]
        return (value if value.is_full else None), anchor.id
    if resolver is not None:
        ctx.stack.append(ri.id)
        try:
            value = resolver(anchor)
        finally:
            ctx.stack.pop()
        return (value if value is not None and value.is_full else None), anchor.id
    # No memo entry and no resolver: fall back to the mention's own value if full.
    return (anchor.value if anchor.value.is_full else None), anchor.id


def _anchor_date(anchor: TimexValue) -> CalendarDate:
    assert anchor.date is not None
    return anchor.date


def compute_value(anchor: TimexValue, relation: AnchorRelation, parsed: ParsedSpan) -> TimexValue:
    """Combine anchor value, relation, and parsed span into the final value.

    Incompatible relation/family combinations produce an Unresolved value
    whose raw field carries a diagnostic; bad preconditions (non-full anchor,
    unparseable span) raise instead.
    """
    if not anchor.is_full:
        raise PipelineError("anchor value must be a full date or datetime")
    if parsed.family is SpanFamily.UNPARSEABLE:
        raise PipelineError("cannot compute a value for an unparseable span")
    base = _anchor_date(anchor)

    try:
        if parsed.family is SpanFamily.OFFSET:
            assert parsed.quantity is not None and parsed.unit is not None
            if relation is AnchorRelation.AFTER:
                return TimexValue.from_date(add_units(base, parsed.quantity, parsed.unit))
            if relation is AnchorRelation.BEFORE:
                return TimexValue.from_date(add_units(base, -parsed.quantity, parsed.unit))
            return TimexValue.unresolved(raw="offset span with EQUAL_DURING relation")

        if parsed.family is SpanFamily.POST_EVENT_ORDINAL:
            assert parsed.quantity is not None and parsed.ordinal_family is not None
            bases = ordinal_family_bases()
            if parsed.ordinal_family not in bases:
                return TimexValue.unresolved(raw=f"unknown ordinal family {parsed.ordinal_family}")
            offset = parsed.quantity + bases[parsed.ordinal_family]
            return TimexValue.from_date(add_units(base, offset, TimeUnit.DAY))

        if parsed.family is SpanFamily.PARTIAL_TIME:
            assert parsed.time_of_day is not None
            day = base
            if relation is AnchorRelation.BEFORE and parsed.direction_hint is AnchorRelation.BEFORE:
                day = add_units(base, -1, TimeUnit.DAY)
            return TimexValue.from_datetime(day, parsed.time_of_day)

        if parsed.family is SpanFamily.DEICTIC_DAY:
            return TimexValue.from_date(base)

        # PARTIAL_DATE
        if parsed.day_of_month is None:
            return TimexValue.unresolved(raw="month-only partial date")
        day = parsed.day_of_month
        month_date = base
        if parsed.month is not None and parsed.month != base.month:
            clamp = min(base.day, days_in_month(base.year, parsed.month))
            month_date = CalendarDate(base.year, parsed.month, clamp)
        if parsed.month is None:
            if relation is AnchorRelation.BEFORE and base.day < day:
                month_date = add_units(month_date, -1, TimeUnit.MONTH)
            elif relation is AnchorRelation.AFTER and base.day > day:
                month_date = add_units(month_date, 1, TimeUnit.MONTH)
        if day > days_in_month(month_date.year, month_date.month):
            return TimexValue.unresolved(
                raw=f"day {day} invalid for {month_date.year:04d}-{month_date.month:02d}"
            )
        return TimexValue.from_date(CalendarDate(month_date.year, month_date.month, day))
    except CalendarError as exc:
        return TimexValue.unresolved(raw=f"calendar overflow: {exc}")


def normalize_document(
    doc: Document,
    models: ModelSet | None,
    feature_config: FeatureConfig,
    *,
    oracle_mode: bool = False,
    cross_sections: bool = True,
) -> list[NormalizationResult]:
    """Normalize every RI-TIMEX in document order.

    In oracle mode gold anchor/relation decisions replace the classifiers,
    which isolates the span rules and value integration from classifier
    error. Per-mention failures land in the result status; the document as
    a whole never fails.
    """
    if not oracle_mode:
        if models is None:
            raise PipelineError("models are required unless oracle_mode is set")
        models.anchor_point.check_compatible(feature_config)
        models.anchor_relation.check_compatible(feature_config)
        ap_models = models.anchor_point.anchor_point_models()
        ar_models = models.anchor_relation.anchor_relation_models()

    ctx = ResolutionContext()
    for m in doc.timexes:
        if m.is_absolute and m.value.is_full:
            ctx.memo[m.id] = m.value

    results: list[NormalizationResult] = []
    admission = _sectime_value(doc, SectionKind.CLINICAL_HISTORY)

    for mention in doc.ri_timexes():
        parsed = parse_span(mention.text)
        if oracle_mode:
            gold = (doc.gold_anchors or {}).get(mention.id)
            if gold is None:
                raise PipelineError(
                    f"document {doc.id}: oracle mode needs gold anchors for {mention.id}"
                )
            label = next(l for l in (
                AnchorPointLabel.ADMISSION,
                AnchorPointLabel.PREVIOUS_TIMEX,
                AnchorPointLabel.PREVIOUS_ABSOLUTE_TIMEX,
                AnchorPointLabel.DISCHARGE,
            ) if l in gold.anchor_points)
            decision = AnchorDecision(anchor_point=label, anchor_relation=gold.relation)
        else:
            fv = extract_features(doc, mention, feature_config)
            label, ap_scores = predict_anchor_point(fv, ap_models)
            relation, ar_scores = predict_anchor_relation(fv, ar_models)
            decision = AnchorDecision(
                anchor_point=label,
                anchor_relation=relation,
                anchor_scores=ap_scores,
                relation_scores=ar_scores,
            )

        if parsed.family is SpanFamily.UNPARSEABLE:
            value = TimexValue.unresolved(raw="unparseable span")
            results.append(
                NormalizationResult(
                    mention_id=mention.id,
                    decision=decision,
                    anchor_ref="NONE",
                    parsed=parsed,
                    value=value,
                    status=ResolutionStatus.UNRESOLVED,
                )
            )
            ctx.memo[mention.id] = value
            continue

        anchor_value, anchor_ref = resolve_anchor_value(
            decision.anchor_point, doc, mention, ctx, cross_sections=cross_sections
        )
        status = ResolutionStatus.RESOLVED
        if anchor_value is None:
            # Missing previous mention (or unresolved anchor): admission fallback.
            anchor_value = admission
            anchor_ref = "SECTIME:ADMISSION"
            status = ResolutionStatus.FALLBACK_USED

        if anchor_value is None:
            value = TimexValue.unresolved(raw="no usable anchor")
            status = ResolutionStatus.UNRESOLVED
        else:
            value = compute_value(anchor_value, decision.anchor_relation, parsed)
            if not value.is_full:
                status = ResolutionStatus.UNRESOLVED

        results.append(
            NormalizationResult(
                mention_id=mention.id,
                decision=decision,
                anchor_ref=anchor_ref,
                parsed=parsed,
                value=value,
                status=status,
            )
        )
        ctx.memo[mention.id] = value
    return results


def results_to_json(doc: Document, results: list[NormalizationResult]) -> list[dict]:
    """Prediction block for one document, ready for the canonical schema."""
    return [
        {
            "id": r.mention_id,
            "anchor_point": r.decision.anchor_point.value,
            "relation": r.decision.anchor_relation.value,
            "anchor_ref": r.anchor_ref,
            "family": r.parsed.family.value,
            "value": r.value.to_json(),
            "status": r.status.value,
        }
        for r in results
    ]


def predictions_to_bytes(per_document: Mapping[str, list[dict]], config_echo: dict) -> bytes:
    payload = {"config": config_echo, "documents": dict(sorted(per_document.items()))}
    return (json.dumps(payload, indent=2, sort_keys=True) + "\n").encode("utf-8")


def predictions_from_bytes(data: bytes) -> dict[str, list[dict]]:
    payload = json.loads(data.decode("utf-8"))
    return payload["documents"]
