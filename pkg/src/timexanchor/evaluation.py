"""Scoring against gold anchors: step accuracies, distributions, agreement.

Correctness conventions:
  - An anchor-point prediction is correct when the single predicted label is
    a member of the gold label set (gold may co-anchor).
  - Relation accuracy is computed over mentions whose anchor point was
    correct; normalization accuracy over mentions whose span family, anchor
    point, and relation were all correct.
  - Relaxed value matching additionally accepts a +/- 1 day deviation, but
    only for mentions whose gold span family is a post-event ordinal.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from typing import Mapping, Sequence

from .classifiers import (
    ANCHOR_POINT_PREFERENCE,
    RELATION_PREFERENCE,
    TrainingConfig,
    fit_model_set,
    gold_instances,
    predict_anchor_relation,
)
from .corpus import Document
from .features import FeatureConfig
from .model import AnchorPointLabel, AnchorRelation, TimexValue, day_distance
from .spans import SpanFamily, parse_span

Key = tuple[str, str]  # (document id, mention id)


class EvalDataError(ValueError):
    """Prediction/gold id mismatch or malformed inputs."""


@dataclass(frozen=True)
class GoldRecord:
    anchor_points: frozenset[AnchorPointLabel]
    relation: AnchorRelation
    value: TimexValue
    family: SpanFamily


@dataclass(frozen=True)
class PredictionRecord:
    anchor_point: AnchorPointLabel
    relation: AnchorRelation
    family: SpanFamily
    value: TimexValue


def gold_records(docs: Sequence[Document]) -> dict[Key, GoldRecord]:
    """Gold table keyed by (doc id, mention id); span families re-derived."""
    records: dict[Key, GoldRecord] = {}
    for doc in docs:
        if doc.gold_anchors is None:
            raise EvalDataError(f"document {doc.id} has no gold_anchors block")
        mentions = {m.id: m for m in doc.timexes}
        for mid, gold in doc.gold_anchors.items():
            records[(doc.id, mid)] = GoldRecord(
                anchor_points=gold.anchor_points,
                relation=gold.relation,
                value=gold.value,
                family=parse_span(mentions[mid].text).family,
            )
    return records


def prediction_records(per_document: Mapping[str, list[dict]]) -> dict[Key, PredictionRecord]:
    records: dict[Key, PredictionRecord] = {}
    for doc_id, entries in per_document.items():
        for entry in entries:
            records[(doc_id, entry["id"])] = PredictionRecord(
                anchor_point=AnchorPointLabel(entry["anchor_point"]),
                relation=AnchorRelation(entry["relation"]),
                family=SpanFamily(entry["family"]),
                value=TimexValue.from_json(entry["value"]),
            )
    return records


def value_matches(pred: TimexValue, gold: TimexValue, family: SpanFamily, mode: str) -> bool:
    if pred == gold:
        return True
    if mode != "relaxed" or family is not SpanFamily.POST_EVENT_ORDINAL:
        return False
    if pred.date is None or gold.date is None:
        return False
    return abs(day_distance(pred.date, gold.date)) <= 1


@dataclass(frozen=True)
class MentionScore:
    key: Key
    anchor_ok: bool
    relation_ok: bool
    family_ok: bool
    strict_ok: bool
    relaxed_ok: bool


def score_mentions(
    predictions: Mapping[Key, PredictionRecord], gold: Mapping[Key, GoldRecord]
) -> list[MentionScore]:
    """Per-mention correctness flags; prediction ids must be a gold subset."""
    alien = sorted(set(predictions) - set(gold))
    if alien:
        raise EvalDataError(f"predictions for unknown mentions: {alien[:5]}")
    scores = []
    for key in sorted(predictions):
        p, g = predictions[key], gold[key]
        anchor_ok = p.anchor_point in g.anchor_points
        scores.append(
            MentionScore(
                key=key,
                anchor_ok=anchor_ok,
                relation_ok=anchor_ok and p.relation is g.relation,
                family_ok=p.family is g.family,
                strict_ok=value_matches(p.value, g.value, g.family, "strict"),
                relaxed_ok=value_matches(p.value, g.value, g.family, "relaxed"),
            )
        )
    return scores


def _ratio(num: int, denom: int) -> float | None:
    return num / denom if denom else None


@dataclass(frozen=True)
class EvalReport:
    """Step accuracies and end-to-end value scores for one evaluation mode."""

    mode: str
    gold_total: int
    extracted: int
    extraction_recall: float | None
    anchor_point_accuracy: float | None
    anchor_point_by_label: dict[str, tuple[int, float | None]]
    anchor_relation_accuracy: float | None
    anchor_relation_by_label: dict[str, tuple[int, float | None]]
    normalization_accuracy_strict: float | None
    normalization_accuracy_relaxed: float | None
    value_accuracy: float | None
    value_recall: float | None

    def __post_init__(self) -> None:
        strict, relaxed = self.normalization_accuracy_strict, self.normalization_accuracy_relaxed
        if strict is not None and relaxed is not None and relaxed < strict - 1e-12:
            raise EvalDataError("relaxed normalization accuracy fell below strict")

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "gold_total": self.gold_total,
            "extracted": self.extracted,
            "extraction_recall": self.extraction_recall,
            "anchor_point_accuracy": self.anchor_point_accuracy,
            "anchor_point_by_label": {
                k: {"count": c, "accuracy": acc} for k, (c, acc) in self.anchor_point_by_label.items()
            },
            "anchor_relation_accuracy": self.anchor_relation_accuracy,
            "anchor_relation_by_label": {
                k: {"count": c, "accuracy": acc}
                for k, (c, acc) in self.anchor_relation_by_label.items()
            },
            "normalization_accuracy_strict": self.normalization_accuracy_strict,
            "normalization_accuracy_relaxed": self.normalization_accuracy_relaxed,
            "value_accuracy": self.value_accuracy,
            "value_recall": self.value_recall,
        }


def score(
    predictions: Mapping[Key, PredictionRecord],
    gold: Mapping[Key, GoldRecord],
    mode: str = "strict",
) -> EvalReport:
    """Score predictions against gold; missing mentions count as extraction misses."""
    if mode not in ("strict", "relaxed"):
        raise EvalDataError(f"unknown evaluation mode {mode!r}")
    mention_scores = score_mentions(predictions, gold)

    extracted = len(mention_scores)
    anchor_correct = sum(1 for s in mention_scores if s.anchor_ok)
    relation_correct = sum(1 for s in mention_scores if s.relation_ok)

    norm_pool = [s for s in mention_scores if s.anchor_ok and s.relation_ok and s.family_ok]
    norm_strict = sum(1 for s in norm_pool if s.strict_ok)
    norm_relaxed = sum(1 for s in norm_pool if s.relaxed_ok)

    mode_ok = (lambda s: s.relaxed_ok) if mode == "relaxed" else (lambda s: s.strict_ok)
    value_correct = sum(1 for s in mention_scores if mode_ok(s))

    ap_by_label = {}
    for label in ANCHOR_POINT_PREFERENCE:
        with_label = [s for s in mention_scores if label in gold[s.key].anchor_points]
        ap_by_label[label.value] = (
            len(with_label),
            _ratio(sum(1 for s in with_label if s.anchor_ok), len(with_label)),
        )
    ar_by_label = {}
    for relation in RELATION_PREFERENCE:
        eligible = [s for s in mention_scores if s.anchor_ok and gold[s.key].relation is relation]
        ar_by_label[relation.value] = (
            len(eligible),
            _ratio(sum(1 for s in eligible if s.relation_ok), len(eligible)),
        )

    return EvalReport(
        mode=mode,
        gold_total=len(gold),
        extracted=extracted,
        extraction_recall=_ratio(extracted, len(gold)),
        anchor_point_accuracy=_ratio(anchor_correct, extracted),
        anchor_point_by_label=ap_by_label,
        anchor_relation_accuracy=_ratio(relation_correct, anchor_correct),
        anchor_relation_by_label=ar_by_label,
        normalization_accuracy_strict=_ratio(norm_strict, len(norm_pool)),
        normalization_accuracy_relaxed=_ratio(norm_relaxed, len(norm_pool)),
        value_accuracy=_ratio(value_correct, extracted),
        value_recall=_ratio(value_correct, len(gold)),
    )


@dataclass(frozen=True)
class StatsReport:
    """Anchor point and relation distribution over a gold-annotated corpus."""

    total: int
    anchor_counts: dict[str, int]
    anchor_percentages: dict[str, float | None]
    relation_counts: dict[str, int]
    relation_percentages: dict[str, float | None]

    def to_json(self) -> dict:
        return {
            "total": self.total,
            "anchor_counts": self.anchor_counts,
            "anchor_percentages": self.anchor_percentages,
            "relation_counts": self.relation_counts,
            "relation_percentages": self.relation_percentages,
        }


def anchor_stats(docs: Sequence[Document]) -> StatsReport:
    """Percentage of RI-TIMEXes carrying each anchor label, and relation shares.

    Anchor labels may co-occur, so the anchor percentages need not sum to
    100%; relations partition the instances.
    """
    total = 0
    anchor_counts = {label.value: 0 for label in ANCHOR_POINT_PREFERENCE}
    relation_counts = {rel.value: 0 for rel in RELATION_PREFERENCE}
    for doc in docs:
        for gold in (doc.gold_anchors or {}).values():
            total += 1
            for label in gold.anchor_points:
                anchor_counts[label.value] += 1
            relation_counts[gold.relation.value] += 1
    pct = lambda n: (100.0 * n / total) if total else None
    return StatsReport(
        total=total,
        anchor_counts=anchor_counts,
        anchor_percentages={k: pct(v) for k, v in anchor_counts.items()},
        relation_counts=relation_counts,
        relation_percentages={k: pct(v) for k, v in relation_counts.items()},
    )


@dataclass(frozen=True)
class AgreementReport:
    anchor_agreement: float | None
    relation_agreement: float | None


Annotation = tuple[frozenset[AnchorPointLabel], AnchorRelation]


def agreement(a: Mapping[Key, Annotation], b: Mapping[Key, Annotation]) -> AgreementReport:
    """Inter-annotator agreement; relations compared only where anchors agree."""
    if set(a) != set(b):
        raise EvalDataError("annotation sets cover different mentions")
    if not a:
        return AgreementReport(anchor_agreement=None, relation_agreement=None)
    anchor_agreed = [k for k in a if a[k][0] & b[k][0]]
    relation_agreed = sum(1 for k in anchor_agreed if a[k][1] is b[k][1])
    return AgreementReport(
        anchor_agreement=len(anchor_agreed) / len(a),
        relation_agreement=_ratio(relation_agreed, len(anchor_agreed)),
    )


@dataclass(frozen=True)
class AblationRow:
    """Per-class accuracies for one feature-set combination.

    Anchor-point columns report each binary classifier's recall on held-out
    instances carrying that gold label; relation columns report the composed
    argmax prediction's recall per gold relation.
    """

    feature_sets: tuple[str, ...]
    anchor_by_label: dict[str, tuple[int, float | None]]
    relation_by_label: dict[str, tuple[int, float | None]]

    def to_json(self) -> dict:
        return {
            "feature_sets": list(self.feature_sets),
            "anchor_by_label": {
                k: {"count": c, "accuracy": acc} for k, (c, acc) in self.anchor_by_label.items()
            },
            "relation_by_label": {
                k: {"count": c, "accuracy": acc} for k, (c, acc) in self.relation_by_label.items()
            },
        }


def make_folds(docs: Sequence[Document], folds: int, seed: int) -> list[list[Document]]:
    """Deterministic document-level fold assignment."""
    if len(docs) < folds:
        raise EvalDataError(f"need at least {folds} documents for {folds}-fold splits, got {len(docs)}")
    ordered = sorted(docs, key=lambda d: d.id)
    rng = random.Random(seed)
    rng.shuffle(ordered)
    buckets: list[list[Document]] = [[] for _ in range(folds)]
    for i, doc in enumerate(ordered):
        buckets[i % folds].append(doc)
    return buckets


def ablation(
    docs: Sequence[Document],
    feature_set_rows: Sequence[Sequence[str]],
    base_feature_config: FeatureConfig,
    training_config: TrainingConfig,
    folds: int = 10,
) -> list[AblationRow]:
    """Cross-validated per-class accuracy for each feature-set combination."""
    buckets = make_folds(docs, folds, training_config.seed)
    rows = []
    for sets in feature_set_rows:
        config = replace(base_feature_config, feature_sets=frozenset(sets))
        anchor_hits = {label: [0, 0] for label in ANCHOR_POINT_PREFERENCE}
        relation_hits = {rel: [0, 0] for rel in RELATION_PREFERENCE}
        for held_index in range(folds):
            train_docs = [d for i in range(folds) if i != held_index for d in buckets[i]]
            held_docs = buckets[held_index]
            models = fit_model_set(train_docs, config, training_config)
            ap_models = models.anchor_point.anchor_point_models()
            ar_models = models.anchor_relation.anchor_relation_models()
            for fv, gold in gold_instances(held_docs, config):
                for label in gold.anchor_points:
                    anchor_hits[label][0] += 1
                    if ap_models[label].score(fv) > 0.0:
                        anchor_hits[label][1] += 1
                predicted, _ = predict_anchor_relation(fv, ar_models)
                relation_hits[gold.relation][0] += 1
                if predicted is gold.relation:
                    relation_hits[gold.relation][1] += 1
        rows.append(
            AblationRow(
                feature_sets=tuple(sorted(sets)),
                anchor_by_label={
                    label.value: (n, _ratio(hit, n)) for label, (n, hit) in anchor_hits.items()
                },
                relation_by_label={
                    rel.value: (n, _ratio(hit, n)) for rel, (n, hit) in relation_hits.items()
                },
            )
        )
    return rows


def _fmt_pct(value: float | None, *, scale: float = 100.0) -> str:
    return "n/a" if value is None else f"{scale * value:.2f}%"


def render_stats_table(report: StatsReport) -> str:
    lines = ["RI-TIMEX annotation statistics", f"  instances: {report.total}", ""]
    lines.append(f"  {'anchor point':<28}{'count':>8}{'share':>10}")
    for label in ANCHOR_POINT_PREFERENCE:
        pct = report.anchor_percentages[label.value]
        pct_text = "n/a" if pct is None else f"{pct:.1f}%"
        lines.append(f"  {label.value:<28}{report.anchor_counts[label.value]:>8}{pct_text:>10}")
    lines.append("  (labels may co-occur; shares need not sum to 100%)")
    lines.append("")
    lines.append(f"  {'anchor relation':<28}{'count':>8}{'share':>10}")
    for rel in RELATION_PREFERENCE:
        pct = report.relation_percentages[rel.value]
        pct_text = "n/a" if pct is None else f"{pct:.1f}%"
        lines.append(f"  {rel.value:<28}{report.relation_counts[rel.value]:>8}{pct_text:>10}")
    return "\n".join(lines) + "\n"


def render_step_table(report: EvalReport) -> str:
    """Per-step accuracy table (extraction, anchor point, relation, values)."""
    lines = [
        f"Step accuracies (mode: {report.mode})",
        f"  {'step':<34}{'accuracy':>12}",
        f"  {'Extraction recall':<34}{_fmt_pct(report.extraction_recall):>12}",
        f"  {'Anchor point':<34}{_fmt_pct(report.anchor_point_accuracy):>12}",
    ]
    for label, (count, acc) in report.anchor_point_by_label.items():
        lines.append(f"    {label + f' ({count})':<32}{_fmt_pct(acc):>12}")
    lines.append(f"  {'Anchor relation':<34}{_fmt_pct(report.anchor_relation_accuracy):>12}")
    for rel, (count, acc) in report.anchor_relation_by_label.items():
        lines.append(f"    {rel + f' ({count})':<32}{_fmt_pct(acc):>12}")
    lines.append(
        f"  {'Normalization (strict)':<34}{_fmt_pct(report.normalization_accuracy_strict):>12}"
    )
    lines.append(
        f"  {'Normalization (relaxed)':<34}{_fmt_pct(report.normalization_accuracy_relaxed):>12}"
    )
    return "\n".join(lines) + "\n"


def render_value_table(report: EvalReport) -> str:
    """End-to-end extraction/value score table."""
    lines = [
        f"End-to-end value scores (mode: {report.mode})",
        f"  {'extraction recall':<22}{'value accuracy':<18}{'value recall':<16}",
        f"  {_fmt_pct(report.extraction_recall):<22}"
        f"{_fmt_pct(report.value_accuracy):<18}"
        f"{_fmt_pct(report.value_recall):<16}",
    ]
    return "\n".join(lines) + "\n"


def render_ablation_table(rows: Sequence[AblationRow]) -> str:
    header_labels = [label.value for label in ANCHOR_POINT_PREFERENCE] + [
        rel.value for rel in RELATION_PREFERENCE
    ]
    col = 26
    lines = ["Feature-set ablation (held-out per-class accuracy)"]
    lines.append("  " + "feature sets".ljust(col) + "".join(f"{h[:12]:>14}" for h in header_labels))
    for row in rows:
        cells = []
        for label in ANCHOR_POINT_PREFERENCE:
            cells.append(_fmt_pct(row.anchor_by_label[label.value][1]))
        for rel in RELATION_PREFERENCE:
            cells.append(_fmt_pct(row.relation_by_label[rel.value][1]))
        name = "+".join(row.feature_sets)
        lines.append("  " + name.ljust(col) + "".join(f"{c:>14}" for c in cells))
    return "\n".join(lines) + "\n"
