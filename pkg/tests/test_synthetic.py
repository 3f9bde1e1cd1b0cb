"""Generator contracts: determinism, gold self-consistency, distributions."""

import pytest

from timexanchor.corpus import write_canonical
from timexanchor.features import FeatureConfig
from timexanchor.model import AnchorPointLabel, AnchorRelation
from timexanchor.pipeline import normalize_document
from timexanchor.spans import SpanFamily, is_absolute, parse_span
from timexanchor.synthetic import SyntheticConfig, SyntheticError, generate_synthetic


def small_config(**kwargs):
    base = dict(document_count=25, ri_per_document=(6, 10), seed=11)
    base.update(kwargs)
    return SyntheticConfig(**base)


def test_same_seed_byte_identical():
    a = generate_synthetic(small_config())
    b = generate_synthetic(small_config())
    assert [write_canonical(x) for x in a] == [write_canonical(y) for y in b]


def test_different_seeds_differ():
    a = generate_synthetic(small_config(seed=11))
    b = generate_synthetic(small_config(seed=12))
    assert [write_canonical(x) for x in a] != [write_canonical(y) for y in b]


def test_every_ri_has_gold_and_parses():
    for doc in generate_synthetic(small_config()):
        ri_ids = {m.id for m in doc.ri_timexes()}
        assert ri_ids == set(doc.gold_anchors)
        for mention in doc.ri_timexes():
            assert not is_absolute(mention.text)
            assert parse_span(mention.text).family is not SpanFamily.UNPARSEABLE


def test_gold_values_are_full_dates():
    for doc in generate_synthetic(small_config()):
        for gold in doc.gold_anchors.values():
            assert gold.value.is_full


def test_generator_self_consistency_oracle_mode():
    config = FeatureConfig()
    for doc in generate_synthetic(small_config()):
        for result in normalize_document(doc, None, config, oracle_mode=True):
            assert result.value == doc.gold_anchors[result.mention_id].value


def test_relation_frequencies_converge():
    docs = generate_synthetic(SyntheticConfig(document_count=200, seed=42))
    counts = {rel: 0 for rel in AnchorRelation}
    total = 0
    for doc in docs:
        for gold in doc.gold_anchors.values():
            counts[gold.relation] += 1
            total += 1
    shares = {rel: counts[rel] / total for rel in AnchorRelation}
    assert abs(shares[AnchorRelation.BEFORE] - 0.11) <= 0.03
    assert abs(shares[AnchorRelation.AFTER] - 0.46) <= 0.03
    assert abs(shares[AnchorRelation.EQUAL_DURING] - 0.41) <= 0.03


def test_degenerate_relation_distribution():
    config = small_config(
        relation_probs={
            AnchorRelation.BEFORE: 1.0,
            AnchorRelation.AFTER: 0.0,
            AnchorRelation.EQUAL_DURING: 0.0,
        }
    )
    for doc in generate_synthetic(config):
        for gold in doc.gold_anchors.values():
            assert gold.relation is AnchorRelation.BEFORE


def test_degenerate_anchor_distribution():
    config = small_config(
        anchor_probs={
            AnchorPointLabel.ADMISSION: 1.0,
            AnchorPointLabel.DISCHARGE: 0.0,
            AnchorPointLabel.PREVIOUS_TIMEX: 0.0,
            AnchorPointLabel.PREVIOUS_ABSOLUTE_TIMEX: 0.0,
        }
    )
    for doc in generate_synthetic(config):
        for gold in doc.gold_anchors.values():
            assert gold.anchor_points == frozenset({AnchorPointLabel.ADMISSION})


def test_infeasible_anchor_marginals():
    with pytest.raises(SyntheticError, match="infeasible"):
        generate_synthetic(
            small_config(
                anchor_probs={
                    AnchorPointLabel.ADMISSION: 0.0,
                    AnchorPointLabel.DISCHARGE: 0.0,
                    AnchorPointLabel.PREVIOUS_TIMEX: 0.5,
                    AnchorPointLabel.PREVIOUS_ABSOLUTE_TIMEX: 0.0,
                }
            )
        )


def test_invalid_configs_rejected():
    with pytest.raises(SyntheticError):
        SyntheticConfig(document_count=0)
    with pytest.raises(SyntheticError):
        SyntheticConfig(ri_per_document=(5, 3))
    with pytest.raises(SyntheticError):
        SyntheticConfig(
            relation_probs={
                AnchorRelation.BEFORE: 0.5,
                AnchorRelation.AFTER: 0.5,
                AnchorRelation.EQUAL_DURING: 0.5,
            }
        )
    with pytest.raises(SyntheticError):
        SyntheticConfig(
            anchor_probs={
                AnchorPointLabel.ADMISSION: 1.5,
                AnchorPointLabel.DISCHARGE: 0.1,
                AnchorPointLabel.PREVIOUS_TIMEX: 0.1,
                AnchorPointLabel.PREVIOUS_ABSOLUTE_TIMEX: 0.1,
            }
        )


def test_documents_have_both_sections_and_sectimes():
    for doc in generate_synthetic(small_config()):
        kinds = {s.kind for s in doc.sections}
        assert len(kinds) == 2
        for section in doc.sections:
            assert section.sectime.value.is_full


def test_corpus_includes_duration_or_frequency_mentions():
    docs = generate_synthetic(SyntheticConfig(document_count=40, seed=3))
    decorated = [
        m for doc in docs for m in doc.timexes if m.ttype.value in ("DURATION", "FREQUENCY")
    ]
    assert decorated, "decoration mentions should appear in a 40-document corpus"
    assert all(m.id not in (doc.gold_anchors or {}) for doc in docs for m in decorated)
