"""Shared fixtures: the worked-example document and a trained model set."""

from __future__ import annotations

import pytest

from timexanchor.classifiers import TrainingConfig, fit_model_set
from timexanchor.corpus import (
    Document,
    EventMention,
    EventType,
    GoldAnchor,
    Section,
    TimexMention,
)
from timexanchor.features import FeatureConfig
from timexanchor.model import (
    AnchorPointLabel,
    AnchorRelation,
    SectionKind,
    TimexType,
    parse_iso8601,
)
from timexanchor.synthetic import SyntheticConfig, generate_synthetic

FIGURE_TEXT = (
    "The patient was admitted to XXX on 2017-04-26 and underwent a coronary artery "
    "bypass graft times four with left internal mammary artery to left anterior "
    "descending .\n"
    "The patient was weaned the next day from mechanical ventilation .\n"
    "On postoperative day two , the patient 's hematocrit was noted to be 23.1 ; "
    "he was transfused one unit of packed red blood cells as well as given a dose "
    "of Lasix .\n"
    "The Neo-Synephrine was weaned off by postoperative day number three .\n"
    "HOSPITAL COURSE - Discharge Date : 2017-05-02 .\n"
    "The patient was discharged home in stable condition .\n"
)


def _span(needle: str) -> tuple[int, int]:
    start = FIGURE_TEXT.index(needle)
    return start, start + len(needle)


def _timex(mid: str, needle: str, ttype: TimexType, val: str | None,
           absolute: bool, section: SectionKind) -> TimexMention:
    from timexanchor.model import TimexValue

    start, end = _span(needle)
    value = parse_iso8601(val) if val else TimexValue.unresolved()
    return TimexMention(
        id=mid, start=start, end=end, text=needle, ttype=ttype,
        value=value, is_absolute=absolute, section=section,
    )


def build_figure_document() -> Document:
    """The anchoring worked example, encoded with gold anchor annotations."""
    history = SectionKind.CLINICAL_HISTORY
    course = SectionKind.HOSPITAL_COURSE

    t0 = _timex("T0", "2017-04-26", TimexType.DATE, "2017-04-26", True, history)
    t1 = _timex("T1", "the next day", TimexType.DATE, "2017-04-27", False, history)
    t2 = _timex("T2", "postoperative day two", TimexType.DATE, "2017-04-28", False, history)
    t3 = _timex(
        "T3", "postoperative day number three", TimexType.DATE, "2017-04-29", False, history
    )

    course_start = FIGURE_TEXT.index("HOSPITAL COURSE")
    disc_start, disc_end = _span("2017-05-02")
    admission_sectime = TimexMention(
        id="S0", start=t0.start, end=t0.end, text=t0.text, ttype=TimexType.DATE,
        value=t0.value, is_absolute=True, section=history,
    )
    discharge_sectime = TimexMention(
        id="S1", start=disc_start, end=disc_end, text="2017-05-02", ttype=TimexType.DATE,
        value=parse_iso8601("2017-05-02"), is_absolute=True, section=course,
    )

    def event(eid: str, needle: str, etype: EventType) -> EventMention:
        start, end = _span(needle)
        return EventMention(id=eid, start=start, end=end, text=needle, etype=etype)

    both_previous = frozenset(
        {AnchorPointLabel.PREVIOUS_TIMEX, AnchorPointLabel.PREVIOUS_ABSOLUTE_TIMEX}
    )
    previous_absolute = frozenset({AnchorPointLabel.PREVIOUS_ABSOLUTE_TIMEX})
    gold = {
        "T1": GoldAnchor(both_previous, AnchorRelation.AFTER, parse_iso8601("2017-04-27")),
        "T2": GoldAnchor(previous_absolute, AnchorRelation.AFTER, parse_iso8601("2017-04-28")),
        "T3": GoldAnchor(previous_absolute, AnchorRelation.AFTER, parse_iso8601("2017-04-29")),
    }

    return Document(
        id="figure-example",
        text=FIGURE_TEXT,
        sections=[
            Section(history, 0, course_start, admission_sectime),
            Section(course, course_start, len(FIGURE_TEXT), discharge_sectime),
        ],
        timexes=[t0, t1, t2, t3],
        events=[
            event("E0", "coronary artery bypass graft", EventType.TREATMENT),
            event("E1", "mechanical ventilation", EventType.TREATMENT),
            event("E2", "hematocrit", EventType.TEST),
            event("E3", "packed red blood cells", EventType.TREATMENT),
            event("E4", "Lasix", EventType.TREATMENT),
        ],
        gold_anchors=gold,
    )


@pytest.fixture
def figure_document() -> Document:
    return build_figure_document()


@pytest.fixture(scope="session")
def default_feature_config() -> FeatureConfig:
    return FeatureConfig()


@pytest.fixture(scope="session")
def synthetic_corpus() -> list[Document]:
    """The seed-42 default corpus used by the acceptance criteria."""
    return generate_synthetic(SyntheticConfig(document_count=200, seed=42))


@pytest.fixture(scope="session")
def corpus_split(synthetic_corpus):
    return synthetic_corpus[:160], synthetic_corpus[160:]


@pytest.fixture(scope="session")
def trained_models(corpus_split, default_feature_config):
    train_docs, _ = corpus_split
    return fit_model_set(train_docs, default_feature_config, TrainingConfig())
