"""Document invariants, XML dialect reading, and canonical JSON round trips."""

import json

import pytest

from conftest import build_figure_document
from timexanchor.corpus import (
    CorpusError,
    Document,
    SchemaError,
    read_canonical,
    read_i2b2_xml,
    write_canonical,
    write_gold_sidecar,
    write_i2b2_xml,
)
from timexanchor.model import AnchorPointLabel, SectionKind, TimexType


def test_figure_xml_round_trip_mentions(figure_document):
    doc = read_i2b2_xml(write_i2b2_xml(figure_document), write_gold_sidecar(figure_document))
    assert [m.text for m in doc.timexes] == [
        "2017-04-26",
        "the next day",
        "postoperative day two",
        "postoperative day number three",
    ]
    assert all(m.ttype is TimexType.DATE for m in doc.timexes)
    assert doc == figure_document


def test_reader_sets_absoluteness_from_surface(figure_document):
    doc = read_i2b2_xml(write_i2b2_xml(figure_document))
    flags = {m.text: m.is_absolute for m in doc.timexes}
    assert flags["2017-04-26"] is True
    assert flags["the next day"] is False
    assert doc.gold_anchors is None


def test_reader_accepts_empty_timex_list(figure_document):
    xml = write_i2b2_xml(figure_document).decode("utf-8")
    for mention in figure_document.timexes:
        needle = f'id="{mention.id}"'
        start = xml.index("<TIMEX3 " + needle)
        end = xml.index("/>", start) + 2
        xml = xml[:start] + xml[end:]
    doc = read_i2b2_xml(xml.encode("utf-8"))
    assert doc.timexes == []
    assert len(doc.sections) == 2


def test_reader_rejects_span_text_mismatch(figure_document):
    xml = write_i2b2_xml(figure_document).decode("utf-8")
    xml = xml.replace('text="the next day"', 'text="the wrong day"')
    with pytest.raises(CorpusError, match="T1"):
        read_i2b2_xml(xml.encode("utf-8"))


def test_reader_rejects_unknown_elements(figure_document):
    xml = write_i2b2_xml(figure_document).decode("utf-8")
    xml = xml.replace("</TAGS>", '<SURPRISE id="X0"/></TAGS>')
    with pytest.raises(CorpusError, match="SURPRISE"):
        read_i2b2_xml(xml.encode("utf-8"))


def test_reader_skips_tlink_elements(figure_document):
    xml = write_i2b2_xml(figure_document).decode("utf-8")
    xml = xml.replace("</TAGS>", '<TLINK id="L0" fromID="T1" toID="T0" type="AFTER"/></TAGS>')
    doc = read_i2b2_xml(xml.encode("utf-8"))
    assert len(doc.timexes) == 4


def test_reader_rejects_unknown_attributes(figure_document):
    xml = write_i2b2_xml(figure_document).decode("utf-8")
    xml = xml.replace('<TIMEX3 id="T1"', '<TIMEX3 id="T1" mood="festive"')
    with pytest.raises(CorpusError, match="mood"):
        read_i2b2_xml(xml.encode("utf-8"))


def test_reader_rejects_missing_sectime(figure_document):
    xml = write_i2b2_xml(figure_document).decode("utf-8")
    while "<SECTIME" in xml:
        start = xml.index("<SECTIME")
        end = xml.index("/>", start) + 2
        xml = xml[:start] + xml[end:]
    with pytest.raises(CorpusError, match="SECTIME"):
        read_i2b2_xml(xml.encode("utf-8"))


def test_reader_rejects_malformed_xml():
    with pytest.raises(CorpusError, match="malformed XML"):
        read_i2b2_xml(b"<ClinicalDocument id='x'><TEXT>")


def test_gold_sidecar_document_id_mismatch(figure_document):
    sidecar = json.loads(write_gold_sidecar(figure_document))
    sidecar["id"] = "someone-else"
    with pytest.raises(CorpusError, match="someone-else"):
        read_i2b2_xml(write_i2b2_xml(figure_document), json.dumps(sidecar).encode())


def test_gold_sidecar_unknown_mention(figure_document):
    sidecar = json.loads(write_gold_sidecar(figure_document))
    sidecar["anchors"]["T99"] = sidecar["anchors"]["T1"]
    with pytest.raises(CorpusError, match="T99"):
        read_i2b2_xml(write_i2b2_xml(figure_document), json.dumps(sidecar).encode())


def test_canonical_round_trip_bytes(figure_document):
    data = write_canonical(figure_document)
    again = write_canonical(read_canonical(data))
    assert data == again


def test_canonical_round_trip_document(figure_document):
    doc = read_canonical(write_canonical(figure_document))
    assert doc == figure_document
    assert doc.gold_anchors["T1"].anchor_points == frozenset(
        {AnchorPointLabel.PREVIOUS_TIMEX, AnchorPointLabel.PREVIOUS_ABSOLUTE_TIMEX}
    )


def test_canonical_preserves_gold_block(figure_document):
    payload = json.loads(write_canonical(figure_document))
    assert set(payload["gold_anchors"]) == {"T1", "T2", "T3"}
    assert payload["gold_anchors"]["T2"]["relation"] == "AFTER"


def test_canonical_truncated_file_errors(figure_document):
    data = write_canonical(figure_document)
    with pytest.raises(SchemaError, match="invalid JSON"):
        read_canonical(data[: len(data) // 2])


def test_canonical_missing_key_errors(figure_document):
    payload = json.loads(write_canonical(figure_document))
    del payload["timexes"]
    with pytest.raises(SchemaError, match="timexes"):
        read_canonical(json.dumps(payload).encode())


def test_canonical_reports_field_paths(figure_document):
    payload = json.loads(write_canonical(figure_document))
    payload["timexes"][0]["start"] = "zero"
    with pytest.raises(SchemaError, match=r"timexes\[0\].start"):
        read_canonical(json.dumps(payload).encode())


def test_document_rejects_duplicate_timex_ids(figure_document):
    with pytest.raises(CorpusError, match="duplicate timex id"):
        Document(
            id=figure_document.id,
            text=figure_document.text,
            sections=figure_document.sections,
            timexes=figure_document.timexes + [figure_document.timexes[0]],
            events=[],
        )


def test_document_rejects_gold_for_unknown_mention(figure_document):
    with pytest.raises(CorpusError, match="T42"):
        Document(
            id=figure_document.id,
            text=figure_document.text,
            sections=figure_document.sections,
            timexes=figure_document.timexes,
            events=[],
            gold_anchors={"T42": figure_document.gold_anchors["T1"]},
        )


def test_timexes_sorted_with_tie_break(figure_document):
    rev = Document(
        id=figure_document.id,
        text=figure_document.text,
        sections=figure_document.sections,
        timexes=list(reversed(figure_document.timexes)),
        events=[],
    )
    assert [m.id for m in rev.timexes] == ["T0", "T1", "T2", "T3"]


def test_mentions_assigned_to_sections(figure_document):
    assert all(m.section is SectionKind.CLINICAL_HISTORY for m in figure_document.timexes)
    course = figure_document.section(SectionKind.HOSPITAL_COURSE)
    assert course is not None
    assert course.sectime.text == "2017-05-02"


def test_ri_timexes_excludes_absolute(figure_document):
    assert [m.id for m in figure_document.ri_timexes()] == ["T1", "T2", "T3"]


def test_build_figure_document_is_fresh():
    a, b = build_figure_document(), build_figure_document()
    assert a == b
    assert a is not b
