"""Quality metrics: judge-based scores, missingness, inconsistency, flags."""
from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from papertab.errors import UsageError
from papertab.extract import EMPTY, CellValue, DataRecord
from papertab.gateway import Gateway, GatewayConfig, MockProvider, mock_gateway
from papertab.quality import (
    QualityScores,
    QualityThresholds,
    answer_relevancy,
    column_inconsistency,
    context_relevancy,
    faithfulness,
    flag_records,
    inconsistency,
    missingness,
    record_answer_text,
    score_record,
    split_sentences,
    table_quality,
)


def _record(doc_id: str, cells: dict) -> DataRecord:
    return DataRecord(doc_id=doc_id, cells=cells)


# -- answer relevancy --------------------------------------------------------

def test_answer_relevancy_identical_questions_is_one():
    provider = MockProvider()
    gw = Gateway(provider)
    prompt = gw.render(
        "question_reconstruction", {"answer": "model: BERT", "count": "3"}
    )
    provider.respond_digest(
        prompt, json.dumps({"questions": ["What model?", "What model?", "What model?"]})
    )
    score = answer_relevancy(gw, "What model?", "model: BERT")
    assert score == pytest.approx(1.0, abs=1e-9)


def test_answer_relevancy_mean_cosine_oracle():
    provider = MockProvider()
    gw = Gateway(provider)
    prompt = gw.render("question_reconstruction", {"answer": "a: v", "count": "3"})
    provider.respond_digest(
        prompt, json.dumps({"questions": ["RQ1", "RQ2", "RQ3"]})
    )

    def unit_with_cosine(c: float) -> np.ndarray:
        v = np.zeros(8)
        v[0] = c
        v[1] = np.sqrt(1.0 - c * c)
        return v

    q = np.zeros(8)
    q[0] = 1.0
    provider.embed_overrides["the original question"] = q
    provider.embed_overrides["RQ1"] = unit_with_cosine(0.9)
    provider.embed_overrides["RQ2"] = unit_with_cosine(0.8)
    provider.embed_overrides["RQ3"] = unit_with_cosine(0.7)

    score = answer_relevancy(gw, "the original question", "a: v")
    assert score == pytest.approx(0.8, abs=1e-9)


def test_answer_relevancy_clamped_at_zero():
    provider = MockProvider()
    gw = Gateway(provider)
    prompt = gw.render("question_reconstruction", {"answer": "a: v", "count": "3"})
    provider.respond_digest(prompt, json.dumps({"questions": ["opposite"]}))
    q = np.zeros(4)
    q[0] = 1.0
    provider.embed_overrides["q"] = q
    provider.embed_overrides["opposite"] = -q
    assert answer_relevancy(gw, "q", "a: v") == 0.0


def test_answer_relevancy_gateway_down_absent():
    provider = MockProvider()
    provider.down = True
    gw = Gateway(provider, GatewayConfig(retries=0, backoff=0.0))
    assert answer_relevancy(gw, "q", "a: v") is None


def test_answer_relevancy_empty_answer_rejected():
    with pytest.raises(UsageError):
        answer_relevancy(mock_gateway(), "q", "  ")


# -- context relevancy -------------------------------------------------------

def _relevance_gateway(n_sentences: int, marked: list[int]):
    provider = MockProvider()
    gw = Gateway(provider)
    provider.respond(
        f"Below are {n_sentences} numbered sentences",
        json.dumps({"relevant_indices": marked}),
    )
    return gw


def test_context_relevancy_half():
    contexts = ["One. Two. Three. Four.", "Five. Six. Seven. Eight."]
    gw = _relevance_gateway(8, [0, 1, 2, 3])
    assert context_relevancy(gw, "q", contexts) == pytest.approx(0.5)


def test_context_relevancy_none_marked():
    gw = _relevance_gateway(2, [])
    assert context_relevancy(gw, "q", ["One. Two."]) == 0.0


def test_context_relevancy_all_marked():
    gw = mock_gateway()  # fallback marks every sentence
    assert context_relevancy(gw, "q", ["One. Two.", "Three."]) == 1.0


def test_context_relevancy_ignores_out_of_range_and_duplicates():
    gw = _relevance_gateway(2, [0, 0, 7, -3])
    assert context_relevancy(gw, "q", ["One. Two."]) == pytest.approx(0.5)


def test_context_relevancy_empty_contexts_rejected():
    with pytest.raises(UsageError):
        context_relevancy(mock_gateway(), "q", [])


def test_context_relevancy_judge_down_absent():
    provider = MockProvider()
    provider.down = True
    gw = Gateway(provider, GatewayConfig(retries=0, backoff=0.0))
    assert context_relevancy(gw, "q", ["One."]) is None


def test_split_sentences():
    assert split_sentences("One. Two! Three?") == ["One.", "Two!", "Three?"]
    assert split_sentences("line one\nline two") == ["line one", "line two"]
    assert split_sentences("   ") == []


# -- faithfulness ------------------------------------------------------------

def _faithfulness_gateway(claims: list[str], verdicts: list[bool]):
    provider = MockProvider()
    gw = Gateway(provider)
    provider.respond(
        "Decompose the following answer", json.dumps({"claims": claims})
    )
    provider.respond(
        f"Below are {len(claims)} numbered claims",
        json.dumps({"supported": verdicts}),
    )
    return gw


def test_faithfulness_all_supported():
    gw = _faithfulness_gateway(["c1", "c2", "c3"], [True, True, True])
    assert faithfulness(gw, "a: v", ["ctx"]) == 1.0


def test_faithfulness_one_third():
    gw = _faithfulness_gateway(["c1", "c2", "c3"], [True, False, False])
    assert faithfulness(gw, "a: v", ["ctx"]) == pytest.approx(1 / 3)


def test_faithfulness_no_claims_absent():
    provider = MockProvider()
    gw = Gateway(provider)
    provider.respond("Decompose the following answer", json.dumps({"claims": []}))
    assert faithfulness(gw, "a: v", ["ctx"]) is None


def test_faithfulness_verdict_mismatch_absent():
    gw = _faithfulness_gateway(["c1", "c2"], [True])
    assert faithfulness(gw, "a: v", ["ctx"]) is None


def test_faithfulness_judge_down_absent():
    provider = MockProvider()
    provider.down = True
    gw = Gateway(provider, GatewayConfig(retries=0, backoff=0.0))
    assert faithfulness(gw, "a: v", ["ctx"]) is None


# -- missingness -------------------------------------------------------------

def test_missingness_examples():
    full = [_record("d", {c: CellValue("x") for c in "abcd"}) for _ in range(3)]
    assert missingness(full) == 0.0
    empty = [_record("d", {c: EMPTY for c in "abcd"}) for _ in range(3)]
    assert missingness(empty) == 1.0
    mixed = [_record("d", {c: CellValue("x") for c in "abcd"}) for _ in range(3)]
    mixed[0].cells["a"] = EMPTY
    mixed[1].cells["b"] = EMPTY
    mixed[2].cells["c"] = EMPTY
    assert missingness(mixed) == pytest.approx(0.25)


def test_missingness_empty_table_rejected():
    with pytest.raises(UsageError):
        missingness([])


@settings(max_examples=80, deadline=None)
@given(
    st.lists(
        st.lists(st.booleans(), min_size=1, max_size=8),
        min_size=1,
        max_size=50,
    ).filter(lambda rows: len({len(r) for r in rows}) == 1)
)
def test_missingness_matches_recount(rows):
    records = [
        _record(
            f"d{i}",
            {f"c{j}": (EMPTY if flag else CellValue("v")) for j, flag in enumerate(row)},
        )
        for i, row in enumerate(rows)
    ]
    expected = sum(sum(1 for f in row if f) for row in rows) / sum(len(r) for r in rows)
    assert missingness(records) == pytest.approx(expected, abs=1e-12)


# -- inconsistency -----------------------------------------------------------

def test_inconsistency_examples():
    assert inconsistency(["OFSP", "OFSP", "OFSP"]) == pytest.approx(1 / 3)
    assert inconsistency(["a", "b", "c"]) == 1.0
    assert inconsistency(["µg/g", "mg/100g", "µg/g", "mg/100g"]) == pytest.approx(0.5)


def test_inconsistency_trim_and_casefold():
    assert inconsistency([" OFSP ", "ofsp", "OFSP"]) == pytest.approx(1 / 3)


def test_inconsistency_empty_rejected():
    with pytest.raises(UsageError):
        inconsistency([])


def test_column_inconsistency_skips_empty_and_absent_column():
    records = [
        _record("d1", {"crop": CellValue("OFSP")}),
        _record("d2", {"crop": EMPTY}),
        _record("d3", {"crop": CellValue("ofsp")}),
    ]
    assert column_inconsistency(records, "crop") == pytest.approx(0.5)
    all_empty = [_record("d1", {"crop": EMPTY})]
    assert column_inconsistency(all_empty, "crop") is None


@settings(max_examples=60, deadline=None)
@given(st.lists(st.text(min_size=0, max_size=6), min_size=1, max_size=40))
def test_inconsistency_bounds_property(values):
    score = inconsistency(values)
    n = len(values)
    assert 0 < score <= 1.0
    distinct = len({v.strip().casefold() for v in values})
    assert score == pytest.approx(distinct / n)
    if distinct == 1:
        assert score == pytest.approx(1 / n)
    if distinct == n:
        assert score == 1.0


# -- record serialization and scoring ---------------------------------------

def test_record_answer_text_includes_empty_marker():
    record = _record("d", {"name": CellValue("BERT"), "acc": EMPTY})
    assert record_answer_text(record) == "name: BERT; acc: Empty"


def test_score_record_all_empty_gets_no_scores():
    record = _record("d", {"a": EMPTY, "b": EMPTY})
    scores = score_record(mock_gateway(), "q", record, ["some context"])
    assert scores.answer_relevancy is None
    assert scores.context_relevancy is None
    assert scores.faithfulness is None


def test_score_record_with_mock_defaults():
    record = _record("d", {"a": CellValue("value")})
    scores = score_record(mock_gateway(), "q", record, ["A sentence. Another."])
    assert scores.context_relevancy == 1.0
    assert scores.faithfulness == 1.0
    assert scores.answer_relevancy is not None
    assert 0.0 <= scores.answer_relevancy <= 1.0


# -- flagging ----------------------------------------------------------------

def test_flags_good_record_unflagged():
    record = _record("d", {"a": CellValue("x")})
    record.quality = QualityScores(0.95, 0.95, 0.95)
    flag_records([record])
    assert record.flags == set()


def test_flags_low_relevance_threshold():
    record = _record("d", {"a": CellValue("x")})
    record.quality = QualityScores(0.9, 0.2, 0.9)
    flag_records([record])
    assert "low_relevance" in record.flags
    flag_records([record], QualityThresholds(context_relevancy=0.1))
    assert "low_relevance" not in record.flags


def test_flags_empty_cells():
    record = _record("d", {"a": EMPTY, "b": CellValue("x")})
    flag_records([record])
    assert "empty_cells" in record.flags


def test_flags_absent_scores_do_not_flag():
    record = _record("d", {"a": CellValue("x")})
    record.quality = QualityScores(None, None, None)
    flag_records([record])
    assert "low_relevance" not in record.flags


def test_flag_determinism():
    def build():
        r = _record("d", {"a": CellValue("x"), "b": EMPTY})
        r.quality = QualityScores(0.4, 0.9, None)
        flag_records([r])
        return set(r.flags)

    assert build() == build() == {"empty_cells", "low_relevance"}


def test_flags_preserve_other_flags():
    record = _record("d", {"a": CellValue("x")})
    record.flags.add("unverified_span")
    flag_records([record])
    assert "unverified_span" in record.flags


# -- table rollup ------------------------------------------------------------

def test_table_quality_rollup():
    records = [
        _record("d1", {"crop": CellValue("OFSP"), "val": CellValue("1")}),
        _record("d2", {"crop": CellValue("ofsp"), "val": EMPTY}),
    ]
    records[0].quality = QualityScores(0.9, 0.8, 0.7)
    tq = table_quality(records, ["crop", "val"])
    assert tq.missingness == pytest.approx(0.25)
    assert tq.column_inconsistency["crop"] == pytest.approx(0.5)
    assert tq.column_inconsistency["val"] == 1.0
    assert len(tq.record_scores) == 2
    assert tq.record_scores[0].answer_relevancy == pytest.approx(0.9)
    data = tq.to_dict()
    assert data["thresholds"]["faithfulness"] == 0.5
