"""Chunking, summarization, vector index build/search, and persistence."""
from __future__ import annotations

import numpy as np
import pytest

from papertab.errors import StorageError, UsageError
from papertab.gateway import Gateway, GatewayConfig, MockProvider, mock_gateway
from papertab.ingest import DocumentBundle, FigureInsight, StructuredTable, TextSnippet
from papertab.index import (
    ContentChunk,
    VectorIndex,
    build_index,
    chunks_from_bundle,
    load_index,
    retrieve,
    retrieve_grounding,
    save_index,
    serialize_table,
    summarize_chunk,
    summarize_chunks,
)


def brute_force_topk(matrix: np.ndarray, ids: list[str], query: np.ndarray, k: int):
    """Independent oracle: exhaustive cosine scan with the contract tie-break."""
    scored = []
    qn = np.linalg.norm(query)
    for i, chunk_id in enumerate(ids):
        denom = np.linalg.norm(matrix[i]) * qn
        score = float(np.dot(matrix[i], query) / denom) if denom > 1e-12 else 0.0
        scored.append((score, chunk_id))
    scored.sort(key=lambda t: (-t[0], t[1]))
    return scored[:k]


def make_index(matrix: np.ndarray, prefix: str = "c") -> VectorIndex:
    n = matrix.shape[0]
    ids = [f"{prefix}{i:04d}" for i in range(n)]
    return VectorIndex("coll", ids, ["d1"] * n, ["text"] * n, matrix)


# -- chunk construction ------------------------------------------------------

def test_chunks_from_bundle_kinds_and_ids():
    bundle = DocumentBundle(
        doc_id="d1",
        snippets=[TextSnippet("s1", "some text", None, (0, 9))],
        tables=[StructuredTable("t1", "Caption here", ["A", "B"], [["1", "2"]])],
        figures=[FigureInsight("f1", "Fig cap", "insight text")],
        unparsed_tables=["raw | table | text"],
    )
    chunks = chunks_from_bundle(bundle)
    by_kind = {}
    for c in chunks:
        by_kind.setdefault(c.kind, []).append(c)
    assert len(by_kind["text"]) == 2  # snippet + unparsed table region
    assert len(by_kind["table"]) == 1
    assert len(by_kind["figure"]) == 1
    assert len({c.chunk_id for c in chunks}) == len(chunks)
    assert all(c.doc_id == "d1" for c in chunks)


def test_serialize_table_caption_then_quoted_csv():
    table = StructuredTable("t1", "Tbl 2. Things", ["A", "B"], [["1", "x,y"]])
    text = serialize_table(table)
    assert text.splitlines()[0] == "Tbl 2. Things"
    assert '"A","B"' in text
    assert '"1","x,y"' in text


def test_figure_chunk_includes_caption_and_insight():
    bundle = DocumentBundle(
        doc_id="d",
        figures=[FigureInsight("f1", "The caption", "The insight")],
    )
    chunk = chunks_from_bundle(bundle)[0]
    assert "The caption" in chunk.raw_content
    assert "The insight" in chunk.raw_content


# -- summarization -----------------------------------------------------------

def test_summarize_chunk_passthrough():
    provider = MockProvider()
    gw = Gateway(provider)
    provider.respond("Summarize the following table", "Table of nutrient retention by crop")
    summary, degraded = summarize_chunk(gw, "raw table content", "table")
    assert summary == "Table of nutrient retention by crop"
    assert degraded is False


def test_summarize_chunk_gateway_down_falls_back():
    provider = MockProvider()
    provider.down = True
    gw = Gateway(provider, GatewayConfig(retries=0, backoff=0.0))
    raw = "y" * 1200
    summary, degraded = summarize_chunk(gw, raw, "text")
    assert summary == raw[:600]
    assert degraded is True


def test_summarize_chunk_empty_rejected():
    with pytest.raises(UsageError):
        summarize_chunk(mock_gateway(), "", "text")


def test_summarize_chunks_fills_in_place():
    gw = mock_gateway()
    chunks = [
        ContentChunk("c1", "d1", "text", "alpha content"),
        ContentChunk("c2", "d1", "text", "beta content"),
    ]
    summarize_chunks(gw, chunks)
    assert all(c.summary for c in chunks)
    assert all(len(c.summary) <= 600 for c in chunks)


# -- index build -------------------------------------------------------------

def test_build_index_empty():
    index = build_index(mock_gateway(), "coll", [])
    assert len(index) == 0
    assert index.search(np.ones(4), 5) == []


def test_build_index_entries_and_dimension():
    gw = mock_gateway()
    chunks = [
        ContentChunk(f"c{i}", "d1", "text", f"content {i}", summary=f"summary {i}")
        for i in range(5)
    ]
    index = build_index(gw, "coll", chunks)
    assert len(index) == 5
    assert index.dimension == 64
    assert all(c.vector is not None for c in chunks)


def test_build_index_requires_summaries():
    chunks = [ContentChunk("c1", "d1", "text", "raw")]
    with pytest.raises(UsageError):
        build_index(mock_gateway(), "coll", chunks)


def test_build_index_idempotent_with_cache(tmp_path):
    provider = MockProvider()
    gw = Gateway(provider, GatewayConfig(cache_dir=str(tmp_path)))
    chunks = [
        ContentChunk(f"c{i}", "d1", "text", f"content {i}", summary=f"summary {i}")
        for i in range(4)
    ]
    index1 = build_index(gw, "coll", chunks)
    n = provider.embed_calls
    index2 = build_index(gw, "coll", chunks)
    assert provider.embed_calls == n
    assert np.array_equal(index1.matrix, index2.matrix)


def test_duplicate_chunk_ids_rejected():
    with pytest.raises(UsageError):
        VectorIndex("c", ["a", "a"], ["d", "d"], ["text", "text"], np.eye(2))


# -- retrieval ---------------------------------------------------------------

def test_identical_vector_ranks_first_with_score_one():
    rng = np.random.default_rng(0)
    matrix = rng.standard_normal((20, 8))
    matrix /= np.linalg.norm(matrix, axis=1, keepdims=True)
    index = make_index(matrix)
    hits = index.search(matrix[7].copy(), 3)
    assert hits[0].chunk_id == "c0007"
    assert hits[0].score == pytest.approx(1.0, abs=1e-9)
    assert hits[0].rank == 1


def test_retrieve_matches_brute_force_oracle():
    rng = np.random.default_rng(42)
    for trial in range(20):
        n = int(rng.integers(1, 120))
        d = int(rng.integers(2, 32))
        matrix = rng.standard_normal((n, d))
        query = rng.standard_normal(d)
        index = make_index(matrix)
        for k in (1, 5, 10):
            hits = index.search(query, k)
            oracle = brute_force_topk(matrix, index.chunk_ids, query, k)
            assert len(hits) == min(k, n)
            for hit, (score, chunk_id) in zip(hits, oracle):
                assert hit.chunk_id == chunk_id
                assert abs(hit.score - score) < 1e-9


def test_tie_break_by_chunk_id_ascending():
    v = np.ones((4, 3)) / np.sqrt(3)
    index = VectorIndex("c", ["z", "a", "m", "b"], ["d"] * 4, ["text"] * 4, v)
    hits = index.search(np.ones(3), 4)
    assert [h.chunk_id for h in hits] == ["a", "b", "m", "z"]


def test_k_clamped_to_index_size():
    rng = np.random.default_rng(1)
    matrix = rng.standard_normal((7, 4))
    index = make_index(matrix)
    assert len(index.search(np.ones(4), 50)) == 7


def test_k_nonpositive_is_usage_error():
    index = make_index(np.eye(3))
    with pytest.raises(UsageError):
        index.search(np.ones(3), 0)


def test_filter_by_doc_and_kind():
    matrix = np.eye(4)
    index = VectorIndex(
        "c",
        ["c1", "c2", "c3", "c4"],
        ["d1", "d1", "d2", "d2"],
        ["text", "table", "text", "table"],
        matrix,
    )
    q = np.ones(4)
    assert {h.chunk_id for h in index.search(q, 10, doc_id="d1")} == {"c1", "c2"}
    assert {h.chunk_id for h in index.search(q, 10, kind="table")} == {"c2", "c4"}
    assert [h.chunk_id for h in index.search(q, 10, doc_id="d2", kind="table")] == ["c4"]


def test_scores_bounded():
    rng = np.random.default_rng(3)
    matrix = rng.standard_normal((50, 6)) * 10
    index = make_index(matrix)
    hits = index.search(rng.standard_normal(6), 50)
    for h in hits:
        assert -1.0 - 1e-9 <= h.score <= 1.0 + 1e-9
    scores = [h.score for h in hits]
    assert scores == sorted(scores, reverse=True)


def test_retrieve_embeds_question():
    gw = mock_gateway()
    chunks = [
        ContentChunk("c1", "d1", "text", "alpha", summary="alpha"),
        ContentChunk("c2", "d1", "text", "beta", summary="beta"),
    ]
    index = build_index(gw, "coll", chunks)
    hits = retrieve(gw, index, "alpha", k=1)
    assert hits[0].chunk_id == "c1"
    assert hits[0].score == pytest.approx(1.0, abs=1e-9)


def test_retrieve_grounding_table_quota():
    gw = mock_gateway()
    provider = gw.provider
    # craft vectors so text chunks dominate the plain top-k and tables lag
    q = np.zeros(8)
    q[0] = 1.0
    provider.embed_overrides["the question"] = q
    chunks = []
    vecs = {}
    for i in range(6):
        v = np.zeros(8)
        v[0] = 1.0
        v[1] = 0.01 * (i + 1)
        vecs[f"text summary {i}"] = v
        chunks.append(
            ContentChunk(f"c-text-{i}", "d1", "text", f"text {i}", summary=f"text summary {i}")
        )
    for i in range(3):
        v = np.zeros(8)
        v[7 - i] = 1.0
        vecs[f"table summary {i}"] = v
        chunks.append(
            ContentChunk(f"c-table-{i}", "d1", "table", f"table {i}", summary=f"table summary {i}")
        )
    provider.embed_overrides.update(vecs)
    index = build_index(gw, "coll", chunks)
    hits = retrieve_grounding(gw, index, "the question", "d1", k=4)
    table_hits = [h for h in hits if h.chunk_id.startswith("c-table-")]
    assert len(hits) == 4
    assert len(table_hits) >= 2
    scores = [h.score for h in hits]
    assert scores == sorted(scores, reverse=True)
    assert [h.rank for h in hits] == [1, 2, 3, 4]


def test_retrieve_grounding_without_tables_is_plain_topk():
    gw = mock_gateway()
    chunks = [
        ContentChunk(f"c{i}", "d1", "text", f"body {i}", summary=f"body {i}")
        for i in range(5)
    ]
    index = build_index(gw, "coll", chunks)
    hits = retrieve_grounding(gw, index, "body 3", "d1", k=3)
    assert len(hits) == 3


def test_retrieve_grounding_filters_other_docs():
    gw = mock_gateway()
    chunks = [
        ContentChunk("a1", "d1", "text", "x", summary="sum a"),
        ContentChunk("b1", "d2", "text", "y", summary="sum b"),
    ]
    index = build_index(gw, "coll", chunks)
    hits = retrieve_grounding(gw, index, "anything", "d2", k=5)
    assert [h.chunk_id for h in hits] == ["b1"]


# -- persistence -------------------------------------------------------------

def test_save_load_round_trip(tmp_path):
    gw = mock_gateway()
    chunks = [
        ContentChunk("c1", "d1", "text", "alpha raw", summary="alpha"),
        ContentChunk("c2", "d2", "table", "beta raw", summary="beta"),
    ]
    index = build_index(gw, "coll-9", chunks)
    save_index(tmp_path / "idx", index, chunks)
    loaded, loaded_chunks = load_index(tmp_path / "idx")
    assert loaded.collection_id == "coll-9"
    assert loaded.chunk_ids == ["c1", "c2"]
    assert loaded.kinds == ["text", "table"]
    assert np.allclose(loaded.matrix, index.matrix)
    assert [c.raw_content for c in loaded_chunks] == ["alpha raw", "beta raw"]
    hits = loaded.search(index.matrix[0], 1)
    assert hits[0].chunk_id == "c1"


def test_load_version_mismatch(tmp_path):
    gw = mock_gateway()
    chunks = [ContentChunk("c1", "d1", "text", "alpha", summary="alpha")]
    index = build_index(gw, "coll", chunks)
    save_index(tmp_path / "idx", index, chunks)
    meta_path = tmp_path / "idx" / "index_meta.json"
    meta = meta_path.read_text().replace('"format_version": 1', '"format_version": 99')
    meta_path.write_text(meta)
    with pytest.raises(StorageError):
        load_index(tmp_path / "idx")


def test_load_missing_directory(tmp_path):
    with pytest.raises(StorageError):
        load_index(tmp_path / "nope")
