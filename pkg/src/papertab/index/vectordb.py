"""Exact-search vector index over chunk summaries, with disk persistence."""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .. import kernels
from ..errors import StorageError, UsageError
from ..gateway import Gateway
from .chunks import ContentChunk

LOGGER = logging.getLogger(__name__)

FORMAT_VERSION = 1

DEFAULT_K = 8
MIN_TABLE_HITS = 2


@dataclass
class RetrievalHit:
    chunk_id: str
    score: float
    rank: int


class VectorIndex:
    """Flat cosine index; immutable once built, safe to share across readers."""

    def __init__(
        self,
        collection_id: str,
        chunk_ids: list[str],
        doc_ids: list[str],
        kinds: list[str],
        matrix: np.ndarray,
    ):
        if not (len(chunk_ids) == len(doc_ids) == len(kinds)):
            raise UsageError("index column lists must have equal length")
        if len(set(chunk_ids)) != len(chunk_ids):
            raise UsageError("chunk_ids must be unique within a collection")
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] != len(chunk_ids):
            raise UsageError("matrix must be (n_chunks, dimension)")
        self.collection_id = collection_id
        self.chunk_ids = list(chunk_ids)
        self.doc_ids = list(doc_ids)
        self.kinds = list(kinds)
        self.matrix = matrix
        self._norms = np.linalg.norm(matrix, axis=1) if len(chunk_ids) else np.zeros(0)

    def __len__(self) -> int:
        return len(self.chunk_ids)

    @property
    def dimension(self) -> int:
        return int(self.matrix.shape[1]) if self.matrix.size else 0

    def search(
        self,
        query: np.ndarray,
        k: int,
        doc_id: str | None = None,
        kind: str | None = None,
    ) -> list[RetrievalHit]:
        if k <= 0:
            raise UsageError(f"k must be positive, got {k}")
        if len(self) == 0:
            return []
        mask = np.ones(len(self), dtype=bool)
        if doc_id is not None:
            mask &= np.array([d == doc_id for d in self.doc_ids])
        if kind is not None:
            mask &= np.array([kd == kind for kd in self.kinds])
        idx = np.flatnonzero(mask)
        if idx.size == 0:
            return []

        query = np.asarray(query, dtype=np.float64)
        qnorm = float(np.linalg.norm(query))
        if qnorm < 1e-12:
            raise UsageError("query vector has zero norm")
        sub = np.ascontiguousarray(self.matrix[idx])
        dots = kernels.cosine_scores(sub, query)
        norms = self._norms[idx] * qnorm
        safe = np.where(norms < 1e-12, 1.0, norms)
        scores = dots / safe

        order = sorted(range(idx.size), key=lambda i: (-scores[i], self.chunk_ids[idx[i]]))
        hits = []
        for rank, i in enumerate(order[:k], start=1):
            hits.append(
                RetrievalHit(
                    chunk_id=self.chunk_ids[idx[i]],
                    score=float(scores[i]),
                    rank=rank,
                )
            )
        return hits


def build_index(
    gateway: Gateway, collection_id: str, chunks: list[ContentChunk]
) -> VectorIndex:
    """Embed chunk summaries into a fresh index; identical input → identical index."""
    for chunk in chunks:
        if not chunk.summary:
            raise UsageError(f"chunk {chunk.chunk_id!r} has no summary; summarize first")
    if not chunks:
        return VectorIndex(collection_id, [], [], [], np.zeros((0, 0)))
    vectors = gateway.embed([c.summary for c in chunks])
    matrix = np.vstack(vectors)
    for chunk, vector in zip(chunks, vectors):
        chunk.vector = vector
    return VectorIndex(
        collection_id,
        [c.chunk_id for c in chunks],
        [c.doc_id for c in chunks],
        [c.kind for c in chunks],
        matrix,
    )


def retrieve(
    gateway: Gateway,
    index: VectorIndex,
    question: str,
    k: int = DEFAULT_K,
    doc_id: str | None = None,
    kind: str | None = None,
) -> list[RetrievalHit]:
    """Top-k chunks for a question by cosine over summary embeddings."""
    if not question.strip():
        raise UsageError("question is empty")
    if len(index) == 0:
        return []
    query = gateway.embed([question])[0]
    return index.search(query, k, doc_id=doc_id, kind=kind)


def retrieve_grounding(
    gateway: Gateway,
    index: VectorIndex,
    question: str,
    doc_id: str,
    k: int = DEFAULT_K,
    min_table_hits: int = MIN_TABLE_HITS,
) -> list[RetrievalHit]:
    """Per-document retrieval with a table quota.

    Tables carry the densest evidence, so when the plain top-k underfills on
    table chunks the weakest non-table hits are swapped for the best remaining
    table hits, up to the quota or table availability.
    """
    if len(index) == 0:
        return []
    if not question.strip():
        raise UsageError("question is empty")
    query = gateway.embed([question])[0]
    hits = index.search(query, k, doc_id=doc_id)
    if not hits:
        return []

    kind_of = dict(zip(index.chunk_ids, index.kinds))
    got_tables = sum(1 for h in hits if kind_of[h.chunk_id] == "table")
    table_pool = index.search(query, len(index), doc_id=doc_id, kind="table")
    want = min(min_table_hits, len(table_pool))
    if got_tables < want:
        present = {h.chunk_id for h in hits}
        extras = [h for h in table_pool if h.chunk_id not in present]
        need = want - got_tables
        keep = [h for h in hits if kind_of[h.chunk_id] == "table"]
        others = [h for h in hits if kind_of[h.chunk_id] != "table"]
        # drop the weakest non-table hits to make room
        if need > 0 and len(hits) + need > k:
            drop = min(need, max(0, len(hits) + need - k))
            others = others[: len(others) - drop] if drop <= len(others) else []
        merged = keep + others + extras[:need]
        merged.sort(key=lambda h: (-h.score, h.chunk_id))
        hits = merged[:k]
        for rank, hit in enumerate(hits, start=1):
            hit.rank = rank
    return hits


# -- persistence -------------------------------------------------------------

def save_index(
    directory: str | Path, index: VectorIndex, chunks: list[ContentChunk]
) -> None:
    root = Path(directory)
    root.mkdir(parents=True, exist_ok=True)
    meta = {
        "format_version": FORMAT_VERSION,
        "collection_id": index.collection_id,
        "dimension": index.dimension,
        "count": len(index),
    }
    (root / "index_meta.json").write_text(
        json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    np.save(root / "vectors.npy", index.matrix)
    with open(root / "chunks.jsonl", "w", encoding="utf-8") as fh:
        for chunk in chunks:
            fh.write(json.dumps(chunk.to_record(), sort_keys=True) + "\n")


def load_index(directory: str | Path) -> tuple[VectorIndex, list[ContentChunk]]:
    root = Path(directory)
    meta_path = root / "index_meta.json"
    if not meta_path.is_file():
        raise StorageError(f"no index at {root}")
    meta = json.loads(meta_path.read_text(encoding="utf-8"))
    version = meta.get("format_version")
    if version != FORMAT_VERSION:
        raise StorageError(
            f"index format version {version} unsupported (expected {FORMAT_VERSION})"
        )
    matrix = np.load(root / "vectors.npy")
    chunks: list[ContentChunk] = []
    with open(root / "chunks.jsonl", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                chunks.append(ContentChunk.from_record(json.loads(line)))
    if matrix.shape[0] != len(chunks):
        raise StorageError(
            f"vector count {matrix.shape[0]} does not match chunk count {len(chunks)}"
        )
    index = VectorIndex(
        meta.get("collection_id", root.name),
        [c.chunk_id for c in chunks],
        [c.doc_id for c in chunks],
        [c.kind for c in chunks],
        matrix,
    )
    for chunk, row in zip(chunks, matrix):
        chunk.vector = row
    return index, chunks
