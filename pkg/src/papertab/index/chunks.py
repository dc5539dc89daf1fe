"""Content chunks: the retrieval units cut from a document bundle."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from ..ingest import DocumentBundle, StructuredTable

KINDS = ("text", "table", "figure")


@dataclass
class ContentChunk:
    chunk_id: str
    doc_id: str
    kind: str  # text | table | figure
    raw_content: str
    summary: str = ""
    degraded: bool = False
    vector: np.ndarray | None = field(default=None, repr=False)

    def to_record(self) -> dict:
        return {
            "chunk_id": self.chunk_id,
            "doc_id": self.doc_id,
            "kind": self.kind,
            "raw_content": self.raw_content,
            "summary": self.summary,
            "degraded": self.degraded,
        }

    @classmethod
    def from_record(cls, record: dict) -> "ContentChunk":
        return cls(
            chunk_id=record["chunk_id"],
            doc_id=record["doc_id"],
            kind=record["kind"],
            raw_content=record["raw_content"],
            summary=record.get("summary", ""),
            degraded=bool(record.get("degraded", False)),
        )


def serialize_table(table: StructuredTable) -> str:
    """Caption line plus fully quoted CSV; this exact text is what gets cited."""
    buf = io.StringIO()
    writer = csv.writer(buf, quoting=csv.QUOTE_ALL, lineterminator="\n")
    writer.writerow(table.header)
    for row in table.rows:
        writer.writerow(row)
    body = buf.getvalue().rstrip("\n")
    if table.caption:
        return f"{table.caption}\n{body}"
    return body


def chunks_from_bundle(bundle: DocumentBundle) -> list[ContentChunk]:
    chunks: list[ContentChunk] = []
    doc = bundle.doc_id
    for snippet in bundle.snippets:
        chunks.append(
            ContentChunk(
                chunk_id=f"{doc}:text:{snippet.snippet_id}",
                doc_id=doc,
                kind="text",
                raw_content=snippet.text,
            )
        )
    for table in bundle.tables:
        chunks.append(
            ContentChunk(
                chunk_id=f"{doc}:table:{table.table_id}",
                doc_id=doc,
                kind="table",
                raw_content=serialize_table(table),
            )
        )
    for i, region in enumerate(bundle.unparsed_tables):
        chunks.append(
            ContentChunk(
                chunk_id=f"{doc}:rawtable:{i + 1}",
                doc_id=doc,
                kind="text",
                raw_content=region,
            )
        )
    for figure in bundle.figures:
        raw = figure.insight_text
        if figure.caption and figure.caption not in raw:
            raw = f"{figure.caption}\n{raw}" if raw else figure.caption
        chunks.append(
            ContentChunk(
                chunk_id=f"{doc}:figure:{figure.figure_id}",
                doc_id=doc,
                kind="figure",
                raw_content=raw,
                degraded=figure.degraded,
            )
        )
    return chunks
