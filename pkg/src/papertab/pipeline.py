"""End-to-end orchestration: enrich bundles, index, extract, score, assemble."""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .errors import UsageError
from .extract import (
    DataRecord,
    FLAG_DEGRADED,
    TableSchema,
    attach_spans,
    extract_records,
    infer_schema,
    schema_from_attributes,
    summarize_answer,
)
from .gateway import Gateway
from .index import (
    ContentChunk,
    VectorIndex,
    build_index,
    chunks_from_bundle,
    retrieve_grounding,
    summarize_chunks,
)
from .ingest import DocumentBundle, describe_figure, extract_meta, structure_table
from .quality import flag_records, score_records, table_quality
from .store import WorkingTable

LOGGER = logging.getLogger(__name__)

DEFAULT_K = 8


@dataclass
class EnrichmentReport:
    structured_tables: int = 0
    dropped_tables: int = 0
    described_figures: int = 0
    degraded_figures: int = 0
    meta_extracted: bool = False


def prepare_bundle(gateway: Gateway, bundle: DocumentBundle) -> EnrichmentReport:
    """Structure raw tables, describe figures, and fill metadata in place."""
    report = EnrichmentReport()
    for i, raw in enumerate(bundle.unparsed_tables):
        table = structure_table(gateway, raw, table_id=f"auto{i + 1}")
        if table is None:
            report.dropped_tables += 1
            LOGGER.warning(
                "bundle %s: raw table %d could not be structured", bundle.doc_id, i + 1
            )
            continue
        bundle.tables.append(table)
        report.structured_tables += 1
    bundle.unparsed_tables = []
    for figure in bundle.figures:
        if figure.insight_text:
            continue
        image = b""
        if figure.image_ref:
            path = Path(figure.image_ref)
            if path.exists():
                image = path.read_bytes()
        if image:
            described = describe_figure(
                gateway, image, figure.caption, figure_id=figure.figure_id
            )
            figure.insight_text = described.insight_text
            figure.degraded = described.degraded
        else:
            figure.insight_text = figure.caption or "figure (no description available)"
            figure.degraded = True
        if figure.degraded:
            report.degraded_figures += 1
        else:
            report.described_figures += 1
    if bundle.meta.title == "none" and bundle.snippets:
        head = "\n".join(s.text for s in bundle.snippets)
        bundle.meta = extract_meta(gateway, head)
        report.meta_extracted = True
    return report


@dataclass
class CollectionIndex:
    """A built index together with the chunks it covers."""

    index: VectorIndex
    chunks: list[ContentChunk]

    @property
    def chunks_by_id(self) -> dict[str, ContentChunk]:
        return {c.chunk_id: c for c in self.chunks}

    @property
    def raw_by_id(self) -> dict[str, str]:
        return {c.chunk_id: c.raw_content for c in self.chunks}

    def doc_ids(self) -> list[str]:
        seen: list[str] = []
        for chunk in self.chunks:
            if chunk.doc_id not in seen:
                seen.append(chunk.doc_id)
        return seen


def index_bundles(
    gateway: Gateway, collection_id: str, bundles: list[DocumentBundle]
) -> CollectionIndex:
    """Chunk, summarize, and embed a corpus into a searchable index."""
    if not bundles:
        raise UsageError("no bundles to index")
    chunks: list[ContentChunk] = []
    for bundle in bundles:
        chunks.extend(chunks_from_bundle(bundle))
    summarize_chunks(gateway, chunks)
    index = build_index(gateway, collection_id, chunks)
    return CollectionIndex(index=index, chunks=chunks)


@dataclass
class QueryOutcome:
    table: WorkingTable
    summary: str
    schema: TableSchema
    question: str
    degraded_docs: int
    fragments: list[str] = field(default_factory=list)


def resolve_schema(
    gateway: Gateway,
    question: str | None = None,
    attributes: dict[str, str] | None = None,
) -> TableSchema:
    """Schema from a natural-language question or an explicit attribute form."""
    if attributes:
        return schema_from_attributes(attributes, question or "")
    if question and question.strip():
        return infer_schema(gateway, question)
    raise UsageError("provide a question or an attributes mapping")


def run_query(
    gateway: Gateway,
    collection: CollectionIndex,
    question: str | None = None,
    attributes: dict[str, str] | None = None,
    k: int = DEFAULT_K,
    score: bool = True,
) -> QueryOutcome:
    """One full query: schema, per-document retrieval + extraction, quality."""
    schema = resolve_schema(gateway, question, attributes)
    effective_question = (question or "").strip() or schema.source_question
    doc_ids = collection.doc_ids()
    if not doc_ids:
        raise UsageError("collection has no indexed documents")
    chunk_map = collection.chunks_by_id
    raw_map = collection.raw_by_id

    def one_doc(doc_id: str) -> tuple[list[DataRecord], str]:
        hits = retrieve_grounding(
            gateway, collection.index, effective_question, doc_id, k=k
        )
        contexts = [chunk_map[h.chunk_id] for h in hits]
        records, fragment = extract_records(
            gateway, effective_question, schema, doc_id, contexts
        )
        for record in records:
            attach_spans(record, raw_map)
        return records, fragment

    workers = max(1, gateway.config.budget)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(one_doc, doc_ids))

    records: list[DataRecord] = []
    fragments: list[str] = []
    degraded_docs = 0
    for doc_records, fragment in results:
        records.extend(doc_records)
        fragments.append(fragment)
        if doc_records and all(FLAG_DEGRADED in r.flags for r in doc_records):
            degraded_docs += 1

    if score:
        score_records(gateway, effective_question, records, raw_map)
    flag_records(records)
    quality = table_quality(records, schema.column_names)
    table = WorkingTable(schema=schema, records=records, quality=quality)
    summary = summarize_answer(gateway, effective_question, records, fragments)
    return QueryOutcome(
        table=table,
        summary=summary,
        schema=schema,
        question=effective_question,
        degraded_docs=degraded_docs,
    )
