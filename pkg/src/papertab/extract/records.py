"""Grounded record extraction and answer summaries."""
from __future__ import annotations

import datetime
import json
import logging
from dataclasses import dataclass, field
from typing import Any

from ..errors import GatewayError, StructuredOutputError, UsageError
from ..gateway import Gateway, ModelClass
from ..index import ContentChunk
from .schema import TableSchema

LOGGER = logging.getLogger(__name__)

SUMMARY_LIMIT = 1200

FLAG_EMPTY_CELLS = "empty_cells"
FLAG_LOW_RELEVANCE = "low_relevance"
FLAG_UNVERIFIED_SPAN = "unverified_span"
FLAG_DEGRADED = "degraded"


class EmptyType:
    """Sentinel for a value the documents do not determine."""

    _instance: "EmptyType | None" = None

    def __new__(cls) -> "EmptyType":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "Empty"

    def __bool__(self) -> bool:
        return False


EMPTY = EmptyType()


def is_empty(value: Any) -> bool:
    return value is EMPTY


@dataclass
class CellValue:
    text: str
    typed_view: Any = None


@dataclass
class DataRecord:
    doc_id: str
    cells: dict[str, Any]  # column name → CellValue | EMPTY
    provenance: dict[str, list] = field(default_factory=dict)
    context_ids: list[str] = field(default_factory=list)
    flags: set[str] = field(default_factory=set)
    quality: Any = None


def cell_text(value: Any) -> str:
    """Plain text of a cell; Empty renders as the empty string."""
    if is_empty(value):
        return ""
    if isinstance(value, CellValue):
        return value.text
    return str(value)


def parse_typed(text: str, kind: str) -> Any:
    """Best-effort typed view; never raises, never blocks storage."""
    t = text.strip()
    try:
        if kind == "float":
            cleaned = t.replace(",", "").rstrip("%").strip()
            return float(cleaned) if cleaned else None
        if kind == "int":
            return int(t.replace(",", ""), 10)
        if kind == "bool":
            low = t.casefold()
            if low in ("true", "yes"):
                return True
            if low in ("false", "no"):
                return False
            return None
        if kind == "date":
            return datetime.date.fromisoformat(t)
    except (ValueError, TypeError):
        return None
    return None


def make_cell(value: Any, declared_kind: str = "string") -> Any:
    """CellValue from a raw model value; blank or "Empty" collapses to EMPTY."""
    if value is None or is_empty(value):
        return EMPTY
    if isinstance(value, str):
        text = value
    elif isinstance(value, bool):
        text = "true" if value else "false"
    else:
        text = str(value)
    text = text.strip()
    if not text or text.casefold() == "empty":
        return EMPTY
    return CellValue(text=text, typed_view=parse_typed(text, declared_kind))


def all_empty_record(schema: TableSchema, doc_id: str, context_ids: list[str]) -> DataRecord:
    return DataRecord(
        doc_id=doc_id,
        cells={name: EMPTY for name in schema.column_names},
        context_ids=list(context_ids),
        flags={FLAG_EMPTY_CELLS, FLAG_DEGRADED},
    )


def validate_record(record: DataRecord, schema: TableSchema) -> None:
    if set(record.cells) != set(schema.column_names):
        raise UsageError(
            f"record cells {sorted(record.cells)} do not match schema "
            f"columns {sorted(schema.column_names)}"
        )


_EXTRACTION_SHAPE = {
    "kind": "object",
    "required": {
        "records": {"kind": "list", "item": {"kind": "flat_record"}, "min_len": 1}
    },
    "extra": "allow",
}


def render_contexts(contexts: list[ContentChunk]) -> str:
    parts = []
    for i, chunk in enumerate(contexts, start=1):
        parts.append(f"[{i}] (chunk {chunk.chunk_id}, {chunk.kind})\n{chunk.raw_content}")
    return "\n\n".join(parts)


def extract_records(
    gateway: Gateway,
    question: str,
    schema: TableSchema,
    doc_id: str,
    contexts: list[ContentChunk],
) -> tuple[list[DataRecord], str]:
    """Records for one document from its retrieved contexts, plus a fragment.

    A document always yields at least one record; undeterminable values are
    Empty, and unusable model output degrades to a single all-Empty record.
    """
    for chunk in contexts:
        if chunk.doc_id != doc_id:
            raise UsageError(
                f"context chunk {chunk.chunk_id!r} belongs to {chunk.doc_id!r}, "
                f"not {doc_id!r}"
            )
    context_ids = [c.chunk_id for c in contexts]
    if not contexts:
        return (
            [all_empty_record(schema, doc_id, context_ids)],
            "No content was retrieved for this document.",
        )

    bindings = {
        "question": question,
        "columns_json": json.dumps(schema.column_names),
        "schema_json": json.dumps(
            {c.name: c.value_description for c in schema.columns}, indent=2
        ),
        "contexts": render_contexts(contexts),
    }
    try:
        value = gateway.complete_structured(
            "record_extraction", bindings, _EXTRACTION_SHAPE
        )
    except StructuredOutputError as exc:
        LOGGER.warning("extraction for %s degraded to all-Empty: %s", doc_id, exc)
        return (
            [all_empty_record(schema, doc_id, context_ids)],
            "No data could be extracted.",
        )

    kind_by_name = {c.name: c.declared_kind for c in schema.columns}
    records: list[DataRecord] = []
    for raw in value["records"]:
        cells = {
            name: make_cell(raw.get(name), kind_by_name[name])
            for name in schema.column_names
        }
        flags: set[str] = set()
        if any(is_empty(v) for v in cells.values()):
            flags.add(FLAG_EMPTY_CELLS)
        records.append(
            DataRecord(
                doc_id=doc_id,
                cells=cells,
                context_ids=list(context_ids),
                flags=flags,
            )
        )
    fragment = str(value.get("summary") or "").strip()
    return records, fragment


def summarize_answer(
    gateway: Gateway,
    question: str,
    records: list[DataRecord],
    fragments: list[str] | None = None,
) -> str:
    """Short narrative over the whole extracted table."""
    if not records:
        return "No documents processed."
    docs = sorted({r.doc_id for r in records})
    total_cells = sum(len(r.cells) for r in records)
    empty_cells = sum(1 for r in records for v in r.cells.values() if is_empty(v))
    all_empty_docs = sorted(
        {
            d
            for d in docs
            if all(
                is_empty(v)
                for r in records
                if r.doc_id == d
                for v in r.cells.values()
            )
        }
    )
    stats = (
        f"{len(records)} records from {len(docs)} documents; "
        f"{empty_cells} of {total_cells} cells empty; "
        f"{len(all_empty_docs)} documents with no extractable data"
    )
    fallback = (
        f"Extracted {len(records)} records from {len(docs)} documents. "
        f"{empty_cells} of {total_cells} cells are empty. "
        f"{len(all_empty_docs)} documents had no extractable data."
    )
    fragment_text = "\n".join(f"- {f}" for f in (fragments or []) if f) or "(none)"
    try:
        summary = gateway.complete(
            "answer_summary",
            {"question": question, "stats": stats, "fragments": fragment_text},
            ModelClass.SUMMARIZER,
        ).strip()
    except GatewayError:
        LOGGER.warning("answer summary degraded to the templated form")
        return fallback[:SUMMARY_LIMIT]
    if not summary:
        return fallback[:SUMMARY_LIMIT]
    return summary[:SUMMARY_LIMIT]
