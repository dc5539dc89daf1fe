"""Schema inference, grounded record extraction, and provenance spans."""
from .records import (
    EMPTY,
    FLAG_DEGRADED,
    FLAG_EMPTY_CELLS,
    FLAG_LOW_RELEVANCE,
    FLAG_UNVERIFIED_SPAN,
    SUMMARY_LIMIT,
    CellValue,
    DataRecord,
    EmptyType,
    all_empty_record,
    cell_text,
    extract_records,
    is_empty,
    make_cell,
    parse_typed,
    render_contexts,
    summarize_answer,
    validate_record,
)
from .schema import (
    DECLARED_KINDS,
    SchemaColumn,
    TableSchema,
    declared_kind_of,
    infer_schema,
    schema_from_attributes,
    to_snake_case,
)
from .spans import ProvenanceSpan, attach_spans, find_spans, locate_spans, normalize_needle

__all__ = [
    "TableSchema",
    "SchemaColumn",
    "infer_schema",
    "schema_from_attributes",
    "to_snake_case",
    "declared_kind_of",
    "DECLARED_KINDS",
    "EMPTY",
    "EmptyType",
    "is_empty",
    "CellValue",
    "DataRecord",
    "cell_text",
    "make_cell",
    "parse_typed",
    "all_empty_record",
    "validate_record",
    "extract_records",
    "render_contexts",
    "summarize_answer",
    "SUMMARY_LIMIT",
    "FLAG_EMPTY_CELLS",
    "FLAG_LOW_RELEVANCE",
    "FLAG_UNVERIFIED_SPAN",
    "FLAG_DEGRADED",
    "ProvenanceSpan",
    "find_spans",
    "locate_spans",
    "attach_spans",
    "normalize_needle",
]
