"""Document ingestion: bundles, segmentation, table/figure/metadata recovery."""
from .bundle import (
    META_FIELDS,
    MISSING,
    DocumentBundle,
    FigureInsight,
    PaperMeta,
    StructuredTable,
    TextSnippet,
    discover_bundle_files,
    bundle_from_dict,
    load_bundle,
    load_bundles,
)
from .enrich import describe_figure, extract_meta, identify_tables, structure_table
from .segment import segment_text

__all__ = [
    "DocumentBundle",
    "PaperMeta",
    "TextSnippet",
    "StructuredTable",
    "FigureInsight",
    "META_FIELDS",
    "MISSING",
    "bundle_from_dict",
    "load_bundle",
    "load_bundles",
    "discover_bundle_files",
    "segment_text",
    "identify_tables",
    "structure_table",
    "describe_figure",
    "extract_meta",
]
