"""Summary-indexed vector database over document chunks."""
from .chunks import KINDS, ContentChunk, chunks_from_bundle, serialize_table
from .summarize import SUMMARY_MAX_CHARS, summarize_chunk, summarize_chunks
from .vectordb import (
    DEFAULT_K,
    MIN_TABLE_HITS,
    RetrievalHit,
    VectorIndex,
    build_index,
    load_index,
    retrieve,
    retrieve_grounding,
    save_index,
)

__all__ = [
    "ContentChunk",
    "KINDS",
    "chunks_from_bundle",
    "serialize_table",
    "summarize_chunk",
    "summarize_chunks",
    "SUMMARY_MAX_CHARS",
    "VectorIndex",
    "RetrievalHit",
    "build_index",
    "retrieve",
    "retrieve_grounding",
    "save_index",
    "load_index",
    "DEFAULT_K",
    "MIN_TABLE_HITS",
]
