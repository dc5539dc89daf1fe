"""Chunk summaries: the short texts the vector index is built over."""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor

from ..errors import GatewayError, UsageError
from ..gateway import Gateway, ModelClass
from .chunks import ContentChunk

LOGGER = logging.getLogger(__name__)

SUMMARY_MAX_CHARS = 600

_GUIDANCE = {
    "text": "Focus on the findings, methods, and quantities the passage reports.",
    "table": (
        "Name the table caption and the column names, then the main quantities "
        "the table reports."
    ),
    "figure": "Abbreviate the figure description, keeping the main trend.",
}


def summarize_chunk(gateway: Gateway, raw_content: str, kind: str) -> tuple[str, bool]:
    """Summary for one chunk; falls back to truncated raw content when degraded."""
    if not raw_content:
        raise UsageError("cannot summarize empty content")
    guidance = _GUIDANCE.get(kind, _GUIDANCE["text"])
    try:
        summary = gateway.complete(
            "chunk_summary",
            {"kind": kind, "guidance": guidance, "content": raw_content},
            ModelClass.SUMMARIZER,
        ).strip()
    except GatewayError:
        LOGGER.warning("chunk summary degraded to truncated content")
        return raw_content[:SUMMARY_MAX_CHARS], True
    if not summary:
        return raw_content[:SUMMARY_MAX_CHARS], True
    return summary[:SUMMARY_MAX_CHARS], False


def summarize_chunks(
    gateway: Gateway, chunks: list[ContentChunk], max_workers: int | None = None
) -> None:
    """Fill summaries in place, fanning out up to the gateway budget."""
    todo = [c for c in chunks if not c.summary]
    if not todo:
        return
    workers = max_workers or gateway.config.budget

    def work(chunk: ContentChunk) -> None:
        summary, degraded = summarize_chunk(gateway, chunk.raw_content, chunk.kind)
        chunk.summary = summary
        chunk.degraded = chunk.degraded or degraded

    if workers <= 1 or len(todo) == 1:
        for chunk in todo:
            work(chunk)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        list(pool.map(work, todo))
