"""Exact-match provenance spans linking cell values back into their contexts."""
from __future__ import annotations

from dataclasses import dataclass

from .records import FLAG_UNVERIFIED_SPAN, CellValue, DataRecord, is_empty

# punctuation shed from the ends of a needle before matching
_STRIP_CHARS = " \t\r\n.,;:!?\"'()[]{}"


@dataclass
class ProvenanceSpan:
    chunk_id: str
    char_start: int
    char_end: int
    matched_text: str

    def to_dict(self) -> dict:
        return {
            "chunk_id": self.chunk_id,
            "char_start": self.char_start,
            "char_end": self.char_end,
            "matched_text": self.matched_text,
        }


def _normalize(text: str) -> str:
    """Casefold and collapse whitespace runs to single spaces."""
    out: list[str] = []
    prev_space = False
    for ch in text:
        if ch.isspace():
            if not prev_space:
                out.append(" ")
            prev_space = True
        else:
            prev_space = False
            out.append(ch.casefold())
    return "".join(out)


def normalize_needle(text: str) -> str:
    return _normalize(text).strip(_STRIP_CHARS)


def _norm_with_offsets(text: str) -> tuple[str, list[int], list[int]]:
    """Normalized text plus per-character original start/end offsets."""
    chars: list[str] = []
    starts: list[int] = []
    ends: list[int] = []
    prev_space = False
    for idx, ch in enumerate(text):
        if ch.isspace():
            if prev_space:
                continue
            prev_space = True
            chars.append(" ")
            starts.append(idx)
            ends.append(idx + 1)
        else:
            prev_space = False
            for folded in ch.casefold():
                chars.append(folded)
                starts.append(idx)
                ends.append(idx + 1)
    return "".join(chars), starts, ends


def find_spans(chunk_id: str, content: str, needle_text: str) -> list[ProvenanceSpan]:
    """All non-overlapping normalized-exact occurrences, left to right."""
    needle = normalize_needle(needle_text)
    if not needle:
        return []
    hay, starts, ends = _norm_with_offsets(content)
    spans: list[ProvenanceSpan] = []
    pos = hay.find(needle)
    while pos != -1:
        start = starts[pos]
        end = ends[pos + len(needle) - 1]
        spans.append(
            ProvenanceSpan(
                chunk_id=chunk_id,
                char_start=start,
                char_end=end,
                matched_text=content[start:end],
            )
        )
        pos = hay.find(needle, pos + len(needle))
    return spans


def locate_spans(
    record: DataRecord, chunks_by_id: dict[str, str]
) -> dict[str, list[ProvenanceSpan]]:
    """Provenance map for every non-Empty cell over the record's own contexts."""
    provenance: dict[str, list[ProvenanceSpan]] = {}
    for name, value in record.cells.items():
        if is_empty(value):
            continue
        text = value.text if isinstance(value, CellValue) else str(value)
        spans: list[ProvenanceSpan] = []
        for chunk_id in record.context_ids:
            content = chunks_by_id.get(chunk_id)
            if content is None:
                continue
            spans.extend(find_spans(chunk_id, content, text))
        provenance[name] = spans
    return provenance


def attach_spans(record: DataRecord, chunks_by_id: dict[str, str]) -> None:
    """Fill record.provenance; unmatched non-Empty cells raise the span flag."""
    record.provenance = locate_spans(record, chunks_by_id)
    if any(not spans for spans in record.provenance.values()):
        record.flags.add(FLAG_UNVERIFIED_SPAN)
    else:
        record.flags.discard(FLAG_UNVERIFIED_SPAN)
