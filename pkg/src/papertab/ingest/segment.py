"""Length- and section-aware text segmentation."""
from __future__ import annotations

from ..errors import UsageError
from .bundle import TextSnippet

# snippets this small lose sentence context; refuse rather than guess
MIN_SNIPPET_CHARS = 200


def segment_text(
    raw_text: str,
    max_snippet_chars: int,
    section_marks: list[tuple[int, str]],
) -> list[TextSnippet]:
    """Split text into snippets that tile the input exactly.

    Snippets never cross a section mark and never exceed max_snippet_chars.
    Splits prefer whitespace in the back half of an oversized piece, falling
    back to a hard cut.
    """
    if max_snippet_chars < MIN_SNIPPET_CHARS:
        raise UsageError(
            f"max_snippet_chars must be >= {MIN_SNIPPET_CHARS}, got {max_snippet_chars}"
        )
    n = len(raw_text)
    if n == 0:
        return []

    marks = sorted(
        {(off, label) for off, label in section_marks if 0 <= off <= n},
        key=lambda m: m[0],
    )
    boundaries: list[tuple[int, str | None]] = []
    if not marks or marks[0][0] > 0:
        boundaries.append((0, None))
    for off, label in marks:
        if boundaries and boundaries[-1][0] == off:
            boundaries[-1] = (off, label)
        else:
            boundaries.append((off, label))

    snippets: list[TextSnippet] = []
    counter = 1
    for idx, (start, label) in enumerate(boundaries):
        end = boundaries[idx + 1][0] if idx + 1 < len(boundaries) else n
        pos = start
        while pos < end:
            cut = _choose_cut(raw_text, pos, end, max_snippet_chars)
            snippets.append(
                TextSnippet(
                    snippet_id=f"s{counter}",
                    text=raw_text[pos:cut],
                    section_label=label,
                    char_span=(pos, cut),
                )
            )
            counter += 1
            pos = cut
    return snippets


def _choose_cut(text: str, start: int, end: int, limit: int) -> int:
    if end - start <= limit:
        return end
    hard = start + limit
    window_start = start + limit // 2
    best = -1
    for i in range(hard - 1, window_start - 1, -1):
        if text[i].isspace():
            best = i
            break
    if best > start:
        return best + 1  # the whitespace stays with the left piece
    return hard
