"""Gateway-backed recovery of tables, figure insights, and paper metadata."""
from __future__ import annotations

import csv
import io
import logging

from ..errors import GatewayError, StructuredOutputError, UsageError
from ..gateway import Gateway, ModelClass
from ..gateway.structured import parse_json_payload, repair_prompt, validate_shape
from .bundle import META_FIELDS, MISSING, FigureInsight, PaperMeta, StructuredTable

LOGGER = logging.getLogger(__name__)

# appendix-style record keys as models emit them, mapped onto PaperMeta fields
_META_KEY_MAP = {
    "title": "title",
    "abstract": "abstract",
    "year": "year",
    "author": "author",
    "authors": "author",
    "journal/conference": "venue",
    "journal": "venue",
    "conference": "venue",
    "venue": "venue",
    "issn": "issn",
    "volume": "volume",
    "issue": "issue",
    "page": "page",
    "pages": "page",
    "doi": "doi",
    "link": "link",
    "url": "link",
    "publisher": "publisher",
    "language": "language",
}

_META_FORMAT_INSTRUCTIONS = (
    "Reply with a JSON object with exactly these keys: \"Title\", \"Abstract\", "
    "\"Year\", \"Author\", \"Journal/Conference\", \"ISSN\", \"Volume\", \"Issue\", "
    "\"Page\", \"DOI\", \"Link\", \"Publisher\", \"Language\". Every value must be a "
    "string; use \"none\" when the information is not present."
)

_TABLE_LIST_SHAPE = {
    "kind": "list",
    "item": {
        "kind": "object",
        "required": {"table_content": {"kind": "str"}},
        "extra": "allow",
    },
}

_TABLE_CSV_SHAPE = {
    "kind": "object",
    "required": {
        "table_caption": {"kind": "str"},
        "table_content": {"kind": "str"},
    },
    "extra": "allow",
}


def _is_no(raw: str) -> bool:
    return raw.strip().strip(".").casefold() == "no"


def identify_tables(gateway: Gateway, page_text: str) -> list[str]:
    """Raw table regions in a page, each verified verbatim against the page."""
    prompt = gateway.render("table_identification", {"page_content": page_text})
    raw = gateway.complete_prompt(prompt, ModelClass.REASONER)
    if _is_no(raw):
        return []

    value, errors = _parse(raw, _TABLE_LIST_SHAPE)
    if errors:
        retry = repair_prompt(prompt, raw, errors)
        raw = gateway.complete_prompt(retry, ModelClass.REASONER)
        if _is_no(raw):
            return []
        value, errors = _parse(raw, _TABLE_LIST_SHAPE)
        if errors:
            LOGGER.warning("table identification output unusable: %s", errors[:3])
            return []

    regions: list[str] = []
    for entry in value:
        content = entry["table_content"]
        if content and content in page_text:
            regions.append(content)
        else:
            LOGGER.warning("dropping table region not found verbatim in page")
    return regions


def _parse(raw: str, shape: dict) -> tuple[object, list[str]]:
    try:
        value = parse_json_payload(raw)
    except ValueError as exc:
        return None, [str(exc)]
    return value, validate_shape(value, shape)


def structure_table(
    gateway: Gateway, table_string: str, table_id: str = "t1"
) -> StructuredTable | None:
    """Recover a rectangular table from a raw region, or None when unusable."""
    if not table_string.strip():
        raise UsageError("table_string is empty")
    prompt = gateway.render("table_structuring", {"table_information": table_string})
    raw = gateway.complete_prompt(prompt, ModelClass.REASONER)
    table, errors = _try_structuring(raw, table_id)
    if table is not None:
        return table
    retry = repair_prompt(prompt, raw, errors)
    raw = gateway.complete_prompt(retry, ModelClass.REASONER)
    table, errors = _try_structuring(raw, table_id)
    if table is None:
        LOGGER.warning("table %s left unparsed: %s", table_id, errors[:3])
    return table


def _try_structuring(raw: str, table_id: str) -> tuple[StructuredTable | None, list[str]]:
    value, errors = _parse(raw, _TABLE_CSV_SHAPE)
    if errors:
        return None, errors
    caption = value["table_caption"]
    try:
        rows = list(csv.reader(io.StringIO(value["table_content"])))
    except csv.Error as exc:
        return None, [f"table_content is not parseable CSV: {exc}"]
    rows = [row for row in rows if row]
    if not rows:
        return None, ["table_content has no rows"]

    header, data = _flatten_header(rows)
    width = len(header)
    for j, row in enumerate(data):
        if len(row) != width:
            return None, [
                f"row {j} has {len(row)} cells but the header has {width}; "
                "every row must have the same number of cells"
            ]
    return StructuredTable(table_id=table_id, caption=caption, header=header, rows=data), []


def _flatten_header(rows: list[list[str]]) -> tuple[list[str], list[list[str]]]:
    """Collapse a two-row hierarchical header into composite column names.

    A first row that repeats a parent name across sub-columns marks a
    hierarchical header; its children come from the second row.
    """
    first = [c.strip() for c in rows[0]]
    nonempty = [c for c in first if c]
    hierarchical = len(rows) >= 2 and len(set(nonempty)) < len(nonempty)
    if hierarchical:
        children = [c.strip() for c in rows[1]]
        if len(children) == len(first):
            header = []
            for parent, child in zip(first, children):
                if parent and child:
                    header.append(f"{parent} {child}")
                else:
                    header.append(parent or child)
            header = _fill_blank_names(header)
            return header, rows[2:]
    return _fill_blank_names(first), rows[1:]


def _fill_blank_names(header: list[str]) -> list[str]:
    return [name if name else f"column_{i + 1}" for i, name in enumerate(header)]


def describe_figure(
    gateway: Gateway,
    image: bytes,
    caption: str,
    figure_id: str = "f1",
) -> FigureInsight:
    """Model-written description of a figure, degrading to the caption."""
    prompt = gateway.render("figure_description", {"caption": caption})
    try:
        insight = gateway.describe_image(image, prompt).strip()
    except GatewayError:
        LOGGER.warning("figure %s description degraded to caption", figure_id)
        return FigureInsight(
            figure_id=figure_id,
            caption=caption,
            insight_text=caption or "figure (no description available)",
            degraded=True,
        )
    if not insight:
        insight = caption or "figure (no description available)"
    return FigureInsight(figure_id=figure_id, caption=caption, insight_text=insight)


def extract_meta(
    gateway: Gateway, doc_text_head: str, head_chars: int = 8000
) -> PaperMeta:
    """Thirteen-key paper metadata record; unknowns become \"none\"."""
    head = doc_text_head[:head_chars]
    try:
        value = gateway.complete_structured(
            "meta_extraction",
            {"paper": head, "format_instructions": _META_FORMAT_INSTRUCTIONS},
            {"kind": "object", "required": {}, "extra": "allow"},
        )
    except StructuredOutputError as exc:
        LOGGER.warning("metadata extraction degraded to all-none: %s", exc)
        return PaperMeta()

    resolved: dict[str, str] = {}
    for key, raw in value.items():
        field = _META_KEY_MAP.get(str(key).strip().casefold())
        if field is None:
            continue
        if raw is None:
            continue
        text = str(raw).strip()
        resolved.setdefault(field, text if text else MISSING)
    for field in META_FIELDS:
        if field not in resolved:
            LOGGER.warning("metadata key %r missing from model output", field)
            resolved[field] = MISSING
    return PaperMeta(**resolved)
