"""Document bundle types, validation, and loading from the interchange format."""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field, fields
from pathlib import Path

from ..errors import ConflictError, FormatError

LOGGER = logging.getLogger(__name__)

# canonical metadata field order; serialization and prompts follow it
META_FIELDS = (
    "title",
    "abstract",
    "year",
    "author",
    "venue",
    "issn",
    "volume",
    "issue",
    "page",
    "doi",
    "link",
    "publisher",
    "language",
)

MISSING = "none"


@dataclass
class PaperMeta:
    title: str = MISSING
    abstract: str = MISSING
    year: str = MISSING
    author: str = MISSING
    venue: str = MISSING
    issn: str = MISSING
    volume: str = MISSING
    issue: str = MISSING
    page: str = MISSING
    doi: str = MISSING
    link: str = MISSING
    publisher: str = MISSING
    language: str = MISSING

    def to_dict(self) -> dict[str, str]:
        return {name: getattr(self, name) for name in META_FIELDS}

    @classmethod
    def from_dict(cls, data: dict) -> "PaperMeta":
        kwargs = {}
        for name in META_FIELDS:
            value = data.get(name, MISSING)
            if value is None or (isinstance(value, str) and not value.strip()):
                value = MISSING
            kwargs[name] = str(value)
        return cls(**kwargs)


@dataclass
class TextSnippet:
    snippet_id: str
    text: str
    section_label: str | None = None
    char_span: tuple[int, int] = (0, 0)


@dataclass
class StructuredTable:
    table_id: str
    caption: str
    header: list[str]
    rows: list[list[str]]
    source_page: int | None = None


@dataclass
class FigureInsight:
    figure_id: str
    caption: str
    insight_text: str = ""
    image_ref: str | None = None
    degraded: bool = False


@dataclass
class DocumentBundle:
    doc_id: str
    meta: PaperMeta = field(default_factory=PaperMeta)
    snippets: list[TextSnippet] = field(default_factory=list)
    tables: list[StructuredTable] = field(default_factory=list)
    figures: list[FigureInsight] = field(default_factory=list)
    # raw table regions that could not be structured; kept as text evidence
    unparsed_tables: list[str] = field(default_factory=list)

    def validate(self) -> None:
        if not self.doc_id or not self.doc_id.strip():
            raise FormatError("doc_id must be nonempty", field="doc_id")
        for i, snippet in enumerate(self.snippets):
            if not snippet.text:
                raise FormatError(
                    f"snippet {snippet.snippet_id!r} has empty text",
                    field=f"snippets[{i}].text",
                )
        for i, table in enumerate(self.tables):
            if not table.header:
                raise FormatError(
                    f"table {table.table_id!r} has an empty header",
                    field=f"tables[{i}].header",
                )
            width = len(table.header)
            for j, row in enumerate(table.rows):
                if len(row) != width:
                    raise FormatError(
                        f"table {table.table_id!r} row {j} has {len(row)} cells, "
                        f"header has {width}",
                        field=f"tables[{i}].rows[{j}]",
                    )


def _require(data: dict, key: str, kind: type, where: str):
    if key not in data:
        raise FormatError(f"missing required field", field=f"{where}{key}")
    value = data[key]
    if not isinstance(value, kind):
        raise FormatError(
            f"expected {kind.__name__}, got {type(value).__name__}",
            field=f"{where}{key}",
        )
    return value


def _parse_snippet(entry: dict, i: int, running: int) -> tuple[TextSnippet, int]:
    where = f"snippets[{i}]."
    if not isinstance(entry, dict):
        raise FormatError("snippet entry must be an object", field=f"snippets[{i}]")
    text = _require(entry, "text", str, where)
    if not text:
        raise FormatError("snippet text must be nonempty", field=f"{where}text")
    snippet_id = str(entry.get("snippet_id") or f"s{i + 1}")
    label = entry.get("section_label")
    if label is not None and not isinstance(label, str):
        raise FormatError("section_label must be a string", field=f"{where}section_label")
    span = entry.get("char_span")
    if span is None:
        span = (running, running + len(text))
    else:
        if (
            not isinstance(span, (list, tuple))
            or len(span) != 2
            or not all(isinstance(v, int) for v in span)
        ):
            raise FormatError(
                "char_span must be a [start, end] integer pair", field=f"{where}char_span"
            )
        span = (span[0], span[1])
    return TextSnippet(snippet_id, text, label, span), span[1]


def _parse_table(entry: dict, i: int) -> StructuredTable:
    where = f"tables[{i}]."
    if not isinstance(entry, dict):
        raise FormatError("table entry must be an object", field=f"tables[{i}]")
    header = _require(entry, "header", list, where)
    rows = _require(entry, "rows", list, where)
    if not header or not all(isinstance(h, str) for h in header):
        raise FormatError(
            "header must be a nonempty list of strings", field=f"{where}header"
        )
    clean_rows: list[list[str]] = []
    for j, row in enumerate(rows):
        if not isinstance(row, list) or not all(isinstance(c, str) for c in row):
            raise FormatError("row must be a list of strings", field=f"{where}rows[{j}]")
        clean_rows.append(list(row))
    page = entry.get("source_page")
    if page is not None and not isinstance(page, int):
        raise FormatError("source_page must be an integer", field=f"{where}source_page")
    return StructuredTable(
        table_id=str(entry.get("table_id") or f"t{i + 1}"),
        caption=str(entry.get("caption", "")),
        header=[str(h) for h in header],
        rows=clean_rows,
        source_page=page,
    )


def _parse_figure(entry: dict, i: int, base: Path | None) -> FigureInsight:
    where = f"figures[{i}]."
    if not isinstance(entry, dict):
        raise FormatError("figure entry must be an object", field=f"figures[{i}]")
    figure_id = str(entry.get("figure_id") or f"f{i + 1}")
    caption = str(entry.get("caption", ""))
    insight = str(entry.get("insight_text", ""))
    image_ref: str | None = None
    image_path = entry.get("image_path")
    if image_path is not None:
        if not isinstance(image_path, str):
            raise FormatError("image_path must be a string", field=f"{where}image_path")
        if base is None:
            # inline bundles have no directory to resolve against; the figure
            # will degrade to its caption during enrichment
            LOGGER.warning(
                "figure %s: image_path ignored for inline bundle", figure_id
            )
        else:
            resolved = (base / image_path).resolve()
            if not resolved.is_file():
                raise FormatError(
                    f"referenced image not found: {image_path}",
                    field=f"{where}image_path",
                )
            image_ref = str(resolved)
    return FigureInsight(
        figure_id=figure_id,
        caption=caption,
        insight_text=insight,
        image_ref=image_ref,
    )


def bundle_from_dict(data: dict, base: Path | None = None) -> DocumentBundle:
    """Parse the JSON interchange shape; `base` resolves relative image paths."""
    if not isinstance(data, dict):
        raise FormatError("bundle root must be an object", field="$")

    doc_id = _require(data, "doc_id", str, "")
    meta_raw = data.get("meta", {})
    if not isinstance(meta_raw, dict):
        raise FormatError("meta must be an object", field="meta")
    meta = PaperMeta.from_dict(meta_raw)

    snippets: list[TextSnippet] = []
    running = 0
    for i, entry in enumerate(data.get("snippets", [])):
        snippet, running = _parse_snippet(entry, i, running)
        snippets.append(snippet)

    tables = [_parse_table(entry, i) for i, entry in enumerate(data.get("tables", []))]
    figures = [
        _parse_figure(entry, i, base)
        for i, entry in enumerate(data.get("figures", []))
    ]

    bundle = DocumentBundle(
        doc_id=doc_id, meta=meta, snippets=snippets, tables=tables, figures=figures
    )
    bundle.validate()
    return bundle


def load_bundle(source: str | Path) -> DocumentBundle:
    """Parse one bundle file (JSON interchange, or plain .txt fallback)."""
    path = Path(source)
    if path.suffix.lower() == ".txt":
        return _load_plain_text(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise FormatError(f"cannot parse bundle {path.name}: {exc}") from exc
    return bundle_from_dict(data, base=path.parent)


def _load_plain_text(path: Path) -> DocumentBundle:
    from .segment import segment_text

    text = path.read_text(encoding="utf-8")
    snippets = segment_text(text, 1500, [])
    bundle = DocumentBundle(doc_id=path.stem, snippets=snippets)
    bundle.validate()
    return bundle


def load_bundles(sources: list[str | Path]) -> list[DocumentBundle]:
    """Load a batch; doc_ids must be unique across the batch."""
    bundles: list[DocumentBundle] = []
    seen: dict[str, str] = {}
    for source in sources:
        bundle = load_bundle(source)
        if bundle.doc_id in seen:
            raise ConflictError(
                f"doc_id {bundle.doc_id!r} appears in both "
                f"{seen[bundle.doc_id]} and {Path(source).name}"
            )
        seen[bundle.doc_id] = Path(source).name
        bundles.append(bundle)
    return bundles


def discover_bundle_files(directory: str | Path) -> list[Path]:
    """Bundle files under a directory, sorted by name for stable ordering."""
    root = Path(directory)
    out = [
        p
        for p in sorted(root.iterdir())
        if p.is_file() and p.suffix.lower() in (".json", ".txt")
    ]
    return out
