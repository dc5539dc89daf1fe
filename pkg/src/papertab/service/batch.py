"""Headless batch run: bundles + attribute form in, CSV + quality sidecar out."""
from __future__ import annotations

import csv
import io
import json
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from ..errors import ConfigError, FormatError, UsageError
from ..gateway import Gateway, GatewayConfig, build_provider, mock_gateway
from ..pipeline import DEFAULT_K, index_bundles, prepare_bundle, run_query
from ..ingest import discover_bundle_files, load_bundles
from ..store import Database, export_csv, merge_into_db, parse_csv
from .scoring import EvalReport, score_tables

LOGGER = logging.getLogger(__name__)

BASE_URL_ENV = "PAPERTAB_BASE_URL"


def build_gateway(
    mock: bool, cache_dir: str | None = None, config_path: str | None = None
) -> Gateway:
    if mock:
        return mock_gateway(cache_dir=cache_dir)
    if config_path:
        config = GatewayConfig.from_file(config_path)
    else:
        base_url = os.environ.get(BASE_URL_ENV, "").strip()
        if not base_url:
            raise ConfigError(
                f"live runs need --config or the {BASE_URL_ENV} environment variable"
            )
        config = GatewayConfig(provider="http", base_url=base_url)
    if cache_dir:
        config.cache_dir = cache_dir
    return Gateway(build_provider(config), config)


@dataclass
class BatchResult:
    csv_path: Path
    sidecar_path: Path
    records: int
    documents: int
    degraded_docs: int
    outcome: Any = None
    raw_chunks: dict[str, str] = field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        return 1 if self.degraded_docs else 0


def load_attributes(path: str | Path) -> dict[str, str]:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read attributes file {path}: {exc}") from exc
    if not isinstance(data, dict) or not data:
        raise UsageError("attributes file must be a nonempty JSON object")
    return {str(k): str(v) for k, v in data.items()}


def batch_extract(
    bundles_dir: str | Path,
    attributes_path: str | Path | None,
    out_path: str | Path,
    gateway: Gateway,
    k: int = DEFAULT_K,
    seed: int = 0,
    question: str | None = None,
) -> BatchResult:
    """ingest -> index -> extract -> quality -> CSV, entirely unattended."""
    if attributes_path is not None and question:
        raise UsageError("pass either an attributes file or a question, not both")
    if attributes_path is None and not (question and question.strip()):
        raise UsageError("batch extraction needs an attributes file or a question")
    files = discover_bundle_files(bundles_dir)
    if not files:
        raise UsageError(f"no bundle files found under {bundles_dir}")
    bundles = load_bundles(files)
    attributes = load_attributes(attributes_path) if attributes_path else None

    for bundle in bundles:
        prepare_bundle(gateway, bundle)
    collection = index_bundles(gateway, Path(bundles_dir).name or "batch", bundles)
    outcome = run_query(
        gateway, collection, question=question, attributes=attributes, k=k
    )

    db = merge_into_db(Database(), outcome.table)
    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(export_csv(db), encoding="utf-8")

    table = outcome.table
    sidecar = {
        "question": outcome.question,
        "columns": table.schema.column_names,
        "k": k,
        "seed": seed,
        "documents": len(bundles),
        "records": len(table.records),
        "degraded_docs": outcome.degraded_docs,
        "summary": outcome.summary,
        "quality": table.quality.to_dict() if table.quality else None,
        "record_flags": [
            {"doc_id": r.doc_id, "flags": sorted(r.flags)} for r in table.records
        ],
    }
    sidecar_path = Path(str(out) + ".quality.json")
    sidecar_path.write_text(
        json.dumps(sidecar, indent=1, ensure_ascii=False), encoding="utf-8"
    )
    return BatchResult(
        csv_path=out,
        sidecar_path=sidecar_path,
        records=len(table.records),
        documents=len(bundles),
        degraded_docs=outcome.degraded_docs,
        outcome=outcome,
        raw_chunks=dict(collection.raw_by_id),
    )


def load_scorable(path: str | Path) -> tuple[dict[tuple[str, int], dict[str, str]], list[str]]:
    """Rows + dimension columns from a CSV, with or without an ordinal column."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        db = parse_csv(text)
        return db.rows, list(db.columns)
    except FormatError:
        pass
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise FormatError(f"{path}: CSV is empty") from None
    if not header or header[0] != "doc_id":
        raise FormatError(f"{path}: header must start with doc_id")
    columns = header[1:]
    rows: dict[tuple[str, int], dict[str, str]] = {}
    counters: dict[str, int] = {}
    for fields in reader:
        if not fields:
            continue
        doc_id = fields[0]
        ordinal = counters.get(doc_id, 0)
        counters[doc_id] = ordinal + 1
        rows[(doc_id, ordinal)] = {
            c: v for c, v in zip(columns, fields[1:]) if v
        }
    return rows, columns


def score_files(generated_path: str | Path, gold_path: str | Path) -> EvalReport:
    generated_rows, _ = load_scorable(generated_path)
    gold_rows, gold_columns = load_scorable(gold_path)
    dimensions = [c for c in gold_columns if c not in ("doc_id", "ordinal")]
    if not dimensions:
        raise UsageError("gold table has no scorable dimensions")
    return score_tables(generated_rows, gold_rows, dimensions)
