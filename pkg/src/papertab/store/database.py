"""Accumulated database: outer-join merges, CSV export, snapshot persistence."""
from __future__ import annotations

import csv
import io
import json
import logging
import os
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import ConflictError, FormatError, StorageError, UsageError
from ..extract import EMPTY, cell_text, is_empty
from .working import ChangeLogEntry, WorkingTable, _log_entry

LOGGER = logging.getLogger(__name__)

SNAPSHOT_VERSION = 1
SNAPSHOT_FILE = "db_snapshot.json"
CHANGELOG_FILE = "db_changes.jsonl"
LOCK_FILE = "db.lock"

MERGE_POLICIES = ("incoming_wins", "keep_existing", "fail")

RowKey = tuple[str, int]


@dataclass
class Database:
    """Rows keyed by (doc_id, ordinal) over a first-merged-order column registry."""

    columns: list[str] = field(default_factory=list)
    rows: dict[RowKey, dict[str, str]] = field(default_factory=dict)
    provenance: dict[RowKey, dict[str, list]] = field(default_factory=dict)
    change_log: list[ChangeLogEntry] = field(default_factory=list)
    revision: int = 0

    def cell(self, doc_id: str, ordinal: int, column: str):
        row = self.rows.get((doc_id, ordinal))
        if row is None or column not in row:
            return EMPTY
        return row[column] if row[column] else EMPTY

    def sorted_keys(self) -> list[RowKey]:
        return sorted(self.rows)


def _table_rows(table: WorkingTable) -> dict[RowKey, dict[str, str]]:
    """Incoming rows keyed by (doc_id, per-doc extraction ordinal)."""
    counters: dict[str, int] = {}
    out: dict[RowKey, dict[str, str]] = {}
    for record in table.records:
        ordinal = counters.get(record.doc_id, 0)
        counters[record.doc_id] = ordinal + 1
        cells = {
            name: cell_text(record.cells[name])
            for name in (c.name for c in table.schema.columns)
            if name in record.cells
        }
        # Empty cells are represented by absence, so rows built in any order
        # compare equal.
        out[(record.doc_id, ordinal)] = {k: v for k, v in cells.items() if v}
    return out


def _table_provenance(table: WorkingTable) -> dict[RowKey, dict[str, list]]:
    counters: dict[str, int] = {}
    out: dict[RowKey, dict[str, list]] = {}
    for record in table.records:
        ordinal = counters.get(record.doc_id, 0)
        counters[record.doc_id] = ordinal + 1
        if record.provenance:
            out[(record.doc_id, ordinal)] = {
                column: [
                    span.to_dict() if hasattr(span, "to_dict") else dict(span)
                    for span in spans
                ]
                for column, spans in record.provenance.items()
            }
    return out


def merge_into_db(
    db: Database, table: WorkingTable, policy: str = "incoming_wins"
) -> Database:
    """Full outer join on (doc_id, ordinal); collisions resolved by `policy`."""
    if policy not in MERGE_POLICIES:
        raise UsageError(f"unknown merge policy {policy!r}")
    incoming = _table_rows(table)
    incoming_prov = _table_provenance(table)
    schema_columns = [c.name for c in table.schema.columns]

    conflicts: list[tuple[RowKey, str, str, str]] = []
    for key, cells in incoming.items():
        existing = db.rows.get(key)
        if existing is None:
            continue
        for column, value in cells.items():
            old = existing.get(column, "")
            if old and value and old != value:
                conflicts.append((key, column, old, value))
    if policy == "fail" and conflicts:
        (doc_id, ordinal), column, old, value = conflicts[0]
        raise ConflictError(
            f"merge conflict at ({doc_id!r}, {ordinal}) column {column!r}: "
            f"existing {old!r} vs incoming {value!r}"
        )

    changed = False
    for column in schema_columns:
        if column not in db.columns:
            db.columns.append(column)
            changed = True

    conflict_keys = {(key, column) for key, column, _, _ in conflicts}
    for key, cells in incoming.items():
        doc_id, ordinal = key
        existing = db.rows.get(key)
        if existing is None:
            db.rows[key] = dict(cells)
            changed = True
            if key in incoming_prov:
                db.provenance[key] = incoming_prov[key]
            continue
        for column, value in cells.items():
            old = existing.get(column, "")
            if (key, column) in conflict_keys:
                if policy == "keep_existing":
                    db.change_log.append(
                        _log_entry(
                            "extractor", doc_id, column, old, old,
                            note=f"kept existing over incoming {value!r}",
                        )
                    )
                    continue
                existing[column] = value
                changed = True
                db.change_log.append(
                    _log_entry(
                        "extractor", doc_id, column, old, value,
                        note="merge conflict: incoming value replaced existing",
                    )
                )
            elif value and not old:
                existing[column] = value
                changed = True
        if key in incoming_prov:
            merged = db.provenance.setdefault(key, {})
            for column, spans in incoming_prov[key].items():
                if (key, column) in conflict_keys and policy == "keep_existing":
                    continue
                merged[column] = spans
    if changed:
        db.revision += 1
    return db


def export_csv(db: Database) -> str:
    """The whole database as CSV: doc_id, ordinal, then registry columns."""
    if not db.rows:
        raise UsageError("database has no rows to export")
    buffer = io.StringIO()
    writer = csv.writer(buffer, quoting=csv.QUOTE_MINIMAL, lineterminator="\n")
    writer.writerow(["doc_id", "ordinal", *db.columns])
    for doc_id, ordinal in db.sorted_keys():
        row = db.rows[(doc_id, ordinal)]
        writer.writerow([doc_id, str(ordinal), *(row.get(c, "") for c in db.columns)])
    return buffer.getvalue()


def parse_csv(text: str) -> Database:
    """Database from CSV produced by export_csv (Empty cells are blank fields)."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise FormatError("CSV is empty") from None
    if header[:2] != ["doc_id", "ordinal"]:
        raise FormatError(
            f"CSV header must start with doc_id, ordinal (got {header[:2]})"
        )
    columns = header[2:]
    db = Database(columns=list(columns))
    for line_no, fields in enumerate(reader, start=2):
        if not fields:
            continue
        if len(fields) != len(header):
            raise FormatError(
                f"line {line_no}: expected {len(header)} fields, got {len(fields)}"
            )
        doc_id = fields[0]
        try:
            ordinal = int(fields[1])
        except ValueError:
            raise FormatError(f"line {line_no}: ordinal {fields[1]!r} is not an integer") from None
        key = (doc_id, ordinal)
        if key in db.rows:
            raise FormatError(f"line {line_no}: duplicate row {key}")
        db.rows[key] = {c: v for c, v in zip(columns, fields[2:]) if v}
    return db


class SingleWriterLock:
    """Exclusive advisory lock: one writer at a time, waiting writers serialize."""

    def __init__(self, path: str | Path, timeout: float = 10.0, poll: float = 0.01):
        self.path = Path(path)
        self.timeout = timeout
        self.poll = poll
        self._fd: int | None = None

    def __enter__(self) -> "SingleWriterLock":
        deadline = time.monotonic() + self.timeout
        while True:
            try:
                self._fd = os.open(self.path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
                os.write(self._fd, str(os.getpid()).encode("ascii"))
                return self
            except FileExistsError:
                if time.monotonic() >= deadline:
                    raise StorageError(f"could not acquire writer lock {self.path}") from None
                time.sleep(self.poll)

    def __exit__(self, *exc) -> None:
        if self._fd is not None:
            os.close(self._fd)
            self._fd = None
        try:
            self.path.unlink()
        except FileNotFoundError:
            pass


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def persist(db: Database, directory: str | Path) -> Path:
    """Write the snapshot plus line-delimited change log under `directory`."""
    root = Path(directory)
    root.mkdir(parents=True, exist_ok=True)
    snapshot = {
        "format_version": SNAPSHOT_VERSION,
        "columns": db.columns,
        "revision": db.revision,
        "rows": [
            {
                "doc_id": doc_id,
                "ordinal": ordinal,
                "cells": db.rows[(doc_id, ordinal)],
                "provenance": db.provenance.get((doc_id, ordinal), {}),
            }
            for doc_id, ordinal in db.sorted_keys()
        ],
    }
    log_lines = "".join(
        json.dumps(entry.to_dict(), ensure_ascii=False) + "\n"
        for entry in db.change_log
    )
    with SingleWriterLock(root / LOCK_FILE):
        _atomic_write(root / SNAPSHOT_FILE, json.dumps(snapshot, ensure_ascii=False, indent=1))
        _atomic_write(root / CHANGELOG_FILE, log_lines)
    return root / SNAPSHOT_FILE


def load(directory: str | Path) -> Database:
    """Database from a persisted snapshot; corrupt or alien files raise."""
    root = Path(directory)
    snap_path = root / SNAPSHOT_FILE
    if not snap_path.exists():
        raise StorageError(f"no snapshot at {snap_path}")
    try:
        snapshot = json.loads(snap_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise StorageError(f"snapshot {snap_path} is not valid JSON: {exc}") from exc
    version = snapshot.get("format_version")
    if version != SNAPSHOT_VERSION:
        raise StorageError(
            f"snapshot version {version!r} unsupported (expected {SNAPSHOT_VERSION})"
        )
    db = Database(
        columns=list(snapshot.get("columns", [])),
        revision=int(snapshot.get("revision", 0)),
    )
    for row in snapshot.get("rows", []):
        key = (row["doc_id"], int(row["ordinal"]))
        db.rows[key] = dict(row.get("cells", {}))
        prov = row.get("provenance", {})
        if prov:
            db.provenance[key] = prov
    log_path = root / CHANGELOG_FILE
    if log_path.exists():
        for line in log_path.read_text(encoding="utf-8").splitlines():
            if line.strip():
                db.change_log.append(ChangeLogEntry.from_dict(json.loads(line)))
    return db
