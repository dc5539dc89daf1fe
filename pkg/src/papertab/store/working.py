"""Working table: the editable result of one query, with flag acknowledgments."""
from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field
from typing import Any

from ..errors import UsageError
from ..extract import (
    FLAG_EMPTY_CELLS,
    DataRecord,
    TableSchema,
    cell_text,
    is_empty,
    make_cell,
)
from ..quality import (
    QualityScores,
    QualityThresholds,
    TableQuality,
    column_inconsistency,
    flag_records,
    missingness,
)

LOGGER = logging.getLogger(__name__)

ACTORS = ("user", "standardizer", "extractor")


@dataclass
class ChangeLogEntry:
    """One append-only audit record for a cell or flag transition."""

    timestamp: float
    actor: str
    doc_id: str
    column: str
    old: str
    new: str
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "timestamp": self.timestamp,
            "actor": self.actor,
            "doc_id": self.doc_id,
            "column": self.column,
            "old": self.old,
            "new": self.new,
            "note": self.note,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ChangeLogEntry":
        return cls(
            timestamp=float(data["timestamp"]),
            actor=data["actor"],
            doc_id=data["doc_id"],
            column=data["column"],
            old=data["old"],
            new=data["new"],
            note=data.get("note", ""),
        )


def _log_entry(actor: str, doc_id: str, column: str, old: str, new: str, note: str = "") -> ChangeLogEntry:
    if actor not in ACTORS:
        raise UsageError(f"unknown actor {actor!r}")
    return ChangeLogEntry(
        timestamp=time.time(),
        actor=actor,
        doc_id=doc_id,
        column=column,
        old=old,
        new=new,
        note=note,
    )


def _flag_fingerprint(record: DataRecord) -> str:
    """State a flag acknowledgment is pinned to; changes re-raise the flag."""
    scores = record.quality.to_dict() if isinstance(record.quality, QualityScores) else {}
    empties = sorted(name for name, v in record.cells.items() if is_empty(v))
    return json.dumps({"scores": scores, "empty": empties}, sort_keys=True)


@dataclass
class WorkingTable:
    schema: TableSchema
    records: list[DataRecord]
    quality: TableQuality | None = None
    revision: int = 0
    change_log: list[ChangeLogEntry] = field(default_factory=list)
    acknowledged: dict[tuple[str, int], dict[str, str]] = field(default_factory=dict)

    def record_at(self, doc_id: str, ordinal: int) -> DataRecord:
        matches = [r for r in self.records if r.doc_id == doc_id]
        if not matches:
            raise UsageError(f"unknown document {doc_id!r}")
        if not 0 <= ordinal < len(matches):
            raise UsageError(f"document {doc_id!r} has no record #{ordinal}")
        return matches[ordinal]

    def ordinal_of(self, record: DataRecord) -> int:
        seen = 0
        for other in self.records:
            if other is record:
                return seen
            if other.doc_id == record.doc_id:
                seen += 1
        raise UsageError("record is not part of this table")

    def visible_flags(self, doc_id: str, ordinal: int) -> set[str]:
        """Raised flags minus still-valid acknowledgments."""
        record = self.record_at(doc_id, ordinal)
        acks = self.acknowledged.get((doc_id, ordinal), {})
        current = _flag_fingerprint(record)
        return {
            flag
            for flag in record.flags
            if acks.get(flag) != current
        }

    def refresh_metrics(self) -> None:
        """Recompute missingness and per-column inconsistency from the records."""
        if self.quality is None:
            return
        self.quality.missingness = missingness(self.records)
        self.quality.column_inconsistency = {
            c.name: column_inconsistency(self.records, c.name)
            for c in self.schema.columns
        }


def edit_cell(
    table: WorkingTable,
    doc_id: str,
    ordinal: int,
    column: str,
    value: Any,
    actor: str = "user",
) -> WorkingTable:
    """Replace one cell (Empty allowed in either direction); logged, revision +1."""
    record = table.record_at(doc_id, ordinal)
    if column not in record.cells:
        raise UsageError(f"unknown column {column!r}")
    old = cell_text(record.cells[column])
    cell = make_cell(value)
    record.cells[column] = cell
    table.change_log.append(
        _log_entry(actor, doc_id, column, old, cell_text(cell))
    )
    if any(is_empty(v) for v in record.cells.values()):
        record.flags.add(FLAG_EMPTY_CELLS)
    else:
        record.flags.discard(FLAG_EMPTY_CELLS)
    table.refresh_metrics()
    table.revision += 1
    return table


def clear_flags(
    table: WorkingTable,
    doc_id: str,
    ordinal: int,
    flags: list[str] | None = None,
) -> WorkingTable:
    """Acknowledge raised flags; they stay hidden until the pinned state changes."""
    record = table.record_at(doc_id, ordinal)
    to_clear = set(flags) if flags is not None else set(record.flags)
    fingerprint = _flag_fingerprint(record)
    acks = table.acknowledged.setdefault((doc_id, ordinal), {})
    for flag in sorted(to_clear & record.flags):
        acks[flag] = fingerprint
        table.change_log.append(
            _log_entry("user", doc_id, f"flags:{flag}", "raised", "acknowledged")
        )
    table.revision += 1
    return table


def refresh_flags(
    table: WorkingTable, thresholds: QualityThresholds | None = None
) -> WorkingTable:
    """Recompute data-driven flags; drop acknowledgments whose state changed."""
    flag_records(table.records, thresholds)
    for (doc_id, ordinal), acks in list(table.acknowledged.items()):
        record = table.record_at(doc_id, ordinal)
        current = _flag_fingerprint(record)
        for flag, pinned in list(acks.items()):
            if pinned != current:
                del acks[flag]
        if not acks:
            del table.acknowledged[(doc_id, ordinal)]
    table.revision += 1
    return table
