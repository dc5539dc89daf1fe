"""Unsupervised quality metrics over extracted tables, and the flag rules."""
from __future__ import annotations

import logging
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..errors import GatewayError, StructuredOutputError, UsageError
from ..extract import (
    FLAG_EMPTY_CELLS,
    FLAG_LOW_RELEVANCE,
    DataRecord,
    cell_text,
    is_empty,
)
from ..gateway import Gateway, ModelClass

LOGGER = logging.getLogger(__name__)

RECONSTRUCTED_QUESTIONS = 3

_SENTENCE_SPLIT_RE = re.compile(r"(?<=[.!?])\s+|\n+")


@dataclass
class QualityScores:
    answer_relevancy: float | None = None
    context_relevancy: float | None = None
    faithfulness: float | None = None

    def present(self) -> dict[str, float]:
        return {
            name: value
            for name, value in (
                ("answer_relevancy", self.answer_relevancy),
                ("context_relevancy", self.context_relevancy),
                ("faithfulness", self.faithfulness),
            )
            if value is not None
        }

    def to_dict(self) -> dict:
        return {
            "answer_relevancy": self.answer_relevancy,
            "context_relevancy": self.context_relevancy,
            "faithfulness": self.faithfulness,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "QualityScores":
        return cls(
            answer_relevancy=data.get("answer_relevancy"),
            context_relevancy=data.get("context_relevancy"),
            faithfulness=data.get("faithfulness"),
        )


@dataclass
class QualityThresholds:
    answer_relevancy: float = 0.5
    context_relevancy: float = 0.5
    faithfulness: float = 0.5

    def to_dict(self) -> dict:
        return {
            "answer_relevancy": self.answer_relevancy,
            "context_relevancy": self.context_relevancy,
            "faithfulness": self.faithfulness,
        }


@dataclass
class TableQuality:
    missingness: float
    column_inconsistency: dict[str, float | None]
    record_scores: list[QualityScores] = field(default_factory=list)
    thresholds: QualityThresholds = field(default_factory=QualityThresholds)

    def to_dict(self) -> dict:
        return {
            "missingness": self.missingness,
            "column_inconsistency": self.column_inconsistency,
            "record_scores": [s.to_dict() for s in self.record_scores],
            "thresholds": self.thresholds.to_dict(),
        }


def record_answer_text(record: DataRecord) -> str:
    """The record rendered as the answer text the judges evaluate."""
    parts = []
    for name, value in record.cells.items():
        parts.append(f"{name}: {'Empty' if is_empty(value) else cell_text(value)}")
    return "; ".join(parts)


def split_sentences(text: str) -> list[str]:
    return [s.strip() for s in _SENTENCE_SPLIT_RE.split(text) if s.strip()]


def _clamp01(x: float) -> float:
    return min(1.0, max(0.0, x))


def answer_relevancy(
    gateway: Gateway, question: str, answer_text: str, m: int = RECONSTRUCTED_QUESTIONS
) -> float | None:
    """Mean cosine between the question and m questions rebuilt from the answer."""
    if not answer_text.strip():
        raise UsageError("answer text is empty")
    try:
        value = gateway.complete_structured(
            "question_reconstruction",
            {"answer": answer_text, "count": str(m)},
            {
                "kind": "object",
                "required": {
                    "questions": {"kind": "list", "item": {"kind": "str"}, "min_len": 1}
                },
                "extra": "allow",
            },
        )
        reconstructed = [q for q in value["questions"] if q.strip()][:m]
        if not reconstructed:
            return None
        vectors = gateway.embed([question] + reconstructed)
    except (GatewayError, StructuredOutputError) as exc:
        LOGGER.warning("answer relevancy unavailable: %s", exc)
        return None
    origin = vectors[0]
    cosines = [float(np.dot(origin, v)) for v in vectors[1:]]
    return _clamp01(float(np.mean(cosines)))


def context_relevancy(
    gateway: Gateway, question: str, contexts: list[str]
) -> float | None:
    """Fraction of context sentences the judge marks relevant to the question."""
    if not contexts:
        raise UsageError("contexts are empty")
    sentences: list[str] = []
    for context in contexts:
        sentences.extend(split_sentences(context))
    if not sentences:
        return None
    numbered = "\n".join(f"{i}. {s}" for i, s in enumerate(sentences))
    try:
        value = gateway.complete_structured(
            "sentence_relevance",
            {"question": question, "count": str(len(sentences)), "sentences": numbered},
            {
                "kind": "object",
                "required": {
                    "relevant_indices": {"kind": "list", "item": {"kind": "number"}}
                },
                "extra": "allow",
            },
        )
    except (GatewayError, StructuredOutputError) as exc:
        LOGGER.warning("context relevancy unavailable: %s", exc)
        return None
    valid = {int(i) for i in value["relevant_indices"] if 0 <= int(i) < len(sentences)}
    return len(valid) / len(sentences)


def faithfulness(
    gateway: Gateway, answer_text: str, contexts: list[str]
) -> float | None:
    """Fraction of decomposed answer claims the judge finds supported."""
    if not answer_text.strip():
        raise UsageError("answer text is empty")
    try:
        decomposition = gateway.complete_structured(
            "claim_decomposition",
            {"answer": answer_text},
            {
                "kind": "object",
                "required": {"claims": {"kind": "list", "item": {"kind": "str"}}},
                "extra": "allow",
            },
        )
        claims = [c for c in decomposition["claims"] if c.strip()]
        if not claims:
            return None
        numbered = "\n".join(f"{i}. {c}" for i, c in enumerate(claims))
        verdicts = gateway.complete_structured(
            "claim_support",
            {
                "count": str(len(claims)),
                "claims": numbered,
                "contexts": "\n\n".join(contexts),
            },
            {
                "kind": "object",
                "required": {"supported": {"kind": "list", "item": {"kind": "bool"}}},
                "extra": "allow",
            },
        )
    except (GatewayError, StructuredOutputError) as exc:
        LOGGER.warning("faithfulness unavailable: %s", exc)
        return None
    supported = verdicts["supported"]
    if len(supported) != len(claims):
        LOGGER.warning(
            "faithfulness judge returned %d verdicts for %d claims",
            len(supported),
            len(claims),
        )
        return None
    return sum(1 for s in supported if s) / len(claims)


def missingness(records: list[DataRecord]) -> float:
    """Exact proportion of Empty cells across the table."""
    total = sum(len(r.cells) for r in records)
    if total == 0:
        raise UsageError("table has no cells")
    empty = sum(1 for r in records for v in r.cells.values() if is_empty(v))
    return empty / total


def inconsistency(values: list[str]) -> float:
    """Distinct / total over non-Empty values, compared after trim + casefold."""
    if not values:
        raise UsageError("inconsistency needs at least one non-Empty value")
    normalized = [v.strip().casefold() for v in values]
    return len(set(normalized)) / len(normalized)


def column_inconsistency(
    records: list[DataRecord], column: str
) -> float | None:
    values = [
        cell_text(r.cells[column])
        for r in records
        if column in r.cells and not is_empty(r.cells[column])
    ]
    if not values:
        return None
    return inconsistency(values)


def score_record(
    gateway: Gateway,
    question: str,
    record: DataRecord,
    contexts: list[str],
) -> QualityScores:
    """All three judge metrics for one record; all-Empty records get no scores."""
    if all(is_empty(v) for v in record.cells.values()):
        return QualityScores()
    answer = record_answer_text(record)
    scores = QualityScores(
        answer_relevancy=answer_relevancy(gateway, question, answer),
        context_relevancy=context_relevancy(gateway, question, contexts)
        if contexts
        else None,
        faithfulness=faithfulness(gateway, answer, contexts) if contexts else None,
    )
    return scores


def score_records(
    gateway: Gateway,
    question: str,
    records: list[DataRecord],
    chunks_by_id: dict[str, str],
    max_workers: int | None = None,
) -> None:
    """Attach QualityScores to each record, fanning out per record."""

    def work(record: DataRecord) -> None:
        contexts = [
            chunks_by_id[cid] for cid in record.context_ids if cid in chunks_by_id
        ]
        record.quality = score_record(gateway, question, record, contexts)

    workers = max_workers or gateway.config.budget
    if workers <= 1 or len(records) <= 1:
        for record in records:
            work(record)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        list(pool.map(work, records))


def flag_records(
    records: list[DataRecord], thresholds: QualityThresholds | None = None
) -> None:
    """Recompute empty_cells and low_relevance flags from current state."""
    thr = thresholds or QualityThresholds()
    limit_by_name = thr.to_dict()
    for record in records:
        if any(is_empty(v) for v in record.cells.values()):
            record.flags.add(FLAG_EMPTY_CELLS)
        else:
            record.flags.discard(FLAG_EMPTY_CELLS)
        scores = record.quality.present() if isinstance(record.quality, QualityScores) else {}
        if any(value < limit_by_name[name] for name, value in scores.items()):
            record.flags.add(FLAG_LOW_RELEVANCE)
        else:
            record.flags.discard(FLAG_LOW_RELEVANCE)


def table_quality(
    records: list[DataRecord],
    columns: list[str],
    thresholds: QualityThresholds | None = None,
) -> TableQuality:
    """Table-level rollup: missingness, per-column inconsistency, per-record scores."""
    return TableQuality(
        missingness=missingness(records),
        column_inconsistency={
            column: column_inconsistency(records, column) for column in columns
        },
        record_scores=[
            r.quality if isinstance(r.quality, QualityScores) else QualityScores()
            for r in records
        ],
        thresholds=thresholds or QualityThresholds(),
    )
