"""Mechanical table scorer: exact match 2, token containment 1, otherwise 0.

This is a regression-tracking approximation of a human grading pass. A value
scores 2 when it matches the reference exactly after normalization (trim,
casefold, whitespace collapse), 1 when one side's tokens are a strict subset
of the other's (partially correct), and 0 otherwise. Documents with several
records contribute their best value per dimension.
"""
from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field

LOGGER = logging.getLogger(__name__)

_WS_RE = re.compile(r"\s+")
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def normalize(text: str) -> str:
    return _WS_RE.sub(" ", text.strip().casefold())


def tokens(text: str) -> set[str]:
    return set(_TOKEN_RE.findall(normalize(text)))


def pair_score(generated: str, gold: str) -> int:
    """0, 1, or 2 for one generated value against one reference value."""
    gen_norm = normalize(generated)
    gold_norm = normalize(gold)
    if gen_norm == gold_norm:
        return 2
    if not gen_norm or not gold_norm:
        return 0
    gen_tokens = tokens(generated)
    gold_tokens = tokens(gold)
    if not gen_tokens or not gold_tokens:
        return 0
    if gen_tokens <= gold_tokens or gold_tokens <= gen_tokens:
        return 1
    return 0


@dataclass
class ScoredCell:
    doc_id: str
    dimension: str
    score: int
    generated: str
    gold: str
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "dimension": self.dimension,
            "score": self.score,
            "generated": self.generated,
            "gold": self.gold,
            "note": self.note,
        }


@dataclass
class EvalReport:
    cells: list[ScoredCell] = field(default_factory=list)
    dimension_totals: dict[str, int] = field(default_factory=dict)
    grand_total: int = 0
    max_total: int = 0
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "cells": [c.to_dict() for c in self.cells],
            "dimension_totals": self.dimension_totals,
            "grand_total": self.grand_total,
            "max_total": self.max_total,
            "notes": self.notes,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, ensure_ascii=False)


def _values_by_doc(
    rows: dict[tuple[str, int], dict[str, str]], dimension: str
) -> dict[str, list[str]]:
    out: dict[str, list[str]] = {}
    for (doc_id, _ordinal), cells in sorted(rows.items()):
        out.setdefault(doc_id, []).append(cells.get(dimension, ""))
    return out


def score_tables(
    generated_rows: dict[tuple[str, int], dict[str, str]],
    gold_rows: dict[tuple[str, int], dict[str, str]],
    dimensions: list[str],
) -> EvalReport:
    """Per-(document, dimension) grades of a generated table against a reference."""
    report = EvalReport()
    gold_docs = sorted({doc_id for doc_id, _ in gold_rows})
    generated_docs = {doc_id for doc_id, _ in generated_rows}
    for dimension in dimensions:
        gen_by_doc = _values_by_doc(generated_rows, dimension)
        gold_by_doc = _values_by_doc(gold_rows, dimension)
        total = 0
        for doc_id in gold_docs:
            gold_values = [v for v in gold_by_doc.get(doc_id, []) if v]
            note = ""
            if doc_id not in generated_docs:
                best, gen_shown = 0, ""
                note = "document missing from generated table"
            else:
                gen_values = gen_by_doc.get(doc_id, [])
                best, gen_shown = -1, ""
                candidates = gold_values or [""]
                for gen in gen_values or [""]:
                    for gold in candidates:
                        s = pair_score(gen, gold)
                        if s > best:
                            best, gen_shown = s, gen
                best = max(best, 0)
            report.cells.append(
                ScoredCell(
                    doc_id=doc_id,
                    dimension=dimension,
                    score=best,
                    generated=gen_shown,
                    gold="; ".join(gold_values),
                    note=note,
                )
            )
            if note:
                report.notes.append(f"{doc_id}: {note}")
            total += best
        report.dimension_totals[dimension] = total
        report.grand_total += total
    report.max_total = 2 * len(gold_docs) * len(dimensions)
    seen = set()
    report.notes = [n for n in report.notes if not (n in seen or seen.add(n))]
    return report
