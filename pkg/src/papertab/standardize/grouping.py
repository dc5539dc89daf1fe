"""Row encoding, cluster labeling, group proposals, and plan application."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ..errors import GatewayError, PlanValidationError, UsageError
from ..extract import CellValue, DataRecord, TableSchema, cell_text, is_empty
from ..gateway import Gateway, ModelClass
from ..quality import column_inconsistency
from .binning import bin_numeric, try_float
from .clustering import KMEANS_SEED, cluster
from .projection import project_2d

LOGGER = logging.getLogger(__name__)

LABEL_MAX_WORDS = 6


def normalize_value(text: str) -> str:
    """The variant identity used for grouping and plan matching."""
    return text.strip().casefold()


@dataclass
class EncodedRow:
    text: str
    record_indices: list[int]

    @property
    def frequency(self) -> int:
        return len(self.record_indices)


def encode_rows(
    records: list[DataRecord], columns: list[str], schema: TableSchema
) -> list[EncodedRow]:
    """Records rendered as "column: value" texts, deduplicated with counts.

    Numeric columns are binned to low/medium/high first; Empty and
    unparseable numeric cells render as "empty".
    """
    if not columns:
        raise UsageError("select at least one column")
    known = set(schema.column_names)
    for column in columns:
        if column not in known:
            raise UsageError(f"unknown column {column!r}")
    kind_by_name = {c.name: c.declared_kind for c in schema.columns}

    bin_labels: dict[str, dict[int, str]] = {}
    for column in columns:
        if kind_by_name[column] not in ("float", "int"):
            continue
        numeric: list[tuple[int, float]] = []
        for i, record in enumerate(records):
            value = record.cells.get(column)
            if value is None or is_empty(value):
                continue
            parsed = try_float(cell_text(value))
            if parsed is not None:
                numeric.append((i, parsed))
        if numeric:
            labels = bin_numeric([v for _, v in numeric])
            bin_labels[column] = {i: lab for (i, _), lab in zip(numeric, labels)}
        else:
            bin_labels[column] = {}

    encoded: dict[str, EncodedRow] = {}
    for i, record in enumerate(records):
        parts = []
        for column in columns:
            value = record.cells.get(column)
            if column in bin_labels:
                rendered = bin_labels[column].get(i, "empty")
            elif value is None or is_empty(value):
                rendered = "empty"
            else:
                rendered = cell_text(value).strip() or "empty"
            parts.append(f"{column}: {rendered}")
        text = "; ".join(parts)
        if text in encoded:
            encoded[text].record_indices.append(i)
        else:
            encoded[text] = EncodedRow(text=text, record_indices=[i])
    return list(encoded.values())


def label_cluster(gateway: Gateway | None, members: dict[str, int]) -> str:
    """Short label for a group of value variants; falls back to the mode."""
    if not members:
        raise UsageError("label_cluster needs at least one member")
    ranked = sorted(members.items(), key=lambda kv: (-kv[1], kv[0]))
    fallback = ranked[0][0]
    if len(members) == 1 or gateway is None:
        return fallback
    listing = "\n".join(f"- {variant}: {count}" for variant, count in ranked)
    try:
        label = gateway.complete(
            "cluster_label", {"members": listing}, ModelClass.SUMMARIZER
        ).strip()
    except GatewayError:
        LOGGER.warning("cluster label degraded to most frequent variant")
        return fallback
    if not label:
        return fallback
    words = label.split()
    return " ".join(words[:LABEL_MAX_WORDS])


@dataclass
class GroupPoint:
    x: float
    y: float
    cluster_id: int
    frequency: int
    variant: str
    record_indices: list[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "x": self.x,
            "y": self.y,
            "cluster_id": self.cluster_id,
            "frequency": self.frequency,
            "variant": self.variant,
            "record_indices": self.record_indices,
        }


@dataclass
class ClusterInfo:
    cluster_id: int
    label: str
    members: dict[str, int]
    frequency_tier: str = "medium"

    def to_dict(self) -> dict:
        return {
            "cluster_id": self.cluster_id,
            "label": self.label,
            "members": self.members,
            "frequency_tier": self.frequency_tier,
        }


@dataclass
class GroupingResult:
    column: str
    points: list[GroupPoint]
    clusters: list[ClusterInfo]
    k: int

    def to_dict(self) -> dict:
        return {
            "column": self.column,
            "points": [p.to_dict() for p in self.points],
            "clusters": [c.to_dict() for c in self.clusters],
            "k": self.k,
        }


@dataclass
class StandardizationPlan:
    column: str
    groups: dict[str, list[str]]
    canonical: dict[str, str]

    def validate(self) -> None:
        if not self.column:
            raise PlanValidationError("plan has no target column")
        owner: dict[str, str] = {}
        for group, variants in self.groups.items():
            for variant in variants:
                key = normalize_value(variant)
                if key in owner and owner[key] != group:
                    raise PlanValidationError(
                        f"variant {variant!r} appears in both "
                        f"{owner[key]!r} and {group!r}"
                    )
                owner[key] = group
        for group, canonical in self.canonical.items():
            if not canonical.strip():
                continue
            key = normalize_value(canonical)
            if key in owner and owner[key] != group:
                raise PlanValidationError(
                    f"canonical {canonical!r} of group {group!r} is a variant "
                    f"of group {owner[key]!r}; applying twice would diverge"
                )

    def to_dict(self) -> dict:
        return {
            "column": self.column,
            "groups": {g: list(vs) for g, vs in self.groups.items()},
            "canonical": dict(self.canonical),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "StandardizationPlan":
        return cls(
            column=data.get("column", ""),
            groups={g: list(vs) for g, vs in data.get("groups", {}).items()},
            canonical=dict(data.get("canonical", {})),
        )


def _column_variants(
    records: list[DataRecord], column: str
) -> dict[str, tuple[str, int, list[int]]]:
    """normalized key → (display text, count, record indices), insertion order."""
    variants: dict[str, tuple[str, int, list[int]]] = {}
    for i, record in enumerate(records):
        value = record.cells.get(column)
        if value is None or is_empty(value):
            continue
        text = cell_text(value)
        key = normalize_value(text)
        if not key:
            continue
        if key in variants:
            display, count, indices = variants[key]
            variants[key] = (display, count + 1, indices + [i])
        else:
            variants[key] = (text.strip(), 1, [i])
    return variants


def propose_groups(
    gateway: Gateway,
    records: list[DataRecord],
    column: str,
    seed: int = KMEANS_SEED,
) -> tuple[StandardizationPlan, GroupingResult]:
    """Initial grouping of a column's value variants, clustered in embedding space."""
    if not any(column in r.cells for r in records):
        raise UsageError(f"unknown column {column!r}")
    variants = _column_variants(records, column)
    if not variants:
        return (
            StandardizationPlan(column=column, groups={}, canonical={}),
            GroupingResult(column=column, points=[], clusters=[], k=0),
        )

    entries = list(variants.values())
    texts = [f"{column}: {display}" for display, _, _ in entries]
    vectors = np.vstack(gateway.embed(texts))
    result = cluster(vectors, k=None, seed=seed)
    coords = project_2d(vectors)

    members_by_cluster: dict[int, dict[str, int]] = {}
    indices_by_cluster: dict[int, list[int]] = {}
    for idx, (display, count, _) in enumerate(entries):
        cid = int(result.labels[idx])
        members_by_cluster.setdefault(cid, {})[display] = count
        indices_by_cluster.setdefault(cid, []).append(idx)

    cluster_ids = sorted(members_by_cluster)
    sizes = [sum(members_by_cluster[cid].values()) for cid in cluster_ids]
    tiers = bin_numeric([float(s) for s in sizes]) if sizes else []

    groups: dict[str, list[str]] = {}
    canonical: dict[str, str] = {}
    clusters: list[ClusterInfo] = []
    used_names: set[str] = set()
    for cid, tier in zip(cluster_ids, tiers):
        members = members_by_cluster[cid]
        name = label_cluster(gateway, members)
        base = name
        suffix = 2
        while name in used_names:
            name = f"{base} ({suffix})"
            suffix += 1
        used_names.add(name)
        ranked = sorted(members.items(), key=lambda kv: (-kv[1], kv[0]))
        groups[name] = [variant for variant, _ in ranked]
        canonical[name] = ranked[0][0]
        clusters.append(
            ClusterInfo(cluster_id=cid, label=name, members=members, frequency_tier=tier)
        )

    points = [
        GroupPoint(
            x=float(coords[idx, 0]),
            y=float(coords[idx, 1]),
            cluster_id=int(result.labels[idx]),
            frequency=count,
            variant=display,
            record_indices=rec_indices,
        )
        for idx, (display, count, rec_indices) in enumerate(entries)
    ]
    plan = StandardizationPlan(column=column, groups=groups, canonical=canonical)
    plan.validate()
    return plan, GroupingResult(
        column=column, points=points, clusters=clusters, k=result.k
    )


@dataclass
class ChangeEntry:
    doc_id: str
    column: str
    old: str
    new: str
    record_index: int

    def to_dict(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "column": self.column,
            "old": self.old,
            "new": self.new,
            "record_index": self.record_index,
        }


@dataclass
class ChangeReport:
    column: str
    changes: list[ChangeEntry]
    stale_variants: list[str]
    skipped_groups: list[str]
    inconsistency_before: float | None
    inconsistency_after: float | None

    def to_dict(self) -> dict:
        return {
            "column": self.column,
            "changes": [c.to_dict() for c in self.changes],
            "stale_variants": self.stale_variants,
            "skipped_groups": self.skipped_groups,
            "inconsistency_before": self.inconsistency_before,
            "inconsistency_after": self.inconsistency_after,
        }


def apply_plan(records: list[DataRecord], plan: StandardizationPlan) -> ChangeReport:
    """Rewrite grouped variants to their canonical values, logging every edit.

    Validation runs before any mutation; Empty cells are never touched;
    reapplying the same plan is a no-op.
    """
    plan.validate()
    column = plan.column
    if not any(column in r.cells for r in records):
        raise UsageError(f"unknown column {column!r}")

    target: dict[str, str] = {}
    skipped: list[str] = []
    for group, variants in plan.groups.items():
        canonical = plan.canonical.get(group, "").strip()
        if not canonical:
            skipped.append(group)
            continue
        for variant in variants:
            target[normalize_value(variant)] = canonical

    present = {
        normalize_value(cell_text(r.cells[column]))
        for r in records
        if column in r.cells and not is_empty(r.cells[column])
    }
    stale = sorted(
        {
            variant
            for group, variants in plan.groups.items()
            if group not in skipped
            for variant in variants
            if normalize_value(variant) not in present
        }
    )

    before = column_inconsistency(records, column)
    changes: list[ChangeEntry] = []
    for i, record in enumerate(records):
        value = record.cells.get(column)
        if value is None or is_empty(value):
            continue
        old = cell_text(value)
        canonical = target.get(normalize_value(old))
        if canonical is None or old == canonical:
            continue
        record.cells[column] = CellValue(text=canonical)
        changes.append(
            ChangeEntry(
                doc_id=record.doc_id, column=column, old=old, new=canonical, record_index=i
            )
        )
    after = column_inconsistency(records, column)
    return ChangeReport(
        column=column,
        changes=changes,
        stale_variants=stale,
        skipped_groups=skipped,
        inconsistency_before=before,
        inconsistency_after=after,
    )
