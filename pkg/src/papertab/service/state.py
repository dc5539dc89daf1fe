"""Service engine: collections, query lifecycles, and grouping operations."""
from __future__ import annotations

import logging
import threading
import uuid
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConflictError, NotFoundError, UsageError
from ..extract import cell_text, is_empty
from ..gateway import Gateway
from ..index import ContentChunk
from ..ingest import DocumentBundle, bundle_from_dict
from ..pipeline import (
    CollectionIndex,
    QueryOutcome,
    index_bundles,
    prepare_bundle,
    run_query,
)
from ..quality import QualityScores
from ..standardize import (
    ChangeReport,
    ClusterInfo,
    GroupPoint,
    GroupingResult,
    KMEANS_SEED,
    StandardizationPlan,
    apply_plan,
    cluster,
    encode_rows,
    label_cluster,
    project_2d,
    propose_groups,
)
from ..store import Database, WorkingTable, clear_flags, edit_cell, merge_into_db
from ..store.working import _log_entry

LOGGER = logging.getLogger(__name__)


@dataclass
class QueryState:
    query_id: str
    collection_id: str
    question: str
    attributes: dict[str, str] | None
    outcome: QueryOutcome | None = None

    @property
    def table(self) -> WorkingTable:
        if self.outcome is None:
            raise ConflictError(f"query {self.query_id} is still running")
        return self.outcome.table


@dataclass
class CollectionState:
    collection_id: str
    bundles: list[DocumentBundle] = field(default_factory=list)
    index: CollectionIndex | None = None
    queries: dict[str, QueryState] = field(default_factory=dict)
    db: Database = field(default_factory=Database)
    lock: threading.RLock = field(default_factory=threading.RLock)


class Engine:
    """All collection state plus the operations the HTTP layer exposes."""

    def __init__(self, gateway: Gateway):
        self.gateway = gateway
        self.collections: dict[str, CollectionState] = {}
        self.query_owner: dict[str, str] = {}
        self._lock = threading.Lock()

    # -- lookups -----------------------------------------------------------

    def collection(self, collection_id: str) -> CollectionState:
        state = self.collections.get(collection_id)
        if state is None:
            raise NotFoundError(f"unknown collection {collection_id!r}")
        return state

    def query(self, query_id: str) -> tuple[CollectionState, QueryState]:
        owner = self.query_owner.get(query_id)
        if owner is None:
            raise NotFoundError(f"unknown query {query_id!r}")
        collection = self.collection(owner)
        return collection, collection.queries[query_id]

    # -- collection lifecycle ----------------------------------------------

    def create_collection(self, collection_id: str | None = None) -> CollectionState:
        with self._lock:
            cid = (collection_id or "").strip() or f"col-{uuid.uuid4().hex[:8]}"
            if cid in self.collections:
                raise ConflictError(f"collection {cid!r} already exists")
            state = CollectionState(collection_id=cid)
            self.collections[cid] = state
            return state

    def add_bundles(
        self, collection_id: str, payloads: list[dict]
    ) -> list[DocumentBundle]:
        """Parse and stage bundles; enrichment/indexing happens in the job."""
        collection = self.collection(collection_id)
        if not payloads:
            raise UsageError("no bundles in request")
        bundles = [bundle_from_dict(p) for p in payloads]
        with collection.lock:
            known = {b.doc_id for b in collection.bundles}
            for bundle in bundles:
                if bundle.doc_id in known:
                    raise ConflictError(
                        f"doc_id {bundle.doc_id!r} already in collection"
                    )
                known.add(bundle.doc_id)
            collection.bundles.extend(bundles)
        return bundles

    def ingest_work(self, collection_id: str) -> dict:
        """Job body: enrich all bundles and rebuild the collection index."""
        collection = self.collection(collection_id)
        with collection.lock:
            for bundle in collection.bundles:
                prepare_bundle(self.gateway, bundle)
            collection.index = index_bundles(
                self.gateway, collection_id, collection.bundles
            )
            return {
                "collection_id": collection_id,
                "documents": len(collection.bundles),
                "chunks": len(collection.index.chunks),
            }

    # -- queries -------------------------------------------------------------

    def register_query(
        self,
        collection_id: str,
        question: str | None,
        attributes: dict[str, str] | None,
    ) -> QueryState:
        collection = self.collection(collection_id)
        if not (question or "").strip() and not attributes:
            raise UsageError("provide a question or an attributes mapping")
        if collection.index is None:
            raise UsageError(
                f"collection {collection_id!r} has no index yet; ingest bundles first"
            )
        query = QueryState(
            query_id=f"q-{uuid.uuid4().hex[:8]}",
            collection_id=collection_id,
            question=(question or "").strip(),
            attributes=attributes,
        )
        with collection.lock:
            collection.queries[query.query_id] = query
            self.query_owner[query.query_id] = collection_id
        return query

    def query_work(self, query_id: str, k: int) -> dict:
        collection, query = self.query(query_id)
        outcome = run_query(
            self.gateway,
            collection.index,
            question=query.question or None,
            attributes=query.attributes,
            k=k,
        )
        with collection.lock:
            query.outcome = outcome
        return {
            "query_id": query_id,
            "records": len(outcome.table.records),
            "degraded_docs": outcome.degraded_docs,
            "revision": outcome.table.revision,
        }

    # -- serialization -------------------------------------------------------

    @staticmethod
    def record_payload(table: WorkingTable, rid: int) -> dict:
        record = table.records[rid]
        ordinal = table.ordinal_of(record)
        scores = (
            record.quality.to_dict()
            if isinstance(record.quality, QualityScores)
            else None
        )
        return {
            "rid": rid,
            "doc_id": record.doc_id,
            "ordinal": ordinal,
            "cells": {
                name: {"text": cell_text(value), "empty": is_empty(value)}
                for name, value in record.cells.items()
            },
            "flags": sorted(table.visible_flags(record.doc_id, ordinal)),
            "scores": scores,
        }

    def table_payload(self, query: QueryState) -> dict:
        outcome = query.outcome
        table = query.table
        return {
            "query_id": query.query_id,
            "collection_id": query.collection_id,
            "revision": table.revision,
            "question": outcome.question,
            "summary": outcome.summary,
            "degraded_docs": outcome.degraded_docs,
            "schema": {
                "columns": [
                    {
                        "name": c.name,
                        "description": c.value_description,
                        "kind": c.declared_kind,
                    }
                    for c in table.schema.columns
                ]
            },
            "quality": table.quality.to_dict() if table.quality else None,
            "records": [
                self.record_payload(table, rid) for rid in range(len(table.records))
            ],
        }

    def contexts_payload(self, query: QueryState, rid: int) -> dict:
        collection, _ = self.query(query.query_id)
        table = query.table
        if not 0 <= rid < len(table.records):
            raise NotFoundError(f"query {query.query_id} has no record #{rid}")
        record = table.records[rid]
        chunk_map: dict[str, ContentChunk] = (
            collection.index.chunks_by_id if collection.index else {}
        )
        contexts = []
        for chunk_id in record.context_ids:
            chunk = chunk_map.get(chunk_id)
            if chunk is None:
                continue
            contexts.append(
                {
                    "chunk_id": chunk.chunk_id,
                    "kind": chunk.kind,
                    "raw_content": chunk.raw_content,
                    "summary": chunk.summary,
                }
            )
        return {
            "rid": rid,
            "doc_id": record.doc_id,
            "contexts": contexts,
            "spans": {
                column: [span.to_dict() for span in spans]
                for column, spans in record.provenance.items()
            },
            "flags": sorted(record.flags),
        }

    # -- mutations ------------------------------------------------------------

    @staticmethod
    def _check_revision(table: WorkingTable, revision: int) -> None:
        if revision != table.revision:
            raise ConflictError(
                f"stale revision {revision} (current {table.revision}); re-fetch"
            )

    def edit_cell(
        self,
        query_id: str,
        revision: int,
        doc_id: str,
        ordinal: int,
        column: str,
        value,
    ) -> dict:
        collection, query = self.query(query_id)
        with collection.lock:
            table = query.table
            self._check_revision(table, revision)
            edit_cell(table, doc_id, ordinal, column, value)
            return {"revision": table.revision}

    def clear_flags(
        self,
        query_id: str,
        revision: int,
        doc_id: str,
        ordinal: int,
        flags: list[str] | None,
    ) -> dict:
        collection, query = self.query(query_id)
        with collection.lock:
            table = query.table
            self._check_revision(table, revision)
            clear_flags(table, doc_id, ordinal, flags)
            return {
                "revision": table.revision,
                "visible_flags": sorted(table.visible_flags(doc_id, ordinal)),
            }

    # -- grouping -------------------------------------------------------------

    def grouping(self, query_id: str, columns: list[str], seed: int | None) -> dict:
        collection, query = self.query(query_id)
        if not columns:
            raise UsageError("select at least one column")
        with collection.lock:
            table = query.table
            if len(columns) == 1:
                plan, grouping = propose_groups(
                    self.gateway, table.records, columns[0], seed=seed or KMEANS_SEED
                )
                return {
                    "revision": table.revision,
                    "plan": plan.to_dict(),
                    "grouping": grouping.to_dict(),
                }
            grouping = self._encoded_grouping(table, columns, seed or KMEANS_SEED)
            return {
                "revision": table.revision,
                "plan": None,
                "grouping": grouping.to_dict(),
            }

    def _encoded_grouping(
        self, table: WorkingTable, columns: list[str], seed: int
    ) -> GroupingResult:
        """Multi-column scatter: one point per distinct encoded row."""
        rows = encode_rows(table.records, columns, table.schema)
        label = " + ".join(columns)
        if not rows:
            return GroupingResult(column=label, points=[], clusters=[], k=0)
        vectors = np.vstack(self.gateway.embed([r.text for r in rows]))
        result = cluster(vectors, k=None, seed=seed)
        coords = project_2d(vectors)
        members: dict[int, dict[str, int]] = {}
        for idx, row in enumerate(rows):
            cid = int(result.labels[idx])
            members.setdefault(cid, {})[row.text] = row.frequency
        clusters = [
            ClusterInfo(
                cluster_id=cid,
                label=label_cluster(self.gateway, members[cid]),
                members=members[cid],
            )
            for cid in sorted(members)
        ]
        points = [
            GroupPoint(
                x=float(coords[idx, 0]),
                y=float(coords[idx, 1]),
                cluster_id=int(result.labels[idx]),
                frequency=row.frequency,
                variant=row.text,
                record_indices=row.record_indices,
            )
            for idx, row in enumerate(rows)
        ]
        return GroupingResult(
            column=label, points=points, clusters=clusters, k=result.k
        )

    def apply_plan(self, query_id: str, revision: int, plan_data: dict) -> dict:
        collection, query = self.query(query_id)
        plan = StandardizationPlan.from_dict(plan_data)
        with collection.lock:
            table = query.table
            self._check_revision(table, revision)
            report: ChangeReport = apply_plan(table.records, plan)
            for change in report.changes:
                table.change_log.append(
                    _log_entry(
                        "standardizer",
                        change.doc_id,
                        change.column,
                        change.old,
                        change.new,
                    )
                )
            table.refresh_metrics()
            table.revision += 1
            return {"revision": table.revision, "report": report.to_dict()}

    # -- database -------------------------------------------------------------

    def merge(self, collection_id: str, query_id: str, policy: str) -> dict:
        collection = self.collection(collection_id)
        if query_id not in collection.queries:
            raise NotFoundError(
                f"query {query_id!r} does not belong to collection {collection_id!r}"
            )
        query = collection.queries[query_id]
        with collection.lock:
            merge_into_db(collection.db, query.table, policy=policy)
            return {
                "revision": collection.db.revision,
                "rows": len(collection.db.rows),
                "columns": list(collection.db.columns),
            }
