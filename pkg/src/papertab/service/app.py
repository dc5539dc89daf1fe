"""HTTP API over the engine: collections, async jobs, tables, grouping, export."""
from __future__ import annotations

import logging
from typing import Any

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel, Field

from ..errors import (
    ConfigError,
    ConflictError,
    FormatError,
    GatewayError,
    NotFoundError,
    PapertabError,
    PlanValidationError,
    SchemaError,
    StorageError,
    UsageError,
)
from ..gateway import Gateway, mock_gateway
from ..store import export_csv
from .jobs import JobManager
from .state import Engine

LOGGER = logging.getLogger(__name__)

_STATUS_BY_ERROR: list[tuple[type, int]] = [
    (NotFoundError, 404),
    (ConflictError, 409),
    (PlanValidationError, 400),
    (SchemaError, 400),
    (FormatError, 400),
    (UsageError, 400),
    (GatewayError, 502),
    (StorageError, 500),
    (ConfigError, 500),
]


def _status_for(exc: PapertabError) -> int:
    for kind, status in _STATUS_BY_ERROR:
        if isinstance(exc, kind):
            return status
    return 500


class CreateCollectionBody(BaseModel):
    collection_id: str | None = None


class BundlesBody(BaseModel):
    bundles: list[dict] = Field(default_factory=list)


class QueryBody(BaseModel):
    question: str | None = None
    attributes: dict[str, str] | None = None
    k: int = 8


class EditCellBody(BaseModel):
    revision: int
    doc_id: str
    ordinal: int = 0
    column: str
    value: Any = None


class ClearFlagsBody(BaseModel):
    revision: int
    doc_id: str
    ordinal: int = 0
    flags: list[str] | None = None


class GroupsBody(BaseModel):
    columns: list[str]
    seed: int | None = None


class ApplyPlanBody(BaseModel):
    revision: int
    plan: dict


class MergeBody(BaseModel):
    query_id: str
    policy: str = "incoming_wins"


def create_app(gateway: Gateway | None = None) -> FastAPI:
    """The service app; defaults to the deterministic mock gateway."""
    engine = Engine(gateway or mock_gateway())
    jobs = JobManager()
    app = FastAPI(title="papertab", version="0.1.0")
    app.state.engine = engine
    app.state.jobs = jobs

    @app.exception_handler(PapertabError)
    async def papertab_error_handler(request: Request, exc: PapertabError):
        status = _status_for(exc)
        body = {"detail": str(exc)}
        if isinstance(exc, GatewayError):
            body["degraded"] = True
        return JSONResponse(status_code=status, content=body)

    @app.post("/collections", status_code=201)
    def create_collection(body: CreateCollectionBody):
        state = engine.create_collection(body.collection_id)
        return {"collection_id": state.collection_id}

    @app.get("/collections")
    def list_collections():
        return {
            "collections": [
                {
                    "collection_id": c.collection_id,
                    "documents": len(c.bundles),
                    "queries": list(c.queries),
                    "db_rows": len(c.db.rows),
                }
                for c in engine.collections.values()
            ]
        }

    @app.post("/collections/{collection_id}/bundles", status_code=202)
    def add_bundles(collection_id: str, body: BundlesBody):
        bundles = engine.add_bundles(collection_id, body.bundles)
        job = jobs.submit(
            collection_id, "ingest", lambda: engine.ingest_work(collection_id)
        )
        return {
            "job_id": job.job_id,
            "accepted_documents": [b.doc_id for b in bundles],
        }

    @app.post("/collections/{collection_id}/queries", status_code=202)
    def submit_query(collection_id: str, body: QueryBody):
        query = engine.register_query(collection_id, body.question, body.attributes)
        job = jobs.submit(
            collection_id,
            "query",
            lambda: engine.query_work(query.query_id, body.k),
        )
        return {"job_id": job.job_id, "query_id": query.query_id}

    @app.get("/jobs/{job_id}")
    def job_status(job_id: str):
        job = jobs.get(job_id)
        if job is None:
            raise NotFoundError(f"unknown job {job_id!r}")
        return job.to_dict()

    @app.get("/queries/{query_id}/table")
    def get_table(query_id: str):
        _, query = engine.query(query_id)
        return engine.table_payload(query)

    @app.post("/queries/{query_id}/table/cells")
    def edit_cell(query_id: str, body: EditCellBody):
        return engine.edit_cell(
            query_id, body.revision, body.doc_id, body.ordinal, body.column, body.value
        )

    @app.post("/queries/{query_id}/flags:clear")
    def clear_flags(query_id: str, body: ClearFlagsBody):
        return engine.clear_flags(
            query_id, body.revision, body.doc_id, body.ordinal, body.flags
        )

    @app.get("/queries/{query_id}/records/{rid}/contexts")
    def record_contexts(query_id: str, rid: int):
        _, query = engine.query(query_id)
        return engine.contexts_payload(query, rid)

    @app.post("/queries/{query_id}/groups")
    def groups(query_id: str, body: GroupsBody):
        return engine.grouping(query_id, body.columns, body.seed)

    @app.post("/queries/{query_id}/plan:apply")
    def plan_apply(query_id: str, body: ApplyPlanBody):
        return engine.apply_plan(query_id, body.revision, body.plan)

    @app.post("/collections/{collection_id}/db:merge")
    def db_merge(collection_id: str, body: MergeBody):
        return engine.merge(collection_id, body.query_id, body.policy)

    @app.get("/collections/{collection_id}/db.csv")
    def db_csv(collection_id: str):
        collection = engine.collection(collection_id)
        with collection.lock:
            text = export_csv(collection.db)
        return PlainTextResponse(text, media_type="text/csv; charset=utf-8")

    return app
