"""HTTP service, background jobs, batch runner, and the table scorer."""
from .app import create_app
from .batch import (
    BatchResult,
    batch_extract,
    build_gateway,
    load_attributes,
    load_scorable,
    score_files,
)
from .jobs import Job, JobManager
from .scoring import EvalReport, ScoredCell, pair_score, score_tables
from .state import CollectionState, Engine, QueryState

__all__ = [
    "BatchResult",
    "CollectionState",
    "Engine",
    "EvalReport",
    "Job",
    "JobManager",
    "QueryState",
    "ScoredCell",
    "batch_extract",
    "build_gateway",
    "create_app",
    "load_attributes",
    "load_scorable",
    "pair_score",
    "score_files",
    "score_tables",
]
