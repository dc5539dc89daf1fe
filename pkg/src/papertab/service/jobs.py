"""Background jobs: one FIFO worker per collection, polled by id."""
from __future__ import annotations

import logging
import queue
import threading
import time
import uuid
from dataclasses import dataclass, field
from typing import Any, Callable

LOGGER = logging.getLogger(__name__)

JOB_STATES = ("queued", "running", "done", "error")


@dataclass
class Job:
    job_id: str
    kind: str
    collection_id: str
    status: str = "queued"
    error: str = ""
    result: dict = field(default_factory=dict)
    created_at: float = field(default_factory=time.time)
    started_at: float | None = None
    finished_at: float | None = None

    def to_dict(self) -> dict:
        return {
            "job_id": self.job_id,
            "kind": self.kind,
            "collection_id": self.collection_id,
            "status": self.status,
            "error": self.error,
            "result": self.result,
        }


class JobManager:
    """Serializes jobs per collection on dedicated worker threads."""

    def __init__(self):
        self._jobs: dict[str, Job] = {}
        self._queues: dict[str, "queue.Queue[tuple[Job, Callable[[], dict]]]"] = {}
        self._lock = threading.Lock()

    def _worker(self, q: "queue.Queue[tuple[Job, Callable[[], dict]]]") -> None:
        while True:
            job, work = q.get()
            job.status = "running"
            job.started_at = time.time()
            try:
                job.result = work() or {}
                job.status = "done"
            except Exception as exc:
                job.status = "error"
                job.error = str(exc)
                LOGGER.warning("job %s (%s) failed: %s", job.job_id, job.kind, exc)
            finally:
                job.finished_at = time.time()
                q.task_done()

    def submit(
        self, collection_id: str, kind: str, work: Callable[[], dict]
    ) -> Job:
        job = Job(job_id=uuid.uuid4().hex, kind=kind, collection_id=collection_id)
        with self._lock:
            self._jobs[job.job_id] = job
            q = self._queues.get(collection_id)
            if q is None:
                q = queue.Queue()
                self._queues[collection_id] = q
                thread = threading.Thread(
                    target=self._worker, args=(q,), daemon=True
                )
                thread.start()
        q.put((job, work))
        return job

    def get(self, job_id: str) -> Job | None:
        return self._jobs.get(job_id)

    def wait(self, job_id: str, timeout: float = 30.0, poll: float = 0.005) -> Job:
        """Block until the job leaves the queue (test convenience)."""
        deadline = time.monotonic() + timeout
        while time.monotonic() < deadline:
            job = self._jobs.get(job_id)
            if job is not None and job.status in ("done", "error"):
                return job
            time.sleep(poll)
        raise TimeoutError(f"job {job_id} did not finish in {timeout}s")
