"""In-process job queue for classification runs.

A single worker thread executes jobs in submission order, which also
guarantees at most one running job per discussion.  Job records are
in-memory; results land in the store as new discussion versions.
"""

from __future__ import annotations

import queue
import threading
import uuid
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional


class JobKind(Enum):
    CLASSIFY = "classify"
    TRAIN = "train"
    EVALUATE = "evaluate"


class JobState(Enum):
    QUEUED = "queued"
    RUNNING = "running"
    DONE = "done"
    FAILED = "failed"


@dataclass
class JobStatus:
    job_id: str
    kind: JobKind
    state: JobState
    discussion_id: Optional[str] = None
    error: Optional[str] = None
    result_ref: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "job_id": self.job_id,
            "kind": self.kind.value,
            "state": self.state.value,
            "discussion_id": self.discussion_id,
            "error": self.error,
            "result_ref": self.result_ref,
        }


class JobRunner:
    def __init__(self):
        self._jobs: dict[str, JobStatus] = {}
        self._queue: "queue.Queue[Optional[tuple[str, Callable[[], str]]]]" = queue.Queue()
        self._lock = threading.Lock()
        self._thread: Optional[threading.Thread] = None

    def start(self) -> None:
        if self._thread is None:
            self._thread = threading.Thread(target=self._run, daemon=True)
            self._thread.start()

    def stop(self) -> None:
        if self._thread is not None:
            self._queue.put(None)
            self._thread.join(timeout=30)
            self._thread = None

    def submit(self, kind: JobKind, work: Callable[[], str],
               discussion_id: Optional[str] = None) -> JobStatus:
        """Queue a callable; its return value becomes the job's result_ref."""
        status = JobStatus(job_id=uuid.uuid4().hex[:12], kind=kind,
                           state=JobState.QUEUED, discussion_id=discussion_id)
        with self._lock:
            self._jobs[status.job_id] = status
        self._queue.put((status.job_id, work))
        return status

    def get(self, job_id: str) -> Optional[JobStatus]:
        with self._lock:
            return self._jobs.get(job_id)

    def _run(self) -> None:
        while True:
            item = self._queue.get()
            if item is None:
                return
            job_id, work = item
            with self._lock:
                self._jobs[job_id].state = JobState.RUNNING
            try:
                result_ref = work()
            except Exception as exc:  # job errors are reported, not raised
                with self._lock:
                    self._jobs[job_id].state = JobState.FAILED
                    self._jobs[job_id].error = f"{type(exc).__name__}: {exc}"
            else:
                with self._lock:
                    self._jobs[job_id].state = JobState.DONE
                    self._jobs[job_id].result_ref = result_ref
