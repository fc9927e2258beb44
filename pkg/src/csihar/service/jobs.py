"""Classification job lifecycle: pending -> loading -> done | failed.

Jobs are executed one at a time by a single worker thread consuming a bounded
queue; the job table only ever moves a job forward through its states and
keeps a timestamp for every state it passed through.
"""

from __future__ import annotations

import queue
import threading
import time
import uuid
from dataclasses import dataclass, field

PENDING = "pending"
LOADING = "loading"
DONE = "done"
FAILED = "failed"

_ORDER = {PENDING: 0, LOADING: 1, DONE: 2, FAILED: 2}


class QueueFull(Exception):
    pass


@dataclass
class Job:
    id: str
    capture_ref: str
    work: object = field(repr=False)  # zero-arg callable -> prediction dict
    state: str = PENDING
    prediction: dict | None = None
    error: str | None = None
    timestamps: dict = field(default_factory=dict)

    def snapshot(self) -> dict:
        return {
            "id": self.id,
            "state": self.state,
            "capture_ref": self.capture_ref,
            "prediction": dict(self.prediction) if self.prediction else None,
            "error": self.error,
            "timestamps": dict(self.timestamps),
        }


class JobRunner:
    def __init__(self, max_pending: int = 64):
        self._jobs: dict[str, Job] = {}
        self._queue: queue.Queue = queue.Queue(maxsize=max_pending)
        self._lock = threading.Lock()
        self._thread: threading.Thread | None = None

    def start(self) -> None:
        self._thread = threading.Thread(target=self._loop, name="job-worker", daemon=True)
        self._thread.start()

    def stop(self) -> None:
        if self._thread is not None:
            self._queue.put(None)
            self._thread.join(timeout=10)
            self._thread = None

    def submit(self, capture_ref: str, work) -> str:
        job = Job(id=uuid.uuid4().hex, capture_ref=capture_ref, work=work)
        with self._lock:
            self._advance(job, PENDING)
            self._jobs[job.id] = job
        try:
            self._queue.put_nowait(job)
        except queue.Full:
            with self._lock:
                self._advance(job, FAILED)
                job.error = "queue overflow"
            raise QueueFull(f"more than {self._queue.maxsize} jobs pending")
        return job.id

    def get(self, job_id: str) -> dict | None:
        with self._lock:
            job = self._jobs.get(job_id)
            return job.snapshot() if job else None

    def _advance(self, job: Job, state: str) -> None:
        # states only move forward
        if job.state in _ORDER and _ORDER[state] < _ORDER[job.state]:
            raise RuntimeError(f"job {job.id}: cannot go {job.state} -> {state}")
        job.state = state
        job.timestamps[state] = time.time()

    def _loop(self) -> None:
        while True:
            job = self._queue.get()
            if job is None:
                return
            with self._lock:
                if job.state == FAILED:  # e.g. overflow race
                    continue
                self._advance(job, LOADING)
            try:
                prediction = job.work()
            except Exception as exc:
                with self._lock:
                    job.error = f"{type(exc).__name__}: {exc}"
                    self._advance(job, FAILED)
            else:
                with self._lock:
                    job.prediction = prediction
                    self._advance(job, DONE)
