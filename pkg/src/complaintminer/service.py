"""HTTP/JSON control plane for bootstrap runs and annotation.

The service owns no pipeline logic: every endpoint drives a
BootstrapSession or an AnnotationStore and reports their state.  All
mutations are serialized through one lock and appended to per-entity
JSONL journals (when a journal directory is configured), so restarting
the process replays the journals and resumes exactly where it stopped.

Optimistic concurrency: every run carries a version that increases by 1
on each successful mutation.  Clients may send the version they believe
is current in the ``X-Run-Version`` header on POST /runs/{id}/advance; a
mismatch is rejected with 409 before anything runs.
"""

import json
import math
import threading
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .annotation import LEGAL_LABELS, AnnotationStore, Decision, Task, TaskKind, sample_tasks
from .bootstrap import (
    BackgroundPool,
    BootstrapConfig,
    BootstrapSession,
    IllegalTransition,
    PhraseStatus,
    SeedPhrase,
)
from .corpus import Corpus, ngrams, tokenize_post
from .errors import ConfigError

JOURNAL_FILES = ("runs.jsonl", "reviews.jsonl", "decisions.jsonl")


class ServiceError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


class _RunRecord:
    def __init__(self, run_id: str, session: BootstrapSession, store: AnnotationStore):
        self.run_id = run_id
        self.session = session
        self.store = store
        self.version = 1


class ServiceState:
    """All mutable service state; mutations only under the writer lock."""

    def __init__(self, corpus: Corpus, informative: Corpus, background: BackgroundPool,
                 journal_dir: str | Path | None = None):
        self.corpus = corpus
        self.informative = informative
        self.background = background
        self.journal_dir = Path(journal_dir) if journal_dir is not None else None
        self.runs: dict[str, _RunRecord] = {}
        self.lock = threading.Lock()
        self._seq = 0
        self._run_counter = 0
        if self.journal_dir is not None:
            self.journal_dir.mkdir(parents=True, exist_ok=True)
            self._replay()

    # -- journaling ------------------------------------------------------

    def _append(self, filename: str, record: dict) -> None:
        if self.journal_dir is None:
            return
        record = {"seq": self._seq, **record}
        with (self.journal_dir / filename).open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(record, sort_keys=True) + "\n")

    def _replay(self) -> None:
        records = []
        for filename in JOURNAL_FILES:
            path = self.journal_dir / filename
            if not path.exists():
                continue
            for line in path.read_text(encoding="utf-8").splitlines():
                if line.strip():
                    records.append(json.loads(line))
        records.sort(key=lambda r: r["seq"])
        saved_dir = self.journal_dir
        self.journal_dir = None  # do not re-journal while replaying
        try:
            for record in records:
                self._apply(record)
                self._seq = record["seq"]
        finally:
            self.journal_dir = saved_dir

    def _apply(self, record: dict) -> None:
        event = record["event"]
        if event == "create_run":
            self.create_run(record["config"], record["tasks"], run_id=record["run_id"])
        elif event == "advance":
            try:
                self.advance(record["run_id"], expected_version=None)
            except ServiceError as exc:
                # a journaled advance may have failed the run; the failed
                # state is already restored, so replay continues
                if exc.code != "run_failed":
                    raise
        elif event == "review":
            self.review(record["run_id"], record["phrase"], record["keep"])
        elif event == "decision":
            self.decide_task(
                record["run_id"], record["task_id"], record["annotator_id"],
                record["label"], decided_at=datetime.fromisoformat(record["decided_at"]),
            )
        else:
            raise ConfigError(f"journal contains unknown event {event!r}")

    # -- run resolution --------------------------------------------------

    def resolve_run(self, run_id: Optional[str]) -> _RunRecord:
        if run_id is not None:
            if run_id not in self.runs:
                raise ServiceError(404, "unknown_run", f"no run {run_id!r}")
            return self.runs[run_id]
        if len(self.runs) == 1:
            return next(iter(self.runs.values()))
        raise ServiceError(400, "bad_request",
                           f"run_id required when {len(self.runs)} runs exist")

    # -- mutations (call under self.lock) --------------------------------

    def create_run(self, config: dict, tasks: dict | None, run_id: str | None = None) -> _RunRecord:
        try:
            parsed = BootstrapConfig(**config)
        except TypeError as exc:
            raise ServiceError(400, "bad_request", f"bad bootstrap config: {exc}")
        except ConfigError as exc:
            raise ServiceError(400, "bad_request", str(exc))
        store = AnnotationStore()
        if tasks:
            try:
                kind = TaskKind(tasks["kind"])
                sampled = sample_tasks(self.corpus, kind, int(tasks["n"]), int(tasks.get("seed", 0)))
            except (KeyError, ValueError) as exc:
                raise ServiceError(400, "bad_request", f"bad task spec: {exc}")
            for task in sampled:
                store.add_task(task)
        if run_id is None:
            self._run_counter += 1
            run_id = f"run-{self._run_counter}"
        else:
            # replay path: keep the counter ahead of restored ids
            number = int(run_id.rsplit("-", 1)[1])
            self._run_counter = max(self._run_counter, number)
        session = BootstrapSession(self.corpus, self.informative, self.background, parsed)
        record = _RunRecord(run_id, session, store)
        self.runs[run_id] = record
        self._seq += 1
        self._append("runs.jsonl", {"event": "create_run", "run_id": run_id,
                                    "config": config, "tasks": tasks})
        return record

    def advance(self, run_id: str, expected_version: Optional[int]) -> _RunRecord:
        record = self.resolve_run(run_id)
        if expected_version is not None and expected_version != record.version:
            raise ServiceError(409, "stale_version",
                               f"run is at version {record.version}, not {expected_version}")
        try:
            record.session.advance()
        except IllegalTransition as exc:
            raise ServiceError(409, "illegal_transition", str(exc))
        except Exception as exc:
            # the session flipped to failed: a real state change, journal it
            record.version += 1
            self._seq += 1
            self._append("runs.jsonl", {"event": "advance", "run_id": record.run_id})
            raise ServiceError(409, "run_failed", str(exc))
        record.version += 1
        self._seq += 1
        self._append("runs.jsonl", {"event": "advance", "run_id": record.run_id})
        return record

    def review(self, run_id: str, phrase: str, keep: bool) -> _RunRecord:
        record = self.resolve_run(run_id)
        session = record.session
        if phrase not in session.lexicon:
            raise ServiceError(404, "unknown_phrase", f"no phrase {phrase!r}")
        if phrase not in session.pending:
            status = session.lexicon.get(phrase).status.value
            raise ServiceError(409, "already_decided", f"phrase {phrase!r} is already {status}")
        try:
            session.decide(phrase, keep)
        except IllegalTransition as exc:
            raise ServiceError(409, "illegal_transition", str(exc))
        record.version += 1
        self._seq += 1
        self._append("reviews.jsonl", {"event": "review", "run_id": record.run_id,
                                       "phrase": phrase, "keep": keep})
        return record

    def decide_task(self, run_id: str, task_id: str, annotator_id: str, label: str,
                    decided_at: datetime | None = None) -> tuple[_RunRecord, Task]:
        record = self.resolve_run(run_id)
        try:
            task = record.store.task(task_id)
        except KeyError:
            raise ServiceError(404, "unknown_task", f"run {record.run_id!r} has no task {task_id!r}")
        if label not in LEGAL_LABELS[task.kind]:
            raise ServiceError(400, "bad_request",
                               f"label {label!r} not legal for {task.kind.value} tasks")
        if decided_at is None:
            decided_at = datetime.now(timezone.utc)
        record.store.record(Decision(task_id=task_id, annotator_id=annotator_id,
                                     label=label, decided_at=decided_at))
        record.version += 1
        self._seq += 1
        self._append("decisions.jsonl", {"event": "decision", "run_id": record.run_id,
                                         "task_id": task_id, "annotator_id": annotator_id,
                                         "label": label, "decided_at": decided_at.isoformat()})
        return record, task


def _run_snapshot(record: _RunRecord) -> dict:
    session = record.session
    latest = session.reports[-1].to_dict() if session.reports else None
    stop_reason = None
    for report in reversed(session.reports):
        if report.stop_reason is not None:
            stop_reason = report.stop_reason.value
            break
    return {
        "run_id": record.run_id,
        "status": session.status,
        "current_iteration": session.iteration,
        "version": record.version,
        "pending_candidates": len(session.pending),
        "stop_reason": stop_reason,
        "error": session.error,
        "latest_report": latest,
    }


def _phrase_entry(phrase: SeedPhrase, examples: list[str] | None = None) -> dict:
    entry = {
        "text": phrase.text,
        "status": phrase.status.value,
        "drs": phrase.drs,
        "origin_iteration": phrase.origin_iteration,
    }
    if examples is not None:
        entry["examples"] = examples
    return entry


def _contains_phrase(post, phrase: str) -> bool:
    grams = phrase.split(" ")
    return phrase in ngrams(tokenize_post(post).tokens, len(grams))


def _examples_for(session: BootstrapSession, phrase: str, limit: int = 3) -> list[str]:
    # iteration 0 reviews seeds mined from the informative sample; later
    # candidates come from the current relevant set
    pool = session.relevant if len(session.relevant) else session.informative
    hits = []
    for post in pool:
        if _contains_phrase(post, phrase):
            hits.append(post.text)
            if len(hits) >= limit:
                break
    return hits


class _TasksSpec(BaseModel):
    kind: str
    n: int = Field(ge=0)
    seed: int = 0


class _CreateRunBody(BaseModel):
    config: dict = Field(default_factory=dict)
    tasks: Optional[_TasksSpec] = None


class _DecisionBody(BaseModel):
    run_id: Optional[str] = None
    task_id: str = Field(min_length=1)
    annotator_id: str = Field(min_length=1)
    label: str = Field(min_length=1)


class _ReviewBody(BaseModel):
    run_id: Optional[str] = None
    phrase: str = Field(min_length=1)
    decision: str


def create_app(corpus: Corpus, informative: Corpus, background: BackgroundPool,
               journal_dir: str | Path | None = None) -> FastAPI:
    state = ServiceState(corpus, informative, background, journal_dir)
    app = FastAPI(title="complaintminer", docs_url=None, redoc_url=None)
    app.state.service = state

    @app.exception_handler(ServiceError)
    async def service_error(_request: Request, exc: ServiceError):
        return JSONResponse(status_code=exc.status, content={"error": exc.message, "code": exc.code})

    @app.exception_handler(RequestValidationError)
    async def validation_error(_request: Request, exc: RequestValidationError):
        first = exc.errors()[0]
        where = ".".join(str(part) for part in first["loc"])
        return JSONResponse(status_code=400,
                            content={"error": f"{where}: {first['msg']}", "code": "bad_request"})

    @app.post("/runs", status_code=201)
    def create_run(body: _CreateRunBody):
        with state.lock:
            tasks = body.tasks.model_dump() if body.tasks is not None else None
            record = state.create_run(body.config, tasks)
            return _run_snapshot(record)

    @app.get("/runs/{run_id}")
    def get_run(run_id: str):
        return _run_snapshot(state.resolve_run(run_id))

    @app.post("/runs/{run_id}/advance")
    def advance_run(run_id: str, request: Request):
        header = request.headers.get("X-Run-Version")
        expected = None
        if header is not None:
            try:
                expected = int(header)
            except ValueError:
                raise ServiceError(400, "bad_request", f"X-Run-Version must be an integer, got {header!r}")
        with state.lock:
            record = state.advance(run_id, expected)
            return _run_snapshot(record)

    @app.get("/tasks/next")
    def next_task(annotator: str = "", kind: Optional[str] = None, run_id: Optional[str] = None):
        if not annotator:
            raise ServiceError(400, "bad_request", "annotator query parameter is required")
        task_kind = None
        if kind is not None:
            try:
                task_kind = TaskKind(kind)
            except ValueError:
                raise ServiceError(400, "bad_request", f"unknown task kind {kind!r}")
        record = state.resolve_run(run_id)
        task = record.store.next_task(annotator, kind=task_kind)
        if task is None:
            return Response(status_code=204)
        done, required = record.store.progress(task.task_id)
        body = {
            "run_id": record.run_id,
            "task_id": task.task_id,
            "kind": task.kind.value,
            "subject": task.subject,
            "required_annotators": required,
            "decisions_so_far": done,
            "labels": list(LEGAL_LABELS[task.kind]),
        }
        if task.subject in state.corpus:
            body["text"] = state.corpus.get(task.subject).text
        return body

    @app.post("/decisions", status_code=201)
    def post_decision(body: _DecisionBody):
        with state.lock:
            record, task = state.decide_task(body.run_id, body.task_id, body.annotator_id, body.label)
            done, required = record.store.progress(task.task_id)
            return {
                "run_id": record.run_id,
                "task_id": task.task_id,
                "annotator_id": body.annotator_id,
                "label": body.label,
                "progress": [done, required],
                "complete": done >= required,
                "version": record.version,
            }

    @app.get("/lexicon")
    def get_lexicon(status: Optional[str] = None, run_id: Optional[str] = None):
        record = state.resolve_run(run_id)
        session = record.session
        if status is not None:
            try:
                wanted = PhraseStatus(status)
            except ValueError:
                raise ServiceError(400, "bad_request", f"unknown status {status!r}")
            phrases = session.lexicon.with_status(wanted)
        else:
            phrases = list(session.lexicon)
        # highest-scoring first; seeds (no score yet) lead their iteration
        phrases.sort(key=lambda p: (-(p.drs if p.drs is not None else math.inf), p.text))
        include_examples = status == PhraseStatus.CANDIDATE.value
        entries = [
            _phrase_entry(p, _examples_for(session, p.text) if include_examples else None)
            for p in phrases
        ]
        return {"run_id": record.run_id, "version": record.version,
                "pending_candidates": len(session.pending), "phrases": entries}

    @app.post("/lexicon/review")
    def review_phrase(body: _ReviewBody):
        if body.decision not in ("keep", "drop"):
            raise ServiceError(400, "bad_request", f"decision must be keep or drop, got {body.decision!r}")
        with state.lock:
            record = state.review(body.run_id, body.phrase, body.decision == "keep")
            return {
                "run_id": record.run_id,
                "phrase": body.phrase,
                "status": record.session.lexicon.get(body.phrase).status.value,
                "pending_candidates": len(record.session.pending),
                "version": record.version,
            }

    return app
