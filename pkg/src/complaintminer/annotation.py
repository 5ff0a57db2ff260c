"""Human annotation bookkeeping.

Covers the loop around the automatic pipeline: sampling posts into tasks,
recording each annotator's decisions (idempotently, with an append-only
journal), adjudicating finished tasks, and measuring inter-annotator
agreement with Cohen's kappa.
"""

import json
import random
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .corpus import Corpus
from .errors import ConfigError, InputFormatError


class TaskKind(str, Enum):
    INFORMATIVENESS = "informativeness"
    COMPLAINT = "complaint"
    PHRASE_REVIEW = "phrase_review"


LEGAL_LABELS: dict[TaskKind, tuple[str, ...]] = {
    TaskKind.INFORMATIVENESS: ("informative", "non_informative"),
    TaskKind.COMPLAINT: ("complaint", "non_complaint"),
    TaskKind.PHRASE_REVIEW: ("keep", "drop"),
}


@dataclass(frozen=True)
class Task:
    task_id: str
    kind: TaskKind
    subject: str
    required_annotators: int = 2

    def __post_init__(self):
        if not self.task_id:
            raise ValueError("task_id must be non-empty")
        if not self.subject:
            raise ValueError("subject must be non-empty")
        if self.required_annotators < 1:
            raise ValueError(f"required_annotators must be at least 1, got {self.required_annotators}")


@dataclass(frozen=True)
class Decision:
    task_id: str
    annotator_id: str
    label: str
    decided_at: datetime

    def __post_init__(self):
        if not self.task_id or not self.annotator_id or not self.label:
            raise ValueError("task_id, annotator_id and label must be non-empty")
        if self.decided_at.tzinfo is None:
            raise ValueError("decided_at must be timezone-aware (UTC)")

    def to_dict(self) -> dict:
        return {
            "task_id": self.task_id,
            "annotator_id": self.annotator_id,
            "label": self.label,
            "decided_at": self.decided_at.astimezone(timezone.utc).isoformat(),
        }

    @staticmethod
    def from_dict(data: dict) -> "Decision":
        return Decision(
            task_id=str(data["task_id"]),
            annotator_id=str(data["annotator_id"]),
            label=str(data["label"]),
            decided_at=datetime.fromisoformat(data["decided_at"]),
        )


def sample_tasks(corpus: Corpus, kind: TaskKind, n: int, seed: int) -> list[Task]:
    """Seeded uniform sample of posts as tasks, without replacement.

    Backward Fisher-Yates over the corpus order, then the first n; the
    draw j = randint(0, i) consumes one rng value per step, which keeps
    the permutation reproducible from the seed alone.
    """
    if not 0 <= n <= len(corpus):
        raise ValueError(f"cannot sample {n} tasks from {len(corpus)} posts")
    ids = [post.id for post in corpus]
    rng = random.Random(seed)
    for i in range(len(ids) - 1, 0, -1):
        j = rng.randint(0, i)
        ids[i], ids[j] = ids[j], ids[i]
    return [Task(task_id=f"{kind.value}:{post_id}", kind=kind, subject=post_id) for post_id in ids[:n]]


@dataclass(frozen=True)
class AgreementReport:
    kappa: float
    observed_agreement: float
    expected_agreement: float
    n_items: int

    def to_dict(self) -> dict:
        return {
            "kappa": self.kappa,
            "observed_agreement": self.observed_agreement,
            "expected_agreement": self.expected_agreement,
            "n_items": self.n_items,
        }


def kappa(a: Mapping[str, str], b: Mapping[str, str]) -> AgreementReport:
    """Cohen's kappa over the tasks both annotators decided.

    Computed from integer counts with a single final division, so exact
    fractions like 0.6 come out exactly.
    """
    common = sorted(set(a) & set(b))
    if not common:
        raise ValueError("no jointly decided tasks")
    n = len(common)
    agree = sum(1 for t in common if a[t] == b[t])
    labels = sorted({a[t] for t in common} | {b[t] for t in common})
    marginal_product_sum = 0
    for label in labels:
        count_a = sum(1 for t in common if a[t] == label)
        count_b = sum(1 for t in common if b[t] == label)
        marginal_product_sum += count_a * count_b
    po = agree / n
    pe = marginal_product_sum / (n * n)
    denominator = n * n - marginal_product_sum
    if denominator == 0:
        # pe = 1 forces po = 1: both annotators used one identical label
        value = 1.0
    else:
        value = (n * agree - marginal_product_sum) / denominator
    return AgreementReport(kappa=value, observed_agreement=po, expected_agreement=pe, n_items=n)


def resolve(task: Task, decisions: Sequence[Decision], rule: str = "discard") -> str | None:
    """Final label for a fully annotated task, or None to discard it.

    Default rule discards on any disagreement; "tiebreak" lets a strict
    majority win when extra decisions beyond the required two exist.
    """
    if rule not in ("discard", "tiebreak"):
        raise ConfigError(f"unknown resolution rule {rule!r}")
    relevant = [d for d in decisions if d.task_id == task.task_id]
    if len(relevant) < task.required_annotators:
        raise ValueError(
            f"task {task.task_id!r} has {len(relevant)} decisions, needs {task.required_annotators}"
        )
    if len({d.annotator_id for d in relevant}) != len(relevant):
        raise ValueError(f"task {task.task_id!r} has multiple decisions from one annotator")
    labels = [d.label for d in relevant]
    if len(set(labels)) == 1:
        return labels[0]
    if rule == "tiebreak":
        counts = sorted(((labels.count(l), l) for l in set(labels)), reverse=True)
        if len(counts) == 1 or counts[0][0] > counts[1][0]:
            return counts[0][1]
    return None


class AnnotationStore:
    """Tasks plus decisions, with an append-only submission journal.

    record() is an idempotent upsert per (task, annotator): re-submitting
    the same label changes nothing, a different label overwrites; either
    way the submission lands in the journal.
    """

    def __init__(self, tasks: Iterable[Task] = ()):
        self._tasks: dict[str, Task] = {}
        self._order: list[str] = []
        self._decisions: dict[tuple[str, str], Decision] = {}
        self._journal: list[dict] = []
        for task in tasks:
            self.add_task(task)

    def add_task(self, task: Task) -> None:
        if task.task_id in self._tasks:
            raise ValueError(f"duplicate task id {task.task_id!r}")
        self._tasks[task.task_id] = task
        self._order.append(task.task_id)

    def task(self, task_id: str) -> Task:
        if task_id not in self._tasks:
            raise KeyError(f"unknown task {task_id!r}")
        return self._tasks[task_id]

    @property
    def tasks(self) -> list[Task]:
        return [self._tasks[tid] for tid in self._order]

    def record(self, decision: Decision) -> Decision:
        task = self._tasks.get(decision.task_id)
        if task is None:
            raise ValueError(f"unknown task {decision.task_id!r}")
        if decision.label not in LEGAL_LABELS[task.kind]:
            raise ValueError(
                f"label {decision.label!r} not legal for {task.kind.value} tasks; "
                f"expected one of {LEGAL_LABELS[task.kind]}"
            )
        key = (decision.task_id, decision.annotator_id)
        previous = self._decisions.get(key)
        self._journal.append(decision.to_dict())
        if previous is not None and previous.label == decision.label:
            return previous  # idempotent re-submission
        self._decisions[key] = decision
        return decision

    def decisions_for_task(self, task_id: str) -> list[Decision]:
        self.task(task_id)
        return [d for (tid, _), d in sorted(self._decisions.items()) if tid == task_id]

    def decisions_of(self, annotator_id: str) -> dict[str, str]:
        return {tid: d.label for (tid, aid), d in self._decisions.items() if aid == annotator_id}

    def progress(self, task_id: str) -> tuple[int, int]:
        task = self.task(task_id)
        done = sum(1 for (tid, _) in self._decisions if tid == task_id)
        return done, task.required_annotators

    def is_complete(self, task_id: str) -> bool:
        done, required = self.progress(task_id)
        return done >= required

    def next_task(self, annotator_id: str, kind: TaskKind | None = None) -> Task | None:
        """First task in insertion order this annotator has not decided."""
        if not annotator_id:
            raise ValueError("annotator_id must be non-empty")
        for tid in self._order:
            task = self._tasks[tid]
            if kind is not None and task.kind is not kind:
                continue
            if (tid, annotator_id) not in self._decisions:
                return task
        return None

    def agreement(self, annotator_a: str, annotator_b: str) -> AgreementReport:
        return kappa(self.decisions_of(annotator_a), self.decisions_of(annotator_b))

    @property
    def journal(self) -> list[dict]:
        return list(self._journal)

    def export_journal(self, path: str | Path) -> None:
        with Path(path).open("w", encoding="utf-8") as fh:
            for entry in self._journal:
                fh.write(json.dumps(entry, sort_keys=True) + "\n")


def save_decisions(decisions: Iterable[Decision], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for decision in decisions:
            fh.write(json.dumps(decision.to_dict(), sort_keys=True) + "\n")


def load_decisions(path: str | Path) -> list[Decision]:
    path = Path(path)
    decisions = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                data = json.loads(line)
                decisions.append(Decision.from_dict(data))
            except (json.JSONDecodeError, KeyError, ValueError) as exc:
                raise InputFormatError(f"{path}:{lineno}: bad decision record: {exc}") from None
    return decisions
