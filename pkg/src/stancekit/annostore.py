"""Event-sourced store for two-annotator stance labelling.

Every label and adjudication is appended to a line-delimited JSON event log
with monotonically increasing sequence numbers; the store's state is a fold
over that log, so reopening a log reproduces the exact state and the full
audit trail comes for free. Relabels and re-adjudications are
last-write-wins with history retained.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .metrics import GoldLabel
from .stance import LABELS


class AnnotationError(ValueError):
    """Domain violation: unknown entity, bad label, or bad transition."""


class UnknownTaskError(AnnotationError):
    pass


@dataclass(frozen=True)
class AnnotationRecord:
    tweet_id: str
    annotator_id: str
    label: str
    timestamp: str


@dataclass(frozen=True)
class AdjudicationRecord:
    tweet_id: str
    final_label: str
    resolved_by: tuple[str, ...]
    timestamp: str


@dataclass
class AnnotationTask:
    task_id: str
    tweet_ids: list[str]
    texts: dict[str, str]
    annotators: tuple[str, str]
    # current[tweet_id][annotator_id] -> label
    current: dict[str, dict[str, str]] = field(default_factory=dict)
    history: list[AnnotationRecord] = field(default_factory=list)
    adjudications: dict[str, AdjudicationRecord] = field(default_factory=dict)
    adjudication_history: list[AdjudicationRecord] = field(default_factory=list)


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


class AnnotationStore:
    """Append-only event log plus the folded in-memory state.

    Writes are serialized through a single lock; reads see the state as of
    the last completed write.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._seq = 0
        self.tasks: dict[str, AnnotationTask] = {}
        if self.path.exists():
            self._replay()

    # -- persistence --------------------------------------------------------

    def _replay(self):
        with self.path.open(encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    event = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise AnnotationError(
                        f"{self.path}:{lineno}: corrupt event log: {exc}"
                    ) from exc
                seq = int(event["seq"])
                if seq <= self._seq:
                    raise AnnotationError(
                        f"{self.path}:{lineno}: non-monotonic sequence number {seq}"
                    )
                self._seq = seq
                self._apply(event)

    def _append(self, event: dict):
        self._seq += 1
        event = {"seq": self._seq, **event}
        self._apply(event)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with self.path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(event, ensure_ascii=False, sort_keys=True) + "\n")

    def _apply(self, event: dict):
        kind = event["type"]
        if kind == "task_created":
            items = event["items"]
            task = AnnotationTask(
                task_id=event["task_id"],
                tweet_ids=[item["tweet_id"] for item in items],
                texts={item["tweet_id"]: item.get("text", "") for item in items},
                annotators=tuple(event["annotators"]),
            )
            self.tasks[task.task_id] = task
        elif kind == "label":
            task = self.tasks[event["task_id"]]
            record = AnnotationRecord(
                tweet_id=event["tweet_id"],
                annotator_id=event["annotator_id"],
                label=event["label"],
                timestamp=event["ts"],
            )
            task.history.append(record)
            task.current.setdefault(record.tweet_id, {})[record.annotator_id] = record.label
        elif kind == "adjudication":
            task = self.tasks[event["task_id"]]
            record = AdjudicationRecord(
                tweet_id=event["tweet_id"],
                final_label=event["final_label"],
                resolved_by=tuple(event["resolved_by"]),
                timestamp=event["ts"],
            )
            task.adjudication_history.append(record)
            task.adjudications[record.tweet_id] = record
        else:
            raise AnnotationError(f"unknown event type {kind!r}")

    # -- task management ----------------------------------------------------

    def create_task(
        self,
        task_id: str,
        annotators: list[str],
        items: list[dict],
    ) -> AnnotationTask:
        with self._lock:
            if task_id in self.tasks:
                raise AnnotationError(f"task {task_id!r} already exists")
            if len(annotators) != 2 or len(set(annotators)) != 2:
                raise AnnotationError("a task needs exactly two distinct annotators")
            if not items:
                raise AnnotationError("a task needs at least one tweet")
            ids = [item["tweet_id"] for item in items]
            if len(set(ids)) != len(ids):
                raise AnnotationError("duplicate tweet ids in task")
            self._append(
                {
                    "type": "task_created",
                    "task_id": task_id,
                    "annotators": list(annotators),
                    "items": [
                        {"tweet_id": str(i["tweet_id"]), "text": str(i.get("text", ""))}
                        for i in items
                    ],
                    "ts": _now(),
                }
            )
            return self.tasks[task_id]

    def task(self, task_id: str) -> AnnotationTask:
        try:
            return self.tasks[task_id]
        except KeyError:
            raise UnknownTaskError(f"unknown task {task_id!r}") from None

    # -- labelling ----------------------------------------------------------

    def submit_label(self, task_id: str, annotator_id: str, tweet_id: str, label: str) -> dict:
        with self._lock:
            task = self.task(task_id)
            if annotator_id not in task.annotators:
                raise AnnotationError(
                    f"annotator {annotator_id!r} is not assigned to task {task_id!r}"
                )
            if tweet_id not in task.texts:
                raise AnnotationError(f"tweet {tweet_id!r} is not part of task {task_id!r}")
            if label not in LABELS:
                raise AnnotationError(f"invalid label {label!r}; expected one of {LABELS}")
            self._append(
                {
                    "type": "label",
                    "task_id": task_id,
                    "annotator_id": annotator_id,
                    "tweet_id": tweet_id,
                    "label": label,
                    "ts": _now(),
                }
            )
            return self.tweet_status(task_id, tweet_id)

    def tweet_status(self, task_id: str, tweet_id: str) -> dict:
        task = self.task(task_id)
        labels = task.current.get(tweet_id, {})
        return {
            "tweet_id": tweet_id,
            "labels": dict(labels),
            "complete": len(labels) == 2,
            "adjudicated": tweet_id in task.adjudications,
        }

    def next_for(
        self, task_id: str, annotator_id: str, skip: set[str] | frozenset[str] = frozenset()
    ) -> dict | None:
        """The first task tweet the annotator has not labelled yet.

        ``skip`` holds tweets the annotator deferred for later in this
        session; they are served again once nothing else is left.
        """
        task = self.task(task_id)
        if annotator_id not in task.annotators:
            raise AnnotationError(
                f"annotator {annotator_id!r} is not assigned to task {task_id!r}"
            )
        deferred = None
        for position, tweet_id in enumerate(task.tweet_ids):
            if annotator_id in task.current.get(tweet_id, {}):
                continue
            item = {
                "tweet_id": tweet_id,
                "text": task.texts[tweet_id],
                "position": position,
            }
            if tweet_id in skip:
                deferred = deferred or item
                continue
            return item
        return deferred

    # -- disagreement and gold ----------------------------------------------

    def disagreements(self, task_id: str) -> list[dict]:
        """Tweets where both annotators labelled and the labels differ."""
        task = self.task(task_id)
        out = []
        for tweet_id in task.tweet_ids:
            labels = task.current.get(tweet_id, {})
            if len(labels) == 2 and len(set(labels.values())) == 2:
                entry = {
                    "tweet_id": tweet_id,
                    "text": task.texts[tweet_id],
                    "labels": dict(labels),
                    "resolved": tweet_id in task.adjudications,
                }
                if entry["resolved"]:
                    entry["final_label"] = task.adjudications[tweet_id].final_label
                out.append(entry)
        return out

    def unresolved_disagreements(self, task_id: str) -> list[dict]:
        return [d for d in self.disagreements(task_id) if not d["resolved"]]

    def adjudicate(self, task_id: str, tweet_id: str, final_label: str) -> AdjudicationRecord:
        with self._lock:
            task = self.task(task_id)
            if final_label not in LABELS:
                raise AnnotationError(f"invalid label {final_label!r}")
            disagreeing = {d["tweet_id"] for d in self.disagreements(task_id)}
            if tweet_id not in disagreeing:
                raise AnnotationError(
                    f"tweet {tweet_id!r} has no disagreement to adjudicate"
                )
            self._append(
                {
                    "type": "adjudication",
                    "task_id": task_id,
                    "tweet_id": tweet_id,
                    "final_label": final_label,
                    "resolved_by": list(task.annotators),
                    "ts": _now(),
                }
            )
            return task.adjudications[tweet_id]

    def gold_labels(self, task_id: str) -> tuple[dict[str, GoldLabel], list[str]]:
        """(gold map, pending ids); together they partition the task's tweets.

        Agreement yields gold directly; an adjudication resolves a recorded
        disagreement. A tweet whose labels were edited into agreement after
        an adjudication is ambiguous (stale adjudication) and stays pending.
        """
        task = self.task(task_id)
        gold: dict[str, GoldLabel] = {}
        pending: list[str] = []
        for tweet_id in task.tweet_ids:
            labels = task.current.get(tweet_id, {})
            agreed = len(labels) == 2 and len(set(labels.values())) == 1
            adjudication = task.adjudications.get(tweet_id)
            if agreed and adjudication is None:
                gold[tweet_id] = GoldLabel(
                    tweet_id=tweet_id,
                    label=next(iter(labels.values())),
                    origin="agreed",
                )
            elif adjudication is not None and not agreed:
                gold[tweet_id] = GoldLabel(
                    tweet_id=tweet_id,
                    label=adjudication.final_label,
                    origin="adjudicated",
                )
            else:
                pending.append(tweet_id)
        return gold, pending

    def progress(self, task_id: str, annotator_id: str | None = None) -> dict:
        task = self.task(task_id)
        counts: dict = {
            "total": len(task.tweet_ids),
            "disagreements": len(self.disagreements(task_id)),
            "unresolved_disagreements": len(self.unresolved_disagreements(task_id)),
        }
        gold, pending = self.gold_labels(task_id)
        counts["gold"] = len(gold)
        counts["pending"] = len(pending)
        if annotator_id is not None:
            labelled = sum(
                1
                for tweet_id in task.tweet_ids
                if annotator_id in task.current.get(tweet_id, {})
            )
            counts["labelled"] = labelled
            counts["remaining"] = counts["total"] - labelled
        return counts
