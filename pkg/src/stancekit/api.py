"""HTTP API over the annotation store, consumed by the browser UI.

All state lives in the event log; every response is computed from the
folded store state, so concurrent annotator sessions always see the
server's truth. When a static directory is given the UI is served from
the same origin.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, HTTPException, Query
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .annostore import AnnotationError, AnnotationStore, UnknownTaskError


class TaskIn(BaseModel):
    task_id: str
    annotators: list[str]
    items: list[dict]


class LabelIn(BaseModel):
    annotator_id: str
    tweet_id: str
    label: str


class AdjudicationIn(BaseModel):
    tweet_id: str
    final_label: str


def create_app(store: AnnotationStore, static_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="stancekit annotation API")

    def _task_or_404(task_id: str):
        try:
            return store.task(task_id)
        except UnknownTaskError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc

    @app.get("/health")
    def health():
        return {"status": "ok", "tasks": sorted(store.tasks)}

    @app.post("/tasks", status_code=201)
    def create_task(body: TaskIn):
        try:
            task = store.create_task(body.task_id, body.annotators, body.items)
        except AnnotationError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return {
            "task_id": task.task_id,
            "annotators": list(task.annotators),
            "n_tweets": len(task.tweet_ids),
        }

    @app.get("/tasks/{task_id}")
    def task_summary(task_id: str, annotator: str | None = Query(default=None)):
        _task_or_404(task_id)
        try:
            counts = store.progress(task_id, annotator)
        except AnnotationError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        task = store.task(task_id)
        return {
            "task_id": task.task_id,
            "annotators": list(task.annotators),
            "counts": counts,
        }

    @app.get("/tasks/{task_id}/next")
    def next_tweet(
        task_id: str,
        annotator: str = Query(...),
        skip: str = Query(default="", description="comma-separated tweet ids deferred for later"),
    ):
        _task_or_404(task_id)
        skipped = {t for t in skip.split(",") if t}
        try:
            item = store.next_for(task_id, annotator, skipped)
            counts = store.progress(task_id, annotator)
        except AnnotationError as exc:
            raise HTTPException(status_code=403, detail=str(exc)) from exc
        if item is None:
            return {"done": True, "counts": counts}
        return {"done": False, "counts": counts, **item}

    @app.post("/tasks/{task_id}/labels")
    def submit_label(task_id: str, body: LabelIn):
        _task_or_404(task_id)
        try:
            status = store.submit_label(task_id, body.annotator_id, body.tweet_id, body.label)
        except AnnotationError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return {"status": "ok", "tweet": status}

    @app.get("/tasks/{task_id}/disagreements")
    def disagreements(task_id: str, unresolved_only: bool = Query(default=False)):
        _task_or_404(task_id)
        items = (
            store.unresolved_disagreements(task_id)
            if unresolved_only
            else store.disagreements(task_id)
        )
        return {"disagreements": items}

    @app.post("/tasks/{task_id}/adjudications")
    def adjudicate(task_id: str, body: AdjudicationIn):
        _task_or_404(task_id)
        try:
            record = store.adjudicate(task_id, body.tweet_id, body.final_label)
        except AnnotationError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return {
            "tweet_id": record.tweet_id,
            "final_label": record.final_label,
            "resolved_by": list(record.resolved_by),
        }

    @app.get("/tasks/{task_id}/gold")
    def gold(task_id: str):
        _task_or_404(task_id)
        gold_map, pending = store.gold_labels(task_id)
        return {
            "gold": [
                {"tweet_id": g.tweet_id, "label": g.label, "origin": g.origin}
                for g in gold_map.values()
            ],
            "pending": pending,
        }

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
