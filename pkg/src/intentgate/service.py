"""FastAPI service exposing routing, analyst queues, the label catalog, and
error-rejection reporting over JSON."""

from __future__ import annotations

from contextlib import asynccontextmanager

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from . import metrics
from .data import JointLabel
from .router import (
    Pool,
    Router,
    RouterError,
    UnknownLabelError,
    WrongOwnerError,
)

# ---------------------------------------------------------------------------
# Wire models


class UtteranceRequest(BaseModel):
    utterance_id: str
    text: str


class StageRecordOut(BaseModel):
    stage: str
    confidence: float
    threshold: float
    passed: bool


class LabelOut(BaseModel):
    tn: str
    sv: str
    en: str


class DispositionOut(BaseModel):
    utterance_id: str
    outcome: str
    pending: bool
    label: LabelOut | None = None
    task_id: str | None = None
    trace: list[StageRecordOut]


class TaskOut(BaseModel):
    task_id: str
    utterance_id: str
    pool: str
    payload: str
    state: str
    queued_at: float
    trace: list[StageRecordOut]


class ClaimRequest(BaseModel):
    analyst_id: str


class LabelSubmission(BaseModel):
    analyst_id: str
    tn: str
    sv: str
    en: str
    client_token: str | None = None


class PoolStats(BaseModel):
    depth: int
    oldest_age_s: float | None = None


class CatalogOut(BaseModel):
    tn: list[str]
    sv: list[str]
    en: list[str]
    joint: list[LabelOut]


class EvalItem(BaseModel):
    text: str
    tn: str
    sv: str
    en: str


class EvalBatchRequest(BaseModel):
    items: list[EvalItem]
    points: list[float] = Field(default=[0.0, 0.1, 0.2])


class CurvePoint(BaseModel):
    rejection_fraction: float
    error_rate: float


class CurveOut(BaseModel):
    points: list[CurvePoint]
    sample_count: int


def _disposition_out(disp) -> DispositionOut:
    return DispositionOut(
        utterance_id=disp.utterance_id,
        outcome=disp.outcome,
        pending=disp.pending,
        label=LabelOut(tn=disp.label[0], sv=disp.label[1], en=disp.label[2])
        if disp.label
        else None,
        task_id=disp.task_id,
        trace=[StageRecordOut(**vars(rec)) for rec in disp.trace],
    )


def _task_out(task) -> TaskOut:
    return TaskOut(
        task_id=task.task_id,
        utterance_id=task.utterance_id,
        pool=task.pool,
        payload=task.payload,
        state=task.state,
        queued_at=task.queued_at,
        trace=[StageRecordOut(**vars(rec)) for rec in task.trace],
    )


_POOL_ALIASES = {
    "source": Pool.SOURCE.value,
    "target": Pool.TARGET.value,
    Pool.SOURCE.value: Pool.SOURCE.value,
    Pool.TARGET.value: Pool.TARGET.value,
}


def _pool_key(pool: str) -> str:
    key = _POOL_ALIASES.get(pool)
    if key is None:
        raise HTTPException(status_code=404, detail=f"unknown analyst pool {pool!r}")
    return key


def create_app(rt: Router) -> FastAPI:
    @asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        rt.flush()

    app = FastAPI(title="intentgate", lifespan=lifespan)
    app.state.router = rt
    # The analyst console is served from a different origin during development.
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "mode": rt.mode.value}

    @app.post("/utterances", response_model=DispositionOut)
    def submit_utterance(req: UtteranceRequest) -> DispositionOut:
        if not req.text.strip():
            raise HTTPException(status_code=422, detail="empty utterance text")
        try:
            disp = rt.route(req.utterance_id, req.text)
        except Exception as exc:  # adapter failures surface with the stage name
            raise HTTPException(status_code=502, detail=f"pipeline failure: {exc}") from exc
        return _disposition_out(disp)

    @app.get("/dispositions/{utterance_id}", response_model=DispositionOut)
    def get_disposition(utterance_id: str) -> DispositionOut:
        disp = rt.get_disposition(utterance_id)
        if disp is None:
            raise HTTPException(status_code=404, detail=f"unknown utterance {utterance_id!r}")
        return _disposition_out(disp)

    @app.get("/pools/stats")
    def pool_stats() -> dict[str, PoolStats]:
        return {pool: PoolStats(**st) for pool, st in rt.queue_stats().items()}

    @app.get("/pools/{pool}/tasks", response_model=list[TaskOut])
    def list_tasks(pool: str) -> list[TaskOut]:
        return [_task_out(t) for t in rt.list_queued(_pool_key(pool))]

    @app.post("/pools/{pool}/claim", response_model=TaskOut | None)
    def claim(pool: str, req: ClaimRequest) -> TaskOut | None:
        task = rt.claim_task(_pool_key(pool), req.analyst_id)
        return _task_out(task) if task else None

    @app.post("/tasks/{task_id}/label", response_model=DispositionOut)
    def submit_label(task_id: str, req: LabelSubmission) -> DispositionOut:
        try:
            label = JointLabel(req.tn, req.sv, req.en)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        try:
            disp = rt.submit_label(task_id, req.analyst_id, label, req.client_token)
        except (WrongOwnerError, UnknownLabelError) as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc
        except RouterError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        return _disposition_out(disp)

    @app.get("/catalog", response_model=CatalogOut)
    def catalog() -> CatalogOut:
        d = rt.catalog.to_dict()
        return CatalogOut(
            tn=d["tn"],
            sv=d["sv"],
            en=d["en"],
            joint=[LabelOut(tn=t[0], sv=t[1], en=t[2]) for t in d["joint"]],
        )

    @app.post("/reports/error-rejection", response_model=CurveOut)
    def error_rejection(req: EvalBatchRequest) -> CurveOut:
        if not req.items:
            raise HTTPException(status_code=422, detail="empty evaluation batch")
        scored = []
        for item in req.items:
            pred = rt.model.predict_text(item.text)
            gold = JointLabel(item.tn, item.sv, item.en)
            scored.append((pred.confidence, pred.best == gold))
        try:
            curve = metrics.error_rejection_curve(scored, req.points)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return CurveOut(
            points=[CurvePoint(rejection_fraction=r, error_rate=e) for r, e in curve.points],
            sample_count=curve.sample_count,
        )

    return app
