"""Confidence-gated routing of utterances across ASR, MT, and NLU stages with
escalation to language-specific analyst queues, plus an append-only event log
that fully reconstructs queue and disposition state on replay.

All state mutation flows through `_apply(event)`, which is also what replay
uses, so a live router's state and the replay of its log are identical by
construction. route/claim_task/submit_label are serialized by a single lock.
"""

from __future__ import annotations

import json
import threading
import time
from collections import deque
from dataclasses import asdict, dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable, TextIO

from . import bridge
from .calibration import ThresholdSet
from .data import JointLabel, LabelCatalog
from .nlu import ClassifierModel


class Outcome(str, Enum):
    AUTOMATED = "AUTOMATED"
    SOURCE_ANALYST = "SOURCE_ANALYST"
    TARGET_ANALYST = "TARGET_ANALYST"


class Pool(str, Enum):
    SOURCE = "source-language"
    TARGET = "target-language"


class Stage(str, Enum):
    ASR = "ASR"
    MT = "MT"
    NLU = "NLU"


class TaskState(str, Enum):
    QUEUED = "QUEUED"
    CLAIMED = "CLAIMED"
    LABELED = "LABELED"


class PipelineMode(str, Enum):
    ONLINE_BRIDGE = "ONLINE_BRIDGE"  # ASR -> MT -> NLU
    NATIVE = "NATIVE"  # ASR -> NLU
    OFFLINE_BOOTSTRAPPED = "OFFLINE_BOOTSTRAPPED"  # ASR -> NLU, bootstrapped model


@dataclass
class StageRecord:
    stage: str
    confidence: float
    threshold: float
    passed: bool


@dataclass
class Disposition:
    utterance_id: str
    outcome: str
    trace: list[StageRecord]
    label: tuple[str, str, str] | None = None
    pending: bool = False
    task_id: str | None = None

    def joint_label(self) -> JointLabel | None:
        return JointLabel.from_tuple(self.label) if self.label else None


@dataclass
class AnalystTask:
    task_id: str
    utterance_id: str
    pool: str
    payload: str
    trace: list[StageRecord]
    state: str = TaskState.QUEUED.value
    owner: str | None = None
    submitted_label: tuple[str, str, str] | None = None
    client_token: str | None = None
    queued_at: float = 0.0
    claimed_at: float | None = None
    labeled_at: float | None = None


class RouterError(Exception):
    pass


class WrongOwnerError(RouterError):
    pass


class UnknownLabelError(RouterError):
    pass


def _trace_dicts(trace: list[StageRecord]) -> list[dict]:
    return [asdict(rec) for rec in trace]


def _trace_from_dicts(items: list[dict]) -> list[StageRecord]:
    return [StageRecord(**d) for d in items]


class RouterState:
    """Dispositions, tasks, and per-pool FIFO queues. Mutated only through
    event application."""

    def __init__(self) -> None:
        self.dispositions: dict[str, Disposition] = {}
        self.tasks: dict[str, AnalystTask] = {}
        self.queues: dict[str, deque[str]] = {
            Pool.SOURCE.value: deque(),
            Pool.TARGET.value: deque(),
        }

    def snapshot(self) -> dict:
        """Deterministic, comparable view of the full state."""
        return {
            "dispositions": {
                uid: {**asdict(d), "trace": _trace_dicts(d.trace)}
                for uid, d in sorted(self.dispositions.items())
            },
            "tasks": {
                tid: {**asdict(t), "trace": _trace_dicts(t.trace)}
                for tid, t in sorted(self.tasks.items())
            },
            "queues": {pool: list(q) for pool, q in self.queues.items()},
        }

    def apply(self, event: dict) -> None:
        etype = event["type"]
        if etype == "disposition":
            disp = Disposition(
                utterance_id=event["utterance_id"],
                outcome=event["outcome"],
                trace=_trace_from_dicts(event["trace"]),
                label=tuple(event["label"]) if event.get("label") else None,
                pending=event["pending"],
                task_id=event.get("task_id"),
            )
            self.dispositions[disp.utterance_id] = disp
            task_rec = event.get("task")
            if task_rec is not None:
                task = AnalystTask(
                    task_id=task_rec["task_id"],
                    utterance_id=task_rec["utterance_id"],
                    pool=task_rec["pool"],
                    payload=task_rec["payload"],
                    trace=disp.trace,
                    queued_at=task_rec["queued_at"],
                )
                self.tasks[task.task_id] = task
                self.queues[task.pool].append(task.task_id)
        elif etype == "claim":
            task = self.tasks[event["task_id"]]
            self.queues[task.pool].remove(task.task_id)
            task.state = TaskState.CLAIMED.value
            task.owner = event["analyst_id"]
            task.claimed_at = event["ts"]
        elif etype == "expire":
            task = self.tasks[event["task_id"]]
            task.state = TaskState.QUEUED.value
            task.owner = None
            task.claimed_at = None
            self.queues[task.pool].append(task.task_id)
        elif etype == "submit":
            task = self.tasks[event["task_id"]]
            label = tuple(event["label"])
            task.state = TaskState.LABELED.value
            task.submitted_label = label
            task.labeled_at = event["ts"]
            task.client_token = event.get("client_token")
            disp = self.dispositions[task.utterance_id]
            disp.label = label
            disp.pending = False
        else:
            raise ValueError(f"unknown event type {etype!r}")


def replay_log(records: list[dict] | str | Path) -> RouterState:
    """Rebuild router state from an event log (a list of event dicts or a
    path to a newline-delimited log file)."""
    if isinstance(records, (str, Path)):
        events = []
        with open(records, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line:
                    continue
                try:
                    events.append(json.loads(line))
                except json.JSONDecodeError as exc:
                    raise ValueError(f"corrupt event log record at line {lineno}") from exc
        records = events
    state = RouterState()
    for i, event in enumerate(records):
        try:
            state.apply(event)
        except (KeyError, ValueError, TypeError) as exc:
            raise ValueError(f"corrupt event log record at index {i}: {exc}") from exc
    return state


class Router:
    """Linearizable routing core shared by the service and the CLI."""

    def __init__(
        self,
        mode: PipelineMode,
        model: ClassifierModel,
        thresholds: ThresholdSet,
        catalog: LabelCatalog,
        asr: bridge.AsrAdapter,
        mt: bridge.MtAdapter | None = None,
        src_lang: str = "es",
        tgt_lang: str = "en",
        claim_timeout: float = 300.0,
        clock: Callable[[], float] = time.time,
        log_file: TextIO | None = None,
    ):
        if mode == PipelineMode.ONLINE_BRIDGE and mt is None:
            raise ValueError("ONLINE_BRIDGE mode requires an MT adapter")
        self.mode = mode
        self.model = model
        self.thresholds = thresholds
        self.catalog = catalog
        self.asr = asr
        self.mt = mt
        self.src_lang = src_lang
        self.tgt_lang = tgt_lang
        self.claim_timeout = claim_timeout
        self.clock = clock
        self.state = RouterState()
        self.events: list[dict] = []
        self._log_file = log_file
        self._lock = threading.Lock()
        self._seq = 0

    # -- event plumbing ------------------------------------------------

    def _emit(self, event: dict) -> None:
        event["seq"] = self._seq
        self._seq += 1
        self.state.apply(event)
        self.events.append(event)
        if self._log_file is not None:
            self._log_file.write(json.dumps(event, ensure_ascii=False) + "\n")
            self._log_file.flush()

    def flush(self) -> None:
        with self._lock:
            if self._log_file is not None:
                self._log_file.flush()

    # -- routing -------------------------------------------------------

    def route(self, utterance_id: str, audio_or_text: str) -> Disposition:
        """Run one utterance through the mode's gate sequence. The first
        failed gate enqueues an analyst task and returns a pending
        disposition; if every gate passes the NLU prediction resolves it."""
        with self._lock:
            return self._route_locked(utterance_id, audio_or_text)

    def _route_locked(self, utterance_id: str, audio_or_text: str) -> Disposition:
        trace: list[StageRecord] = []
        now = self.clock()

        try:
            asr_result = self.asr.recognize(audio_or_text)
        except Exception:
            asr_result = bridge.AsrResult(n_best=[], asr_confidence=0.0, no_hypothesis=True)
        asr_conf = 0.0 if asr_result.no_hypothesis else asr_result.asr_confidence
        asr_pass = asr_conf >= self.thresholds.tau_asr and not asr_result.no_hypothesis
        trace.append(StageRecord(Stage.ASR.value, asr_conf, self.thresholds.tau_asr, asr_pass))
        transcript = asr_result.best_text
        if not asr_pass:
            return self._escalate(utterance_id, Pool.SOURCE, Outcome.SOURCE_ANALYST,
                                  transcript or audio_or_text, trace, now)

        nlu_input = transcript
        if self.mode == PipelineMode.ONLINE_BRIDGE:
            assert self.mt is not None
            try:
                mt_result = bridge.translate(
                    self.mt, bridge.normalize_for_mt(transcript), self.src_lang, self.tgt_lang
                )
                mt_conf = mt_result.mt_confidence
            except Exception:
                mt_result = None
                mt_conf = 0.0
            mt_pass = mt_result is not None and mt_conf >= self.thresholds.tau_mt
            trace.append(StageRecord(Stage.MT.value, mt_conf, self.thresholds.tau_mt, mt_pass))
            if not mt_pass:
                return self._escalate(utterance_id, Pool.SOURCE, Outcome.SOURCE_ANALYST,
                                      transcript, trace, now)
            nlu_input = bridge.denormalize_from_mt(mt_result.translation)

        prediction = self.model.predict_text(nlu_input)
        nlu_pass = prediction.confidence >= self.thresholds.tau_nlu
        trace.append(
            StageRecord(Stage.NLU.value, prediction.confidence, self.thresholds.tau_nlu, nlu_pass)
        )
        if not nlu_pass:
            # In single-language modes only the source pool understands the
            # text; the bridged mode hands translated text to the target pool.
            if self.mode == PipelineMode.ONLINE_BRIDGE:
                return self._escalate(utterance_id, Pool.TARGET, Outcome.TARGET_ANALYST,
                                      nlu_input, trace, now)
            return self._escalate(utterance_id, Pool.SOURCE, Outcome.SOURCE_ANALYST,
                                  nlu_input, trace, now)

        event = {
            "type": "disposition",
            "ts": now,
            "utterance_id": utterance_id,
            "outcome": Outcome.AUTOMATED.value,
            "trace": _trace_dicts(trace),
            "label": list(prediction.best.as_tuple()),
            "pending": False,
            "task_id": None,
            "task": None,
        }
        self._emit(event)
        return self.state.dispositions[utterance_id]

    def _escalate(
        self,
        utterance_id: str,
        pool: Pool,
        outcome: Outcome,
        payload: str,
        trace: list[StageRecord],
        now: float,
    ) -> Disposition:
        # Derived from the event sequence so reruns with the same call
        # sequence produce identical ids.
        task_id = f"task-{self._seq:06d}"
        event = {
            "type": "disposition",
            "ts": now,
            "utterance_id": utterance_id,
            "outcome": outcome.value,
            "trace": _trace_dicts(trace),
            "label": None,
            "pending": True,
            "task_id": task_id,
            "task": {
                "task_id": task_id,
                "utterance_id": utterance_id,
                "pool": pool.value,
                "payload": payload,
                "queued_at": now,
            },
        }
        self._emit(event)
        return self.state.dispositions[utterance_id]

    # -- analyst queue -------------------------------------------------

    def _expire_stale_locked(self, now: float) -> None:
        for task in list(self.state.tasks.values()):
            if (
                task.state == TaskState.CLAIMED.value
                and task.claimed_at is not None
                and now - task.claimed_at > self.claim_timeout
            ):
                self._emit({"type": "expire", "ts": now, "task_id": task.task_id})

    def claim_task(self, pool: Pool | str, analyst_id: str) -> AnalystTask | None:
        """Atomically hand the oldest queued task in the pool to the analyst;
        returns None when the queue is empty. Expired claims are re-queued
        first."""
        pool_key = pool.value if isinstance(pool, Pool) else pool
        if pool_key not in self.state.queues:
            raise RouterError(f"unknown analyst pool {pool_key!r}")
        with self._lock:
            now = self.clock()
            self._expire_stale_locked(now)
            queue = self.state.queues[pool_key]
            if not queue:
                return None
            task_id = queue[0]
            self._emit({"type": "claim", "ts": now, "task_id": task_id,
                        "analyst_id": analyst_id})
            return self.state.tasks[task_id]

    def submit_label(
        self,
        task_id: str,
        analyst_id: str,
        label: JointLabel,
        client_token: str | None = None,
    ) -> Disposition:
        """Record the analyst's label, resolve the utterance's disposition,
        and append the event. Re-submitting with the same client token is
        idempotent."""
        with self._lock:
            now = self.clock()
            self._expire_stale_locked(now)
            task = self.state.tasks.get(task_id)
            if task is None:
                raise RouterError(f"unknown task {task_id!r}")
            if task.state == TaskState.LABELED.value:
                if client_token is not None and task.client_token == client_token:
                    return self.state.dispositions[task.utterance_id]
                raise RouterError(f"task {task_id!r} is already labeled")
            if task.state != TaskState.CLAIMED.value or task.owner != analyst_id:
                raise WrongOwnerError(f"task {task_id!r} is not claimed by {analyst_id!r}")
            if label not in self.catalog:
                raise UnknownLabelError(
                    f"label {label} is not in the shared label catalog "
                    f"({len(self.catalog.joint_set)} known joint labels)"
                )
            self._emit({
                "type": "submit",
                "ts": now,
                "task_id": task_id,
                "analyst_id": analyst_id,
                "label": list(label.as_tuple()),
                "client_token": client_token,
            })
            return self.state.dispositions[task.utterance_id]

    # -- inspection ------------------------------------------------------

    def queue_stats(self) -> dict:
        with self._lock:
            now = self.clock()
            stats = {}
            for pool, queue in self.state.queues.items():
                oldest_age = None
                if queue:
                    oldest = self.state.tasks[queue[0]]
                    oldest_age = now - oldest.queued_at
                stats[pool] = {"depth": len(queue), "oldest_age_s": oldest_age}
            return stats

    def list_queued(self, pool: Pool | str) -> list[AnalystTask]:
        pool_key = pool.value if isinstance(pool, Pool) else pool
        if pool_key not in self.state.queues:
            raise RouterError(f"unknown analyst pool {pool_key!r}")
        with self._lock:
            return [self.state.tasks[tid] for tid in self.state.queues[pool_key]]

    def get_disposition(self, utterance_id: str) -> Disposition | None:
        with self._lock:
            return self.state.dispositions.get(utterance_id)
