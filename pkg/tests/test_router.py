import io
import threading

import pytest

from intentgate import bridge, nlu, router
from intentgate.calibration import ThresholdSet
from intentgate.data import JointLabel, LabelCatalog

from conftest import make_separable_corpus


class FakeClock:
    def __init__(self, t=1000.0):
        self.t = t

    def __call__(self):
        return self.t

    def advance(self, dt):
        self.t += dt


class StubAsr:
    def __init__(self, confidence=1.0, text=None):
        self.confidence = confidence
        self.text = text

    def recognize(self, audio_or_text):
        text = self.text if self.text is not None else audio_or_text
        return bridge.AsrResult(n_best=[(text, self.confidence)],
                                asr_confidence=self.confidence)


class StubMt:
    def __init__(self, confidence=1.0):
        self.confidence = confidence

    def supports(self, src, tgt):
        return True

    def translate_text(self, text):
        return bridge.MtResult(translation=text, mt_confidence=self.confidence)


def make_router(mode=router.PipelineMode.NATIVE, thresholds=None, asr=None, mt=None,
                clock=None, log_file=None, claim_timeout=300.0, model=None,
                catalog=None):
    corpus = make_separable_corpus(size=100, seed=2)
    model = model or nlu.train(corpus, epochs=20, seed=0)
    catalog = catalog or LabelCatalog.from_labels(ex.label for ex in corpus)
    return router.Router(
        mode=mode,
        model=model,
        thresholds=thresholds or ThresholdSet(),
        catalog=catalog,
        asr=asr or StubAsr(),
        mt=mt or (StubMt() if mode == router.PipelineMode.ONLINE_BRIDGE else None),
        clock=clock or FakeClock(),
        claim_timeout=claim_timeout,
        log_file=log_file,
    )


# -- gate sequencing ----------------------------------------------------------


def test_accept_all_thresholds_automate():
    rt = make_router()
    disp = rt.route("u1", "f0 f1 w3 f2")
    assert disp.outcome == router.Outcome.AUTOMATED.value
    assert disp.label == ("t3", "s3", "e3")
    assert not disp.pending
    assert [rec.stage for rec in disp.trace] == ["ASR", "NLU"]
    assert all(rec.passed for rec in disp.trace)


def test_failed_asr_gate_goes_to_source_pool():
    rt = make_router(thresholds=ThresholdSet(tau_asr=0.5), asr=StubAsr(confidence=0.2))
    disp = rt.route("u1", "f0 w1")
    assert disp.outcome == router.Outcome.SOURCE_ANALYST.value
    assert disp.pending
    assert disp.trace[-1].stage == "ASR"
    assert not disp.trace[-1].passed
    task = rt.state.tasks[disp.task_id]
    assert task.pool == router.Pool.SOURCE.value


def test_failed_nlu_gate_in_bridge_mode_goes_to_target_pool():
    rt = make_router(
        mode=router.PipelineMode.ONLINE_BRIDGE,
        thresholds=ThresholdSet(tau_nlu=1e12),  # above the confidence cap
    )
    disp = rt.route("u1", "f0 w1 f2")
    assert disp.outcome == router.Outcome.TARGET_ANALYST.value
    assert [rec.stage for rec in disp.trace] == ["ASR", "MT", "NLU"]
    task = rt.state.tasks[disp.task_id]
    assert task.pool == router.Pool.TARGET.value
    # Payload is the denormalized translated text the classifier saw.
    assert task.payload == "f0 w1 f2"


def test_failed_mt_gate_goes_to_source_pool():
    rt = make_router(
        mode=router.PipelineMode.ONLINE_BRIDGE,
        thresholds=ThresholdSet(tau_mt=0.9),
        mt=StubMt(confidence=0.3),
    )
    disp = rt.route("u1", "f0 w1")
    assert disp.outcome == router.Outcome.SOURCE_ANALYST.value
    assert disp.trace[-1].stage == "MT"


def test_failed_nlu_gate_in_native_mode_goes_to_source_pool():
    rt = make_router(thresholds=ThresholdSet(tau_nlu=1e12))
    disp = rt.route("u1", "f0 w1")
    assert rt.state.tasks[disp.task_id].pool == router.Pool.SOURCE.value


def test_no_nlu_gate_after_failed_asr():
    rt = make_router(thresholds=ThresholdSet(tau_asr=0.5), asr=StubAsr(confidence=0.1))
    disp = rt.route("u1", "f0 w1")
    assert all(rec.stage != "NLU" for rec in disp.trace)


def test_adapter_failure_counts_as_failed_gate():
    class BrokenAsr:
        def recognize(self, audio_or_text):
            raise RuntimeError("adapter down")

    rt = make_router(asr=BrokenAsr())
    disp = rt.route("u1", "f0 w1")
    assert disp.outcome == router.Outcome.SOURCE_ANALYST.value
    assert disp.trace[0].confidence == 0.0


def test_batch_partition_and_threshold_extremes():
    corpus = make_separable_corpus(size=60, seed=8)
    rt = make_router()
    outcomes = [rt.route(ex.id, ex.text).outcome for ex in corpus]
    assert all(o == router.Outcome.AUTOMATED.value for o in outcomes)

    rt_inf = make_router(thresholds=ThresholdSet(tau_nlu=1e12))
    outcomes = [rt_inf.route(ex.id, ex.text).outcome for ex in corpus]
    assert not any(o == router.Outcome.AUTOMATED.value for o in outcomes)


# -- claim / submit lifecycle ---------------------------------------------------


def escalated_router(n=1, clock=None):
    rt = make_router(thresholds=ThresholdSet(tau_nlu=1e12), clock=clock)
    for i in range(n):
        rt.route(f"u{i}", f"f0 w{i % 10} f1")
    return rt


def test_claim_empty_pool_returns_none():
    rt = make_router()
    assert rt.claim_task(router.Pool.SOURCE, "ana") is None


def test_claim_and_submit_resolves_disposition():
    rt = escalated_router()
    task = rt.claim_task(router.Pool.SOURCE, "ana")
    assert task.state == router.TaskState.CLAIMED.value
    assert task.owner == "ana"
    label = JointLabel("t1", "s1", "e1")
    disp = rt.submit_label(task.task_id, "ana", label)
    assert not disp.pending
    assert disp.label == label.as_tuple()
    assert rt.state.tasks[task.task_id].state == router.TaskState.LABELED.value


def test_submit_by_non_owner_rejected():
    rt = escalated_router()
    task = rt.claim_task(router.Pool.SOURCE, "ana")
    with pytest.raises(router.WrongOwnerError):
        rt.submit_label(task.task_id, "impostor", JointLabel("t1", "s1", "e1"))
    assert rt.state.tasks[task.task_id].state == router.TaskState.CLAIMED.value


def test_submit_unknown_label_rejected():
    rt = escalated_router()
    task = rt.claim_task(router.Pool.SOURCE, "ana")
    with pytest.raises(router.UnknownLabelError, match="catalog"):
        rt.submit_label(task.task_id, "ana", JointLabel("zz", "zz", "zz"))
    assert rt.state.tasks[task.task_id].state == router.TaskState.CLAIMED.value


def test_claim_expiry_requeues():
    clock = FakeClock()
    rt = escalated_router(clock=clock)
    task = rt.claim_task(router.Pool.SOURCE, "ana")
    clock.advance(301.0)
    reclaimed = rt.claim_task(router.Pool.SOURCE, "bob")
    assert reclaimed is not None
    assert reclaimed.task_id == task.task_id
    assert reclaimed.owner == "bob"


def test_submit_after_expiry_rejected():
    clock = FakeClock()
    rt = escalated_router(clock=clock)
    task = rt.claim_task(router.Pool.SOURCE, "ana")
    clock.advance(301.0)
    with pytest.raises(router.WrongOwnerError):
        rt.submit_label(task.task_id, "ana", JointLabel("t1", "s1", "e1"))


def test_duplicate_submit_with_token_is_idempotent():
    rt = escalated_router()
    task = rt.claim_task(router.Pool.SOURCE, "ana")
    label = JointLabel("t1", "s1", "e1")
    d1 = rt.submit_label(task.task_id, "ana", label, client_token="tok-1")
    before = len(rt.events)
    d2 = rt.submit_label(task.task_id, "ana", label, client_token="tok-1")
    assert d1.label == d2.label
    assert len(rt.events) == before


def test_concurrent_claims_are_exclusive():
    rt = escalated_router(n=10)
    results = []
    lock = threading.Lock()

    def worker(i):
        task = rt.claim_task(router.Pool.SOURCE, f"analyst-{i}")
        if task is not None:
            with lock:
                results.append(task.task_id)

    threads = [threading.Thread(target=worker, args=(i,)) for i in range(100)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert len(results) == 10
    assert len(set(results)) == 10


# -- event log / replay -----------------------------------------------------------


def test_replay_empty_log():
    state = router.replay_log([])
    assert state.snapshot() == router.RouterState().snapshot()


def test_replay_equals_live_state():
    clock = FakeClock()
    log = io.StringIO()
    rt = make_router(thresholds=ThresholdSet(tau_nlu=1e12), clock=clock, log_file=log)
    for i in range(5):
        rt.route(f"u{i}", f"f0 w{i} f1")
        clock.advance(1.0)
    for i in range(3):
        task = rt.claim_task(router.Pool.SOURCE, "ana")
        rt.submit_label(task.task_id, "ana", JointLabel(f"t{i}", f"s{i}", f"e{i}"))
    replayed = router.replay_log(rt.events)
    assert replayed.snapshot() == rt.state.snapshot()


def test_replay_from_log_file(tmp_path):
    clock = FakeClock()
    path = tmp_path / "events.ndjson"
    with open(path, "w", encoding="utf-8") as fh:
        rt = make_router(thresholds=ThresholdSet(tau_nlu=1e12), clock=clock, log_file=fh)
        rt.route("u0", "f0 w0 f1")
        task = rt.claim_task(router.Pool.SOURCE, "ana")
        rt.submit_label(task.task_id, "ana", JointLabel("t0", "s0", "e0"))
    replayed = router.replay_log(path)
    assert replayed.snapshot() == rt.state.snapshot()


def test_replay_n_submits_yield_n_labeled(tmp_path):
    rt = escalated_router(n=4)
    for i in range(4):
        task = rt.claim_task(router.Pool.SOURCE, "ana")
        rt.submit_label(task.task_id, "ana", JointLabel("t1", "s1", "e1"))
    replayed = router.replay_log(rt.events)
    labeled = [t for t in replayed.tasks.values()
               if t.state == router.TaskState.LABELED.value]
    assert len(labeled) == 4


def test_replay_corrupt_record_reports_index():
    with pytest.raises(ValueError, match="index 0"):
        router.replay_log([{"type": "claim", "task_id": "missing", "ts": 0}])


def test_replay_corrupt_file_reports_line(tmp_path):
    path = tmp_path / "bad.ndjson"
    path.write_text('{"type": "claim"\n', encoding="utf-8")
    with pytest.raises(ValueError, match="line 1"):
        router.replay_log(path)


# -- monotonicity -------------------------------------------------------------


def test_escalations_monotone_in_tau_nlu():
    corpus = make_separable_corpus(size=100, seed=21)
    prev = -1
    for tau in [0.0, 1.0, 1.2, 1.5, 2.0, 1e12]:
        rt = make_router(thresholds=ThresholdSet(tau_nlu=tau))
        escalated = sum(
            1 for ex in corpus
            if rt.route(ex.id, ex.text).outcome != router.Outcome.AUTOMATED.value
        )
        assert escalated >= prev
        prev = escalated
