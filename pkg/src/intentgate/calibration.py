"""Data preparation (label-set intersection, n-best expansion) and empirical
rejection-threshold calibration."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

from .data import Corpus, LabelCatalog


@dataclass
class ThresholdSet:
    """Per-stage confidence cutoffs. A stage rejects when its confidence is
    strictly below the threshold, so tau_nlu values below 1 accept every
    utterance (ratio confidences are always >= 1)."""

    tau_asr: float = 0.0
    tau_mt: float = 0.0
    tau_nlu: float = 0.0

    def __post_init__(self) -> None:
        for name in ("tau_asr", "tau_mt", "tau_nlu"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")


@dataclass
class CalibrationReport:
    threshold: float
    accepted_accuracy: float
    rejection_fraction: float
    rejected_count: int
    analyst_cost: float
    constrained: bool  # a higher-accuracy cutoff existed but broke the budget

    def to_kv(self, stage: str = "nlu") -> str:
        """Flat key-value block in the gateway config file format."""
        lines = [
            f"tau_{stage} = {self.threshold!r}",
            f"calibration.accepted_accuracy = {self.accepted_accuracy!r}",
            f"calibration.rejection_fraction = {self.rejection_fraction!r}",
            f"calibration.rejected_count = {self.rejected_count}",
            f"calibration.analyst_cost = {self.analyst_cost!r}",
            f"calibration.constrained = {str(self.constrained).lower()}",
        ]
        return "\n".join(lines) + "\n"


@dataclass
class IntersectionResult:
    filtered_a: Corpus
    filtered_b: Corpus
    catalog: LabelCatalog
    discard_fraction_a: float
    discard_fraction_b: float


def intersect_label_sets(corpus_a: Corpus, corpus_b: Corpus) -> IntersectionResult:
    """Keep only examples whose joint label occurs in both corpora, and
    report how much of each corpus was discarded."""
    labels_a = {ex.label for ex in corpus_a}
    labels_b = {ex.label for ex in corpus_b}
    shared = labels_a & labels_b
    if not shared:
        raise ValueError("disjoint label sets: no joint label occurs in both corpora")
    filtered_a = [ex for ex in corpus_a if ex.label in shared]
    filtered_b = [ex for ex in corpus_b if ex.label in shared]
    return IntersectionResult(
        filtered_a=filtered_a,
        filtered_b=filtered_b,
        catalog=LabelCatalog.from_labels(shared),
        discard_fraction_a=1.0 - len(filtered_a) / len(corpus_a) if corpus_a else 0.0,
        discard_fraction_b=1.0 - len(filtered_b) / len(corpus_b) if corpus_b else 0.0,
    )


def expand_nbest(corpus: Corpus) -> tuple[Corpus, int]:
    """Flatten n-best hypothesis lists: each hypothesis becomes one training
    example with the original label and uniform weight. Returns the flat
    corpus and the number of examples skipped for having no hypotheses."""
    flat: Corpus = []
    skipped = 0
    for ex in corpus:
        if ex.n_best is None:
            flat.append(ex)
            continue
        if not ex.n_best:
            skipped += 1
            continue
        for k, hyp in enumerate(ex.n_best):
            flat.append(replace(ex, id=f"{ex.id}#{k}", text=hyp, n_best=None))
    return flat, skipped


def calibrate_threshold(
    dev: Sequence[tuple[float, bool]],
    max_rejection: float = 0.2,
    cost_per_reject: float = 1.0,
) -> CalibrationReport:
    """Pick the confidence cutoff maximizing accuracy on the accepted subset,
    subject to rejecting at most max_rejection of the dev set.

    Candidates are 0 plus the midpoints between consecutive sorted distinct
    confidences plus one above the maximum, so the result never depends on
    strict-vs-inclusive comparison at observed values. Ties break toward
    lower rejection (lower analyst cost).
    """
    if not dev:
        raise ValueError("calibrate_threshold needs a non-empty dev set")
    if not 0.0 <= max_rejection < 1.0:
        raise ValueError("max_rejection must lie in [0, 1)")

    n = len(dev)
    confs = sorted({c for c, _ in dev})
    candidates = [0.0]
    candidates += [(a + b) / 2.0 for a, b in zip(confs, confs[1:])]
    candidates.append(confs[-1] + 1.0)

    def evaluate(tau: float) -> tuple[float, float, int]:
        accepted = [ok for c, ok in dev if c >= tau]
        rejected = n - len(accepted)
        if not accepted:
            return (0.0, rejected / n, rejected)
        return (sum(accepted) / len(accepted), rejected / n, rejected)

    best = None
    best_unconstrained_acc = 0.0
    for tau in candidates:
        acc, rej_frac, rejected = evaluate(tau)
        best_unconstrained_acc = max(best_unconstrained_acc, acc)
        if rej_frac > max_rejection:
            continue
        key = (acc, -rej_frac)
        if best is None or key > best[0]:
            best = (key, tau, acc, rej_frac, rejected)

    # tau = 0 rejects nothing, so a feasible candidate always exists.
    assert best is not None
    _, tau, acc, rej_frac, rejected = best
    return CalibrationReport(
        threshold=tau,
        accepted_accuracy=acc,
        rejection_fraction=rej_frac,
        rejected_count=rejected,
        analyst_cost=rejected * cost_per_reject,
        constrained=best_unconstrained_acc > acc + 1e-15,
    )
