"""Evaluation kernels: WER with error-type breakdown, utterance error rate,
BLEU, TER with greedy block shifts, error-rejection curves, model-agreement
contingency tables, corpus statistics, and CSV report writers.

All functions are pure and safe for concurrent use.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .data import Corpus, JointLabel

Tokens = Sequence[str]


# ---------------------------------------------------------------------------
# Word error rate


@dataclass
class WerBreakdown:
    substitutions: int
    deletions: int
    insertions: int
    reference_token_count: int
    wer: float
    empty_reference: bool = False

    @property
    def total_edits(self) -> int:
        return self.substitutions + self.deletions + self.insertions

    def shares(self) -> dict[str, float]:
        """Fraction of total errors by type; zeros when there are no errors."""
        total = self.total_edits
        if total == 0:
            return {"sub": 0.0, "del": 0.0, "ins": 0.0}
        return {
            "sub": self.substitutions / total,
            "del": self.deletions / total,
            "ins": self.insertions / total,
        }


def wer(ref_tokens: Tokens, hyp_tokens: Tokens) -> WerBreakdown:
    """Minimum-edit alignment with unit costs. Among minimum-cost alignments
    the breakdown prefers fewer substitutions, then fewer deletions.

    An empty reference with a non-empty hypothesis is flagged and scored as
    insertions over a reference length of 1.
    """
    ref = list(ref_tokens)
    hyp = list(hyp_tokens)
    if not ref:
        n_ins = len(hyp)
        return WerBreakdown(0, 0, n_ins, 0, float(n_ins), empty_reference=bool(hyp))

    # dp[j] = (edits, subs, dels, ins) aligning ref[:i] to hyp[:j];
    # tuples compare on (edits, subs, dels) for the deterministic breakdown.
    def key(c: tuple[int, int, int, int]) -> tuple[int, int, int]:
        return (c[0], c[1], c[2])

    prev = [(j, 0, 0, j) for j in range(len(hyp) + 1)]
    for i in range(1, len(ref) + 1):
        cur = [(i, 0, i, 0)]
        for j in range(1, len(hyp) + 1):
            if ref[i - 1] == hyp[j - 1]:
                diag = prev[j - 1]
            else:
                d = prev[j - 1]
                diag = (d[0] + 1, d[1] + 1, d[2], d[3])
            up = prev[j]
            dele = (up[0] + 1, up[1], up[2] + 1, up[3])
            left = cur[j - 1]
            ins = (left[0] + 1, left[1], left[2], left[3] + 1)
            cur.append(min(diag, dele, ins, key=key))
        prev = cur
    edits, subs, dels, inss = prev[len(hyp)]
    return WerBreakdown(subs, dels, inss, len(ref), edits / len(ref))


def edit_distance(ref: Tokens, hyp: Tokens) -> int:
    """Plain token-level Levenshtein distance (unit costs)."""
    ref = list(ref)
    hyp = list(hyp)
    prev = list(range(len(hyp) + 1))
    for i in range(1, len(ref) + 1):
        cur = [i]
        for j in range(1, len(hyp) + 1):
            cost = 0 if ref[i - 1] == hyp[j - 1] else 1
            cur.append(min(prev[j - 1] + cost, prev[j] + 1, cur[j - 1] + 1))
        prev = cur
    return prev[len(hyp)]


def utterance_error_rate(pairs: Sequence[tuple[Tokens, Tokens]]) -> float:
    """Fraction of (reference, hypothesis) pairs with at least one edit."""
    if not pairs:
        raise ValueError("utterance_error_rate needs a non-empty pair list")
    wrong = sum(1 for ref, hyp in pairs if list(ref) != list(hyp))
    return wrong / len(pairs)


# ---------------------------------------------------------------------------
# BLEU / TER


def _fold(tokens: Tokens) -> list[str]:
    return [t.lower() for t in tokens]


def bleu(refs: Sequence[Tokens], hyps: Sequence[Tokens], max_n: int = 4) -> float:
    """Corpus-level case-insensitive BLEU, single reference, no smoothing.

    Geometric mean of modified n-gram precisions for n=1..max_n times the
    brevity penalty exp(1 - ref_len/hyp_len) when the hypothesis is shorter,
    scaled to [0, 100]. Any order with zero matches yields 0.
    """
    if len(refs) != len(hyps):
        raise ValueError("bleu: refs and hyps must have equal length")
    matches = [0] * max_n
    totals = [0] * max_n
    ref_len = 0
    hyp_len = 0
    for ref, hyp in zip(refs, hyps):
        ref = _fold(ref)
        hyp = _fold(hyp)
        ref_len += len(ref)
        hyp_len += len(hyp)
        for n in range(1, max_n + 1):
            hyp_ngrams = Counter(tuple(hyp[i : i + n]) for i in range(len(hyp) - n + 1))
            ref_ngrams = Counter(tuple(ref[i : i + n]) for i in range(len(ref) - n + 1))
            totals[n - 1] += sum(hyp_ngrams.values())
            matches[n - 1] += sum(min(c, ref_ngrams[g]) for g, c in hyp_ngrams.items())
    if hyp_len == 0 or any(m == 0 for m in matches) or any(t == 0 for t in totals):
        return 0.0
    log_prec = sum(math.log(m / t) for m, t in zip(matches, totals)) / max_n
    bp = 1.0 if hyp_len >= ref_len else math.exp(1.0 - ref_len / hyp_len)
    return 100.0 * bp * math.exp(log_prec)


def ter(ref_tokens: Tokens, hyp_tokens: Tokens) -> float:
    """Translation edit rate in percent: (edits incl. block shifts) over
    reference length times 100.

    Shifts are found greedily: each iteration applies the block shift that
    most reduces the remaining edit distance (ties go to the earliest block
    in scan order). Greedy search upper-bounds exact TER but never exceeds
    the shift-free edit distance.
    """
    ref = _fold(ref_tokens)
    hyp = _fold(hyp_tokens)
    if not ref:
        return float(len(hyp)) * 100.0
    shifts = 0
    current = hyp
    dist = edit_distance(ref, current)
    while dist > 0:
        best_gain = 0
        best_hyp: list[str] | None = None
        n = len(current)
        for start in range(n):
            for length in range(1, n - start + 1):
                block = current[start : start + length]
                rest = current[:start] + current[start + length :]
                for pos in range(len(rest) + 1):
                    if pos == start:
                        continue
                    cand = rest[:pos] + block + rest[pos:]
                    gain = dist - edit_distance(ref, cand)
                    if gain > best_gain:
                        best_gain = gain
                        best_hyp = cand
        if best_gain < 1 or best_hyp is None:
            break
        shifts += 1
        current = best_hyp
        dist -= best_gain
    return (shifts + dist) / len(ref) * 100.0


def length_ratio(refs: Sequence[Tokens], hyps: Sequence[Tokens]) -> float:
    """Hypothesis token count over reference token count, times 100."""
    ref_len = sum(len(r) for r in refs)
    hyp_len = sum(len(h) for h in hyps)
    if ref_len == 0:
        raise ValueError("length_ratio: empty reference corpus")
    return hyp_len / ref_len * 100.0


@dataclass
class MtQualityReport:
    bleu: float
    ter: float
    length_ratio: float


def mt_quality(refs: Sequence[Tokens], hyps: Sequence[Tokens]) -> MtQualityReport:
    if len(refs) != len(hyps):
        raise ValueError("mt_quality: refs and hyps must have equal length")
    ter_edits = 0.0
    ref_len = 0
    for ref, hyp in zip(refs, hyps):
        ref = _fold(ref)
        if not ref:
            continue
        ter_edits += ter(ref, hyp) / 100.0 * len(ref)
        ref_len += len(ref)
    return MtQualityReport(
        bleu=bleu(refs, hyps),
        ter=(ter_edits / ref_len * 100.0) if ref_len else 0.0,
        length_ratio=length_ratio(refs, hyps),
    )


# ---------------------------------------------------------------------------
# Error-rejection curves


@dataclass
class ErrorRejectionCurve:
    points: list[tuple[float, float]]  # (rejection_fraction, error_rate)
    sample_count: int

    def error_at(self, fraction: float) -> float:
        for r, e in self.points:
            if abs(r - fraction) < 1e-12:
                return e
        raise KeyError(f"no curve point at rejection fraction {fraction}")


def error_rejection_curve(
    items: Sequence[tuple[float, bool]],
    points: Sequence[float] = (0.0, 0.1, 0.2),
) -> ErrorRejectionCurve:
    """Error rate on the retained subset as the lowest-confidence items are
    rejected.

    Items are sorted by descending confidence (stable on input order); at
    rejection fraction r the floor(r*N) least-confident items are dropped and
    the error rate is computed over the rest. The 0% point is always present.
    """
    if not items:
        raise ValueError("error_rejection_curve needs a non-empty item list")
    fractions = sorted({0.0} | {float(p) for p in points})
    if fractions[-1] >= 1.0 or fractions[0] < 0.0:
        raise ValueError("rejection fractions must lie in [0, 1)")
    n = len(items)
    order = sorted(range(n), key=lambda i: -items[i][0])
    correct_sorted = [items[i][1] for i in order]
    curve = []
    for r in fractions:
        kept = correct_sorted[: n - math.floor(r * n)]
        errors = sum(1 for ok in kept if not ok)
        curve.append((r, errors / len(kept)))
    return ErrorRejectionCurve(points=curve, sample_count=n)


# ---------------------------------------------------------------------------
# Model agreement


@dataclass
class AgreementTable:
    """2x2 contingency of per-item correctness for two models: n_pp counts
    items both got right, n_pm only model A, n_mp only model B, n_mm neither."""

    n_pp: int
    n_pm: int
    n_mp: int
    n_mm: int

    @property
    def total(self) -> int:
        return self.n_pp + self.n_pm + self.n_mp + self.n_mm

    def fractions(self) -> dict[str, float]:
        tot = self.total
        if tot == 0:
            return {"pp": 0.0, "pm": 0.0, "mp": 0.0, "mm": 0.0}
        return {
            "pp": 100.0 * self.n_pp / tot,
            "pm": 100.0 * self.n_pm / tot,
            "mp": 100.0 * self.n_mp / tot,
            "mm": 100.0 * self.n_mm / tot,
        }


def agreement_table(
    preds_a: Sequence[JointLabel],
    preds_b: Sequence[JointLabel],
    gold: Sequence[JointLabel],
) -> AgreementTable:
    if not (len(preds_a) == len(preds_b) == len(gold)):
        raise ValueError("agreement_table: prediction and gold lists must align")
    cells = Counter()
    for a, b, g in zip(preds_a, preds_b, gold):
        cells[(a == g, b == g)] += 1
    return AgreementTable(
        n_pp=cells[(True, True)],
        n_pm=cells[(True, False)],
        n_mp=cells[(False, True)],
        n_mm=cells[(False, False)],
    )


# ---------------------------------------------------------------------------
# Corpus statistics and report writers


@dataclass
class CorpusStats:
    utterances: int
    words: int
    unique_labels: int


def corpus_stats(corpus: Corpus) -> CorpusStats:
    return CorpusStats(
        utterances=len(corpus),
        words=sum(len(ex.text.split()) for ex in corpus),
        unique_labels=len({ex.label for ex in corpus}),
    )


def format_stats_csv(rows: Sequence[tuple[str, CorpusStats]]) -> str:
    lines = ["Data set,# utts,# words,# unique labels"]
    for name, st in rows:
        lines.append(f"{name},{st.utterances},{st.words},{st.unique_labels}")
    return "\n".join(lines) + "\n"


def format_mt_quality_csv(rows: Sequence[tuple[str, MtQualityReport]]) -> str:
    lines = ["Translation,BLEU,TER,Length"]
    for name, rep in rows:
        lines.append(f"{name},{rep.bleu:.1f},{rep.ter:.1f},{rep.length_ratio:.1f}")
    return "\n".join(lines) + "\n"


def format_rejection_csv(
    rows: Sequence[tuple[str, ErrorRejectionCurve]],
    fractions: Sequence[float] = (0.0, 0.1, 0.2),
) -> str:
    header = "Configuration," + ",".join(f"{f:.0%}" for f in fractions)
    lines = [header]
    for name, curve in rows:
        cells = ",".join(f"{curve.error_at(f) * 100:.1f}" for f in fractions)
        lines.append(f"{name},{cells}")
    return "\n".join(lines) + "\n"


def format_agreement_csv(table: AgreementTable) -> str:
    fr = table.fractions()
    lines = [
        "Model A,Model B,Share",
        f"+,+,{fr['pp']:.1f}%",
        f"+,-,{fr['pm']:.1f}%",
        f"-,+,{fr['mp']:.1f}%",
        f"-,-,{fr['mm']:.1f}%",
    ]
    return "\n".join(lines) + "\n"
