"""N-gram featurization, one-vs-rest max-margin intent classification, and
confidence scoring.

The classifier is a set of binary linear scorers, one per joint label,
trained with hinge loss and L2 regularization by seeded subgradient descent.
The winning label is the argmax over per-label scores; scores are mapped to
probabilities with a sigmoid and the confidence of a prediction is the ratio
of the best and second-best probabilities.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .data import Corpus, JointLabel

# Keep the confidence ratio finite when the runner-up probability underflows,
# and >= 1 even when both probabilities are denormal.
PROB_FLOOR = 1e-300
CONFIDENCE_CAP = 1e9

NGramRange = tuple[int, int]
FeatureVector = dict[str, int]


def tokenize(text: str) -> list[str]:
    return text.lower().split()


def extract_features(text: str, n_range: NGramRange = (1, 2)) -> FeatureVector:
    """Count word n-grams for every n in the inclusive range after
    lowercasing and whitespace tokenization. Multi-word keys are joined
    with a single space."""
    lo, hi = n_range
    if lo < 1:
        raise ValueError(f"n-gram range lower bound must be >= 1, got {lo}")
    tokens = tokenize(text)
    feats: FeatureVector = {}
    for n in range(lo, hi + 1):
        for i in range(len(tokens) - n + 1):
            key = " ".join(tokens[i : i + n])
            feats[key] = feats.get(key, 0) + 1
    return feats


def sigmoid_prob(s: float) -> float:
    """Map a raw margin score to (0,1); strictly increasing, overflow-safe."""
    if s >= 0:
        return 1.0 / (1.0 + math.exp(-min(s, 745.0)))
    e = math.exp(max(s, -745.0))
    return e / (1.0 + e)


@dataclass
class Prediction:
    best: JointLabel
    second: JointLabel | None
    scores: dict[JointLabel, float]
    prob_best: float
    prob_second: float
    confidence: float


@dataclass
class ClassifierModel:
    """Trained one-vs-rest linear model. Immutable once trained: predict and
    score never mutate it, so a single instance is safe to share across
    concurrent readers."""

    labels: list[JointLabel]
    vocab: dict[str, int]
    weights: np.ndarray  # shape (n_labels, n_features)
    bias: np.ndarray  # shape (n_labels,)
    meta: dict = field(default_factory=dict)

    def score(self, features: FeatureVector) -> dict[JointLabel, float]:
        """Per-label dot product with the feature counts plus bias. Features
        outside the training vocabulary are ignored."""
        idx = []
        vals = []
        for key, count in features.items():
            j = self.vocab.get(key)
            if j is not None:
                idx.append(j)
                vals.append(float(count))
        if idx:
            raw = self.weights[:, idx] @ np.asarray(vals) + self.bias
        else:
            raw = self.bias
        return {lab: float(raw[i]) for i, lab in enumerate(self.labels)}

    def predict(self, features: FeatureVector) -> Prediction:
        """Best and runner-up label with probability and confidence ratio.
        Score ties break lexicographically on (tn, sv, en)."""
        scores = self.score(features)
        ordered = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))
        best_label, best_score = ordered[0]
        prob_best = sigmoid_prob(best_score)
        if len(ordered) > 1:
            second_label, second_score = ordered[1]
            prob_second = sigmoid_prob(second_score)
            confidence = min(prob_best / max(prob_second, PROB_FLOOR), CONFIDENCE_CAP)
            confidence = max(confidence, 1.0)
        else:
            # Single-label model: no runner-up, report the capped confidence.
            second_label = None
            prob_second = PROB_FLOOR
            confidence = CONFIDENCE_CAP
        return Prediction(
            best=best_label,
            second=second_label,
            scores=scores,
            prob_best=prob_best,
            prob_second=prob_second,
            confidence=confidence,
        )

    def n_range(self) -> NGramRange:
        lo, hi = self.meta.get("n_range", (1, 2))
        return (lo, hi)

    def predict_text(self, text: str) -> Prediction:
        return self.predict(extract_features(text, self.n_range()))

    def save(self, path: str | Path) -> None:
        doc = {
            "format": "intentgate-model-v1",
            "labels": [lab.as_tuple() for lab in self.labels],
            "vocab": sorted(self.vocab, key=self.vocab.get),
            "weights": self.weights.tolist(),
            "bias": self.bias.tolist(),
            "meta": self.meta,
        }
        Path(path).write_text(json.dumps(doc), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "ClassifierModel":
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        if doc.get("format") != "intentgate-model-v1":
            raise ValueError(f"{path}: not an intentgate model file")
        return cls(
            labels=[JointLabel.from_tuple(t) for t in doc["labels"]],
            vocab={key: j for j, key in enumerate(doc["vocab"])},
            weights=np.asarray(doc["weights"], dtype=np.float64),
            bias=np.asarray(doc["bias"], dtype=np.float64),
            meta=doc.get("meta", {}),
        )


def train(
    corpus: Corpus,
    n_range: NGramRange = (1, 2),
    epochs: int = 30,
    reg: float = 1e-4,
    seed: int = 0,
) -> ClassifierModel:
    """Train one binary hinge-loss scorer per distinct joint label,
    one-vs-rest, by subgradient descent with L2 regularization.

    Deterministic: identical corpus, parameters, and seed give bit-identical
    weights. Expects n-best examples to be expanded beforehand
    (calibration.expand_nbest).
    """
    if not corpus:
        raise ValueError("empty training set")

    labels = sorted({ex.label for ex in corpus})
    label_pos = {lab: i for i, lab in enumerate(labels)}

    vocab: dict[str, int] = {}
    feat_idx: list[np.ndarray] = []
    feat_val: list[np.ndarray] = []
    y_idx = np.empty(len(corpus), dtype=np.int64)
    for i, ex in enumerate(corpus):
        feats = extract_features(ex.text, n_range)
        idx = []
        vals = []
        for key, count in feats.items():
            j = vocab.setdefault(key, len(vocab))
            idx.append(j)
            vals.append(float(count))
        feat_idx.append(np.asarray(idx, dtype=np.int64))
        feat_val.append(np.asarray(vals, dtype=np.float64))
        y_idx[i] = label_pos[ex.label]

    n_labels = len(labels)
    n_feats = len(vocab)
    weights = np.zeros((n_labels, n_feats), dtype=np.float64)
    bias = np.zeros(n_labels, dtype=np.float64)
    # Lazy L2 decay: true weights are `scale * weights`.
    scale = 1.0

    rng = np.random.default_rng(seed)
    t = 0
    for _ in range(epochs):
        for i in rng.permutation(len(corpus)):
            t += 1
            eta = 1.0 / (1.0 + reg * t)
            idx = feat_idx[i]
            vals = feat_val[i]
            if idx.size:
                raw = scale * (weights[:, idx] @ vals) + bias
            else:
                raw = bias.copy()
            y = np.full(n_labels, -1.0)
            y[y_idx[i]] = 1.0
            violating = y * raw < 1.0
            scale *= 1.0 - eta * reg
            if scale < 1e-9:
                weights *= scale
                scale = 1.0
            if np.any(violating):
                step = (eta / scale) * y[violating]
                if idx.size:
                    weights[np.ix_(violating, idx)] += step[:, None] * vals[None, :]
                bias[violating] += eta * y[violating]

    weights *= scale
    return ClassifierModel(
        labels=labels,
        vocab=vocab,
        weights=weights,
        bias=bias,
        meta={
            "n_range": list(n_range),
            "epochs": epochs,
            "reg": reg,
            "seed": seed,
            "train_size": len(corpus),
        },
    )
