"""ASR/MT adapter contracts, seeded noise-channel simulators standing in for
production ASR and MT, MT-side text normalization, and the offline
translate-then-train bootstrap.

Simulators are pure functions of (input, config, seed): the per-call RNG is
derived from a CRC of the input text so repeated calls are reproducible and
independent of call order.
"""

from __future__ import annotations

import random
import re
import string
import zlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

from . import nlu
from .data import Corpus, LabeledExample

_FALLBACK_CHARS = string.ascii_lowercase


def _derive_rng(seed: int, text: str, salt: int = 0) -> random.Random:
    return random.Random((seed * 1000003 + salt) ^ zlib.crc32(text.encode("utf-8")))


# ---------------------------------------------------------------------------
# Results and configs


@dataclass
class AsrResult:
    n_best: list[tuple[str, float]]  # (hypothesis, score), descending score
    asr_confidence: float
    no_hypothesis: bool = False

    @property
    def best_text(self) -> str:
        return self.n_best[0][0] if self.n_best else ""


@dataclass
class MtResult:
    translation: str
    mt_confidence: float


@dataclass
class NoiseConfig:
    """Per-token error channel: substitute with p_sub, delete with p_del
    (mutually exclusive), and insert a token after each position with p_ins.

    Defaults approximate the 32/22/28 substitution/deletion/insertion error
    mix at roughly one error per three reference words.
    """

    p_sub: float = 0.13
    p_del: float = 0.09
    p_ins: float = 0.11
    substitutions: dict[str, list[str]] = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("p_sub", "p_del", "p_ins"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.p_sub + self.p_del > 1.0:
            raise ValueError("p_sub + p_del must not exceed 1 (exclusive per-token events)")


def _perturb_token(token: str, rng: random.Random) -> str:
    """Character-level substitute used when no lexicon entry exists;
    guaranteed to differ from the input."""
    if not token:
        return rng.choice(_FALLBACK_CHARS)
    pos = rng.randrange(len(token))
    choices = [c for c in _FALLBACK_CHARS if c != token[pos]]
    return token[:pos] + rng.choice(choices) + token[pos + 1 :]


def simulate_asr_noise(text: str, cfg: NoiseConfig, salt: int = 0) -> tuple[str, int]:
    """Apply the noise channel to one utterance. Returns the noisy text and
    the number of perturbations applied. Deterministic under (text, cfg.seed,
    salt)."""
    rng = _derive_rng(cfg.seed, text, salt)
    tokens = text.split()
    out: list[str] = []
    hits = 0
    for tok in tokens:
        u = rng.random()
        if u < cfg.p_sub:
            alts = cfg.substitutions.get(tok)
            repl = rng.choice(alts) if alts else _perturb_token(tok, rng)
            out.append(repl)
            hits += 1
        elif u < cfg.p_sub + cfg.p_del:
            hits += 1  # token dropped
        else:
            out.append(tok)
        if rng.random() < cfg.p_ins:
            # Perturbed copy of an existing token, so insertions rarely
            # cancel against a nearby deletion in the alignment.
            out.append(_perturb_token(rng.choice(tokens), rng))
            hits += 1
    return " ".join(out), hits


# ---------------------------------------------------------------------------
# Adapter contracts


class AsrAdapter(Protocol):
    def recognize(self, audio_or_text: str) -> AsrResult: ...


class MtAdapter(Protocol):
    def supports(self, src: str, tgt: str) -> bool: ...

    def translate_text(self, text: str) -> MtResult: ...


class SimulatedAsr:
    """Treats gold text as "audio" and emits an n-best list of noisy
    hypotheses. Hypothesis confidence decays with the number of perturbations
    applied; the list is sorted by descending confidence."""

    def __init__(self, noise: NoiseConfig, n_best: int = 5, penalty: float = 0.25):
        self.noise = noise
        self.n_best = n_best
        self.penalty = penalty

    def recognize(self, audio_or_text: str) -> AsrResult:
        hyps: list[tuple[str, float]] = []
        for k in range(self.n_best):
            text, hits = simulate_asr_noise(audio_or_text, self.noise, salt=k)
            if not text:
                continue
            hyps.append((text, (1.0 - self.penalty) ** hits))
        hyps.sort(key=lambda h: -h[1])
        if not hyps:
            return AsrResult(n_best=[], asr_confidence=0.0, no_hypothesis=True)
        return AsrResult(n_best=hyps, asr_confidence=hyps[0][1])


# ---------------------------------------------------------------------------
# Translation lexicon and simulator


@dataclass
class TranslationLexicon:
    """source token -> weighted target alternatives. Multiple entries per
    source token model translation ambiguity."""

    entries: dict[str, list[tuple[str, float]]] = field(default_factory=dict)

    def add(self, source: str, target: str, weight: float = 1.0) -> None:
        if weight <= 0:
            raise ValueError(f"lexicon weight must be positive: {source}->{target}")
        self.entries.setdefault(source, []).append((target, weight))

    @classmethod
    def identity(cls, vocabulary: list[str] | None = None) -> "TranslationLexicon":
        lex = cls()
        for tok in vocabulary or []:
            lex.add(tok, tok)
        return lex

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for src, alts in self.entries.items():
                for tgt, w in alts:
                    fh.write(f"{src}\t{tgt}\t{w!r}\n")

    @classmethod
    def load(cls, path: str | Path) -> "TranslationLexicon":
        lex = cls()
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.rstrip("\n")
                if not line:
                    continue
                parts = line.split("\t")
                if len(parts) != 3:
                    raise ValueError(f"{path}:{lineno}: expected source<TAB>target<TAB>weight")
                lex.add(parts[0], parts[1], float(parts[2]))
        return lex


class LexiconTranslator:
    """Token-by-token translator over a weighted lexicon. Ambiguous entries
    are sampled by weight under the seed; unknown tokens pass through
    unchanged and lower the reported confidence. An optional duplication
    channel repeats translated tokens with small probability."""

    def __init__(
        self,
        lexicon: TranslationLexicon,
        src: str,
        tgt: str,
        seed: int = 0,
        p_dup: float = 0.0,
    ):
        self.lexicon = lexicon
        self.src = src
        self.tgt = tgt
        self.seed = seed
        self.p_dup = p_dup

    def supports(self, src: str, tgt: str) -> bool:
        return (src, tgt) == (self.src, self.tgt)

    def translate_text(self, text: str) -> MtResult:
        tokens = text.split()
        if not tokens:
            return MtResult(translation="", mt_confidence=1.0)
        rng = _derive_rng(self.seed, text)
        out: list[str] = []
        known = 0
        words = 0
        for tok in tokens:
            # Lookups ignore surrounding punctuation and case, so normalized
            # (cased, punctuated) MT input still hits the lexicon.
            m = re.match(r"^(\W*)(.*?)(\W*)$", tok, re.UNICODE)
            pre, core, post = m.groups()
            if not core:
                out.append(tok)
                continue
            words += 1
            alts = self.lexicon.entries.get(core.lower())
            if alts:
                known += 1
                if len(alts) == 1:
                    tgt_tok = alts[0][0]
                else:
                    weights = [w for _, w in alts]
                    tgt_tok = rng.choices([t for t, _ in alts], weights=weights)[0]
                if core[:1].isupper():
                    tgt_tok = tgt_tok[:1].upper() + tgt_tok[1:]
            else:
                tgt_tok = core
            out.append(pre + tgt_tok + post)
            if self.p_dup and rng.random() < self.p_dup:
                out.append(tgt_tok)
        confidence = known / words if words else 1.0
        return MtResult(translation=" ".join(out), mt_confidence=confidence)


class IdentityTranslator:
    """Passes text through unchanged with full confidence; supports any pair."""

    def supports(self, src: str, tgt: str) -> bool:
        return True

    def translate_text(self, text: str) -> MtResult:
        return MtResult(translation=text, mt_confidence=1.0)


def translate(adapter: MtAdapter, text: str, src: str, tgt: str) -> MtResult:
    if not adapter.supports(src, tgt):
        raise ValueError(f"translator does not support the language pair {src}->{tgt}")
    return adapter.translate_text(text)


# ---------------------------------------------------------------------------
# MT-side text normalization

_TERMINAL_PUNCT = (".", "!", "?")
_PUNCT_RE = re.compile(r"[^\w\s]", re.UNICODE)


def normalize_for_mt(text: str) -> str:
    """Prepare classifier-side text for a cased, punctuated MT system:
    capitalize the first alphabetic token and ensure terminal punctuation."""
    if not text.strip():
        return text
    tokens = text.split()
    for i, tok in enumerate(tokens):
        if tok[0].isalpha():
            tokens[i] = tok[0].upper() + tok[1:]
            break
    out = " ".join(tokens)
    if not out.endswith(_TERMINAL_PUNCT):
        out += "."
    return out


def denormalize_from_mt(text: str) -> str:
    """Strip punctuation and lowercase MT output before featurization."""
    return " ".join(_PUNCT_RE.sub(" ", text).lower().split())


# ---------------------------------------------------------------------------
# Offline translate-then-train bootstrap


@dataclass
class BootstrapResult:
    model: nlu.ClassifierModel
    translated_corpus: Corpus
    failed_utterances: list[str]
    mean_mt_confidence: float


def bootstrap_offline(
    source_corpus: Corpus,
    translator: MtAdapter,
    src: str,
    tgt: str,
    n_range: nlu.NGramRange = (1, 2),
    epochs: int = 30,
    reg: float = 1e-4,
    seed: int = 0,
) -> BootstrapResult:
    """Translate every training utterance into the target language, keeping
    the labels, then train a target-language model with the same parameters
    a native model would use."""
    if not source_corpus:
        raise ValueError("empty training set")
    if not translator.supports(src, tgt):
        raise ValueError(f"translator does not support the language pair {src}->{tgt}")
    translated: Corpus = []
    failed: list[str] = []
    conf_sum = 0.0
    for ex in source_corpus:
        try:
            result = translator.translate_text(ex.text)
        except Exception:
            failed.append(ex.id)
            continue
        conf_sum += result.mt_confidence
        translated.append(
            LabeledExample(
                id=ex.id,
                language=tgt,
                text=result.translation,
                label=ex.label,
            )
        )
    if not translated:
        raise ValueError("all utterances failed translation")
    model = nlu.train(translated, n_range=n_range, epochs=epochs, reg=reg, seed=seed)
    return BootstrapResult(
        model=model,
        translated_corpus=translated,
        failed_utterances=failed,
        mean_mt_confidence=conf_sum / len(translated),
    )
