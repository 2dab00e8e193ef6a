"""Seeded synthetic bilingual corpus generator.

Stands in for proprietary call-center data: each joint label owns a witness
keyword, utterances mix witness keywords with shared filler vocabulary, and
the parallel realization in the other language comes from a bijective token
lexicon. A "lossy" lexicon variant adds mistranslations of key words and
ambiguous entries so translate-then-train pipelines degrade the way real
out-of-domain MT does.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .bridge import TranslationLexicon
from .data import Corpus, JointLabel, LabelCatalog, LabeledExample

_SRC_SYLLABLES = ["ban", "cor", "del", "fim", "gos", "hul", "jek", "lom",
                  "nar", "pes", "rit", "sov", "tun", "vex", "wab"]
_TGT_SYLLABLES = ["alo", "bri", "cua", "den", "esp", "fua", "gel", "ino",
                  "jor", "lma", "nto", "oza", "pil", "que", "rva"]

_TN_POOL = ["complaint", "question", "request", "none"]
_SV_POOL = ["pay_bill", "billing_details", "activate", "add_service",
            "appointment", "change_address", "disconnect", "account",
            "tech_support", "upgrade", "cancel", "refund"]
_EN_POOL = ["none", "angry", "live_agent", "thank_you", "dont_know"]


def _make_word(rng: random.Random, syllables: list[str], used: set[str]) -> str:
    while True:
        word = "".join(rng.choice(syllables) for _ in range(rng.randint(2, 3)))
        if word not in used:
            used.add(word)
            return word


@dataclass
class SyntheticCorpus:
    source_train: Corpus
    target_train: Corpus
    target_test: Corpus
    lexicon_clean: TranslationLexicon  # src -> tgt bijection
    lexicon_lossy: TranslationLexicon  # src -> tgt with mistranslations/ambiguity
    lexicon_reverse_clean: TranslationLexicon  # tgt -> src bijection
    lexicon_reverse_lossy: TranslationLexicon
    catalog: LabelCatalog


def make_lossy(
    lexicon: TranslationLexicon,
    witnesses: list[str],
    fillers_tgt: list[str],
    seed: int,
    mistranslate_fraction: float = 0.25,
    ambiguity_fraction: float = 0.25,
) -> TranslationLexicon:
    """Derive a degraded lexicon: a fraction of witness keywords translate to
    a filler word (key-word mistranslation), and another fraction gain a
    second weighted target (ambiguity)."""
    rng = random.Random(seed)
    lossy = TranslationLexicon()
    for src, alts in lexicon.entries.items():
        for tgt, w in alts:
            lossy.add(src, tgt, w)
    shuffled = list(witnesses)
    rng.shuffle(shuffled)
    n_mis = int(len(shuffled) * mistranslate_fraction)
    n_amb = int(len(shuffled) * ambiguity_fraction)
    for src in shuffled[:n_mis]:
        lossy.entries[src] = [(rng.choice(fillers_tgt), 1.0)]
    for src in shuffled[n_mis : n_mis + n_amb]:
        lossy.entries[src] = lossy.entries[src] + [(rng.choice(fillers_tgt), 0.8)]
    return lossy


def generate(
    seed: int = 0,
    n_labels: int = 24,
    train_size: int = 2000,
    test_size: int = 500,
    n_fillers: int = 40,
    source_lang: str = "en",
    target_lang: str = "es",
) -> SyntheticCorpus:
    """Build parallel source/target corpora over n_labels joint labels.

    Deterministic under the seed. train_size applies to each language's
    training split; the test split is target-language only.
    """
    rng = random.Random(seed)

    combos = [(tn, sv, en) for tn in _TN_POOL for sv in _SV_POOL for en in _EN_POOL]
    if n_labels > len(combos):
        raise ValueError(f"at most {len(combos)} distinct joint labels available")
    labels = [JointLabel(*t) for t in rng.sample(combos, n_labels)]

    used_src: set[str] = set()
    used_tgt: set[str] = set()
    witnesses_src = [_make_word(rng, _SRC_SYLLABLES, used_src) for _ in labels]
    fillers_src = [_make_word(rng, _SRC_SYLLABLES, used_src) for _ in range(n_fillers)]
    vocab_src = witnesses_src + fillers_src
    vocab_tgt = [_make_word(rng, _TGT_SYLLABLES, used_tgt) for _ in vocab_src]

    clean = TranslationLexicon()
    reverse_clean = TranslationLexicon()
    for s, t in zip(vocab_src, vocab_tgt):
        clean.add(s, t)
        reverse_clean.add(t, s)
    src_to_tgt = dict(zip(vocab_src, vocab_tgt))

    def make_utterance(label_idx: int) -> tuple[str, str]:
        n_fill = rng.randint(2, 5)
        tokens = [rng.choice(fillers_src) for _ in range(n_fill)]
        tokens += [witnesses_src[label_idx]] * rng.choice([1, 1, 2])
        rng.shuffle(tokens)
        src_text = " ".join(tokens)
        tgt_text = " ".join(src_to_tgt[t] for t in tokens)
        return src_text, tgt_text

    def make_split(size: int, language: str, which: str, prefix: str) -> Corpus:
        out: Corpus = []
        for i in range(size):
            label_idx = i % n_labels
            src_text, tgt_text = make_utterance(label_idx)
            text = src_text if which == "src" else tgt_text
            out.append(
                LabeledExample(
                    id=f"{prefix}-{i:05d}",
                    language=language,
                    text=text,
                    label=labels[label_idx],
                )
            )
        rng.shuffle(out)
        return out

    source_train = make_split(train_size, source_lang, "src", "srctrain")
    target_train = make_split(train_size, target_lang, "tgt", "tgttrain")
    target_test = make_split(test_size, target_lang, "tgt", "tgttest")

    fillers_tgt = [src_to_tgt[f] for f in fillers_src]
    witnesses_tgt = [src_to_tgt[w] for w in witnesses_src]
    lossy = make_lossy(clean, witnesses_src, fillers_tgt, seed=seed + 1)
    reverse_lossy = make_lossy(reverse_clean, witnesses_tgt, fillers_src, seed=seed + 2)

    return SyntheticCorpus(
        source_train=source_train,
        target_train=target_train,
        target_test=target_test,
        lexicon_clean=clean,
        lexicon_lossy=lossy,
        lexicon_reverse_clean=reverse_clean,
        lexicon_reverse_lossy=reverse_lossy,
        catalog=LabelCatalog.from_labels(labels),
    )
