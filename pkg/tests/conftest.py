import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from intentgate.data import JointLabel, LabeledExample


def make_separable_corpus(n_labels=10, size=500, n_fillers=20, seed=1, language="en"):
    """Corpus where each label has a unique witness token mixed with shared
    fillers; linearly separable by construction."""
    rng = random.Random(seed)
    labels = [JointLabel(f"t{i}", f"s{i}", f"e{i}") for i in range(n_labels)]
    fillers = [f"f{j}" for j in range(n_fillers)]
    corpus = []
    for i in range(size):
        li = i % n_labels
        toks = [rng.choice(fillers) for _ in range(4)] + [f"w{li}"]
        rng.shuffle(toks)
        corpus.append(LabeledExample(str(i), language, " ".join(toks), labels[li]))
    return corpus


@pytest.fixture
def separable_corpus():
    return make_separable_corpus()
