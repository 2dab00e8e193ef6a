"""Joint intent labels, label catalogs, and corpus file I/O.

A corpus file holds one JSON record per line with fields
``id, language, text, n_best (optional), tn, sv, en``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator


@dataclass(frozen=True, order=True)
class JointLabel:
    """The ``<task name, session variable, event name>`` triple used as one
    classification target. Equality and ordering are lexicographic over the
    three fields."""

    tn: str
    sv: str
    en: str

    def __post_init__(self) -> None:
        if not (self.tn and self.sv and self.en):
            raise ValueError(f"joint label fields must be non-empty: {self!r}")

    def as_tuple(self) -> tuple[str, str, str]:
        return (self.tn, self.sv, self.en)

    @classmethod
    def from_tuple(cls, t: Iterable[str]) -> "JointLabel":
        tn, sv, en = t
        return cls(tn, sv, en)

    def __str__(self) -> str:
        return f"{self.tn}/{self.sv}/{self.en}"


@dataclass
class LabelCatalog:
    """The declared label inventory: per-field token sets plus the set of
    observed joint labels."""

    tn_set: set[str] = field(default_factory=set)
    sv_set: set[str] = field(default_factory=set)
    en_set: set[str] = field(default_factory=set)
    joint_set: set[JointLabel] = field(default_factory=set)

    def add(self, label: JointLabel) -> None:
        self.tn_set.add(label.tn)
        self.sv_set.add(label.sv)
        self.en_set.add(label.en)
        self.joint_set.add(label)

    def __contains__(self, label: JointLabel) -> bool:
        return label in self.joint_set

    def counts(self) -> dict[str, int]:
        return {
            "tn": len(self.tn_set),
            "sv": len(self.sv_set),
            "en": len(self.en_set),
            "joint": len(self.joint_set),
        }

    @classmethod
    def from_labels(cls, labels: Iterable[JointLabel]) -> "LabelCatalog":
        cat = cls()
        for lab in labels:
            cat.add(lab)
        return cat

    def to_dict(self) -> dict:
        return {
            "tn": sorted(self.tn_set),
            "sv": sorted(self.sv_set),
            "en": sorted(self.en_set),
            "joint": [lab.as_tuple() for lab in sorted(self.joint_set)],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LabelCatalog":
        cat = cls(
            tn_set=set(d["tn"]),
            sv_set=set(d["sv"]),
            en_set=set(d["en"]),
        )
        cat.joint_set = {JointLabel.from_tuple(t) for t in d["joint"]}
        return cat

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "LabelCatalog":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


@dataclass
class LabeledExample:
    """One utterance (or its n-best hypothesis list) plus its joint label."""

    id: str
    language: str
    text: str
    label: JointLabel
    n_best: list[str] | None = None

    def to_record(self) -> dict:
        rec = {
            "id": self.id,
            "language": self.language,
            "text": self.text,
            "tn": self.label.tn,
            "sv": self.label.sv,
            "en": self.label.en,
        }
        if self.n_best is not None:
            rec["n_best"] = self.n_best
        return rec

    @classmethod
    def from_record(cls, rec: dict) -> "LabeledExample":
        return cls(
            id=str(rec["id"]),
            language=rec.get("language", ""),
            text=rec["text"],
            label=JointLabel(rec["tn"], rec["sv"], rec["en"]),
            n_best=rec.get("n_best"),
        )


Corpus = list[LabeledExample]


def read_corpus(path: str | Path) -> Corpus:
    out: Corpus = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                out.append(LabeledExample.from_record(json.loads(line)))
            except (json.JSONDecodeError, KeyError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: bad corpus record: {exc}") from exc
    return out


def write_corpus(corpus: Iterable[LabeledExample], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for ex in corpus:
            fh.write(json.dumps(ex.to_record(), ensure_ascii=False) + "\n")


def iter_labels(corpus: Iterable[LabeledExample]) -> Iterator[JointLabel]:
    for ex in corpus:
        yield ex.label
