"""Word-level financial lexicon: merging source dictionaries and annotating tokens."""

from __future__ import annotations

import csv
import enum
import hashlib
import io
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence, TextIO

from .gazetteer import OTHER, TARGET, AnnotatedInstance

log = logging.getLogger(__name__)


class FeatureClass(str, enum.Enum):
    Positive = "Positive"
    Neutral = "Neutral"
    Negative = "Negative"
    Up = "Up"
    Down = "Down"
    PositiveIfUp = "PositiveIfUp"
    NegativeIfUp = "NegativeIfUp"
    Negator = "Negator"
    Number = "Number"
    Target = "Target"
    Other = "Other"
    Plain = "Plain"

    def __str__(self) -> str:
        return self.value


LEXICAL_CLASSES = tuple(FeatureClass)[:8]
STRUCTURAL_CLASSES = (FeatureClass.Number, FeatureClass.Target, FeatureClass.Other, FeatureClass.Plain)

SOURCES = ("CUSTOM", "LM", "MPQA", "GI", "MALO")

# lower rank wins
_SOURCE_RANK = {"CUSTOM": 0, "LM": 1, "MPQA": 2, "GI": 2, "MALO": 2}
_CLASS_RANK = {
    FeatureClass.PositiveIfUp: 0,
    FeatureClass.NegativeIfUp: 0,
    FeatureClass.Up: 1,
    FeatureClass.Down: 1,
    FeatureClass.Negator: 2,
    FeatureClass.Positive: 3,
    FeatureClass.Negative: 3,
    FeatureClass.Neutral: 3,
}


class LexiconError(ValueError):
    pass


@dataclass(frozen=True)
class LexiconEntry:
    word: str
    feature: FeatureClass
    source: str

    def __post_init__(self):
        word = self.word.strip().lower()
        if not word:
            raise LexiconError("empty lexicon word")
        object.__setattr__(self, "word", word)
        feature = FeatureClass(self.feature)
        if feature in STRUCTURAL_CLASSES:
            raise LexiconError(f"{word!r}: {feature.value} is a structural class, not a lexicon class")
        object.__setattr__(self, "feature", feature)
        source = self.source.strip().upper()
        if source not in _SOURCE_RANK:
            raise LexiconError(f"{word!r}: unknown source {self.source!r}")
        object.__setattr__(self, "source", source)


@dataclass(frozen=True)
class MergedLexicon:
    classes: Mapping[str, FeatureClass] = field(default_factory=dict)
    provenance: Mapping[str, str] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.classes)

    def get(self, word: str) -> FeatureClass | None:
        return self.classes.get(word)

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        for word in sorted(self.classes):
            h.update(f"{word}\t{self.classes[word].value}\n".encode())
        return h.hexdigest()[:16]


def merge_dictionaries(entries: Iterable[LexiconEntry]) -> MergedLexicon:
    """Resolve overlapping entries into one class per word.

    Source precedence comes first (CUSTOM > LM > MPQA/GI/MALO), then class
    precedence (direction-dependent > directional > negator > prior
    polarity). Anything still tied keeps the earliest entry and logs a
    warning.
    """
    best: dict[str, tuple[tuple[int, int], LexiconEntry]] = {}
    for entry in entries:
        if not isinstance(entry, LexiconEntry):
            raise LexiconError(f"not a LexiconEntry: {entry!r}")
        key = (_SOURCE_RANK[entry.source], _CLASS_RANK[entry.feature])
        current = best.get(entry.word)
        if current is None or key < current[0]:
            best[entry.word] = (key, entry)
        elif key == current[0] and entry.feature != current[1].feature:
            log.warning(
                "unresolved tie for %r: keeping %s/%s over %s/%s",
                entry.word,
                current[1].feature.value,
                current[1].source,
                entry.feature.value,
                entry.source,
            )
    return MergedLexicon(
        classes={w: e.feature for w, (_, e) in best.items()},
        provenance={w: e.source for w, (_, e) in best.items()},
    )


def load_lexicon_entries(stream: TextIO, *, name: str = "<stream>") -> list[LexiconEntry]:
    """Read ``word<TAB>feature<TAB>source`` rows; the header row is required."""
    reader = csv.reader(stream, delimiter="\t")
    header = next(reader, None)
    if header is None:
        return []
    if [h.strip().lower() for h in header[:3]] != ["word", "feature", "source"]:
        raise LexiconError(f"{name}:1: expected header 'word<TAB>feature<TAB>source'")
    entries = []
    for lineno, row in enumerate(reader, start=2):
        if not row or not any(c.strip() for c in row):
            continue
        if len(row) < 3:
            raise LexiconError(f"{name}:{lineno}: expected 3 tab-separated columns")
        word, feature, source = (c.strip() for c in row[:3])
        try:
            feature_cls = FeatureClass(feature)
        except ValueError:
            raise LexiconError(f"{name}:{lineno}: unknown feature {feature!r}") from None
        try:
            entries.append(LexiconEntry(word, feature_cls, source))
        except LexiconError as exc:
            raise LexiconError(f"{name}:{lineno}: {exc}") from None
    return entries


def read_lexicon(paths: str | Path | Sequence[str | Path]) -> MergedLexicon:
    if isinstance(paths, (str, Path)):
        paths = [paths]
    entries: list[LexiconEntry] = []
    for p in paths:
        with open(p, encoding="utf-8-sig", newline="") as fh:
            entries.extend(load_lexicon_entries(fh, name=str(p)))
    return merge_dictionaries(entries)


def parse_lexicon(text: str) -> MergedLexicon:
    return merge_dictionaries(load_lexicon_entries(io.StringIO(text)))


NUMBER_RE = re.compile(r"^(?:\d{1,3}(?:,\d{3})+|\d+)(?:\.\d+)?$")


@dataclass(frozen=True)
class FeatureSequence:
    literals: tuple[FeatureClass, ...]
    surface: tuple[str, ...]
    label: str | None = None

    def __post_init__(self):
        if len(self.literals) != len(self.surface):
            raise ValueError("literals and surface must have equal length")

    def __len__(self) -> int:
        return len(self.literals)

    @classmethod
    def of(cls, literals: Iterable[FeatureClass | str], label: str | None = None) -> FeatureSequence:
        lits = tuple(FeatureClass(x) for x in literals)
        return cls(lits, tuple(x.value for x in lits), label)


def annotate_token(lex: MergedLexicon, token: str) -> FeatureClass:
    if token == TARGET:
        return FeatureClass.Target
    if token == OTHER:
        return FeatureClass.Other
    if NUMBER_RE.match(token):
        return FeatureClass.Number
    return lex.classes.get(token, FeatureClass.Plain)


def annotate(lex: MergedLexicon, instance: AnnotatedInstance | Sequence[str]) -> FeatureSequence:
    """Map each token to its feature literal. No stemming, no stop-word removal."""
    if isinstance(instance, AnnotatedInstance):
        tokens, label = instance.tokens, instance.gold_label
    else:
        tokens, label = tuple(instance), None
    return FeatureSequence(tuple(annotate_token(lex, t) for t in tokens), tuple(tokens), label)


def lexicon_stats(lex: MergedLexicon) -> dict[str, int]:
    counts = {c.value: 0 for c in LEXICAL_CLASSES}
    for cls in lex.classes.values():
        counts[cls.value] += 1
    counts["total"] = len(lex.classes)
    return counts
