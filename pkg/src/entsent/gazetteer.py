"""Phrase-dictionary entity recognition for short financial headlines.

Recognition runs on the raw headline, before any normalization, so spans
are character offsets into the original text. Each headline is then
expanded into one instance per recognized entity, with the entity in focus
replaced by ``TARGET`` and every co-occurring entity by ``OTHER``.
"""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import BinaryIO, Iterable, Mapping, Sequence

TARGET = "TARGET"
OTHER = "OTHER"
LABELS = ("positive", "negative", "neutral")

_ASCII_FOLD = str.maketrans("ABCDEFGHIJKLMNOPQRSTUVWXYZ", "abcdefghijklmnopqrstuvwxyz")


class EntityDBError(ValueError):
    """Raised for malformed or inconsistent entity databases."""


def fold(text: str) -> str:
    """ASCII case folding. Length-preserving, so offsets survive."""
    return text.translate(_ASCII_FOLD)


@dataclass(frozen=True)
class EntityRecord:
    symbol: str
    official_name: str | None
    phrases: tuple[str, ...]


@dataclass(frozen=True)
class EntityMention:
    symbol: str
    span_start: int
    span_end: int
    matched_phrase: str

    @property
    def length(self) -> int:
        return self.span_end - self.span_start


@dataclass(frozen=True)
class AnnotatedInstance:
    headline_id: str
    target_symbol: str
    tokens: tuple[str, ...]
    gold_label: str | None = None
    other_symbols: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "headline_id": self.headline_id,
            "target_symbol": self.target_symbol,
            "other_symbols": list(self.other_symbols),
            "tokens": list(self.tokens),
            "gold_label": self.gold_label,
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> AnnotatedInstance:
        label = obj.get("gold_label")
        if label is not None and label not in LABELS:
            raise ValueError(f"unknown label {label!r}")
        return cls(
            headline_id=str(obj["headline_id"]),
            target_symbol=str(obj["target_symbol"]),
            tokens=tuple(obj["tokens"]),
            gold_label=label,
            other_symbols=tuple(obj.get("other_symbols", ())),
        )


@dataclass
class _Node:
    children: dict[str, _Node] = field(default_factory=dict)
    # (symbol, phrase) when a phrase terminates here
    terminal: tuple[str, str] | None = None


class EntityDatabase:
    """Immutable symbol -> phrases store with a character trie for matching."""

    def __init__(self, records: Iterable[EntityRecord] = ()):
        self._records: dict[str, EntityRecord] = {}
        self._owner: dict[str, str] = {}
        self._root = _Node()
        for rec in records:
            self._add(rec)

    def _add(self, rec: EntityRecord) -> None:
        if rec.symbol in self._records:
            raise EntityDBError(f"duplicate symbol {rec.symbol!r}")
        if not rec.phrases:
            raise EntityDBError(f"{rec.symbol}: no matchable phrases")
        for phrase in rec.phrases:
            key = fold(phrase)
            owner = self._owner.get(key)
            if owner is not None and owner != rec.symbol:
                raise EntityDBError(
                    f"phrase {phrase!r} is mapped to both {owner!r} and {rec.symbol!r}"
                )
            self._owner[key] = rec.symbol
            node = self._root
            for ch in key:
                node = node.children.setdefault(ch, _Node())
            node.terminal = (rec.symbol, phrase)
        self._records[rec.symbol] = rec

    def __len__(self) -> int:
        return len(self._records)

    def __contains__(self, symbol: object) -> bool:
        return symbol in self._records

    def __iter__(self):
        return iter(self._records.values())

    def __getitem__(self, symbol: str) -> EntityRecord:
        return self._records[symbol]

    @property
    def phrase_count(self) -> int:
        return len(self._owner)

    def symbol_for_phrase(self, phrase: str) -> str | None:
        return self._owner.get(fold(phrase.strip()))

    def resolve(self, key: str) -> str | None:
        """Map a symbol or any listed phrase to its symbol."""
        if key in self._records:
            return key
        return self.symbol_for_phrase(key)

    def fingerprint(self) -> list[list[str]]:
        return sorted([k, v] for k, v in self._owner.items())


def _make_record(symbol: str, official_name: str | None, forms: Sequence[str]) -> EntityRecord:
    symbol = symbol.strip()
    if not symbol:
        raise EntityDBError("empty symbol")
    raw = ([official_name] if official_name is not None else []) + list(forms)
    phrases: list[str] = []
    seen: set[str] = set()
    for p in raw:
        if not isinstance(p, str):
            raise EntityDBError(f"{symbol}: phrase {p!r} is not a string")
        p = p.strip()
        if not p:
            raise EntityDBError(f"{symbol}: empty phrase")
        if fold(p) not in seen:
            seen.add(fold(p))
            phrases.append(p)
    return EntityRecord(symbol, official_name.strip() if official_name else None, tuple(phrases))


def load_entity_db(source: BinaryIO, *, fmt: str = "json", name: str = "<stream>") -> EntityDatabase:
    """Load an entity database from a byte stream.

    ``fmt="json"`` expects ``{symbol: {"official_name": str|null,
    "other_forms": [str, ...]}}``; ``fmt="csv"`` expects a ``symbol,phrase``
    header followed by one phrase per row.
    """
    text = source.read().decode("utf-8-sig")
    if fmt == "csv":
        return _load_csv(text, name)
    if fmt != "json":
        raise ValueError(f"unknown entity db format {fmt!r}")
    try:
        doc = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise EntityDBError(f"{name}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise EntityDBError(f"{name}: top level must be an object keyed by symbol")
    records = []
    for symbol, entry in doc.items():
        if not isinstance(entry, dict):
            raise EntityDBError(f"{name}: entry for {symbol!r} must be an object")
        forms = entry.get("other_forms", [])
        if not isinstance(forms, list):
            raise EntityDBError(f"{name}: {symbol}.other_forms must be a list")
        records.append(_make_record(symbol, entry.get("official_name"), forms))
    return EntityDatabase(records)


def _load_csv(text: str, name: str) -> EntityDatabase:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None:
        return EntityDatabase()
    if [h.strip().lower() for h in header[:2]] != ["symbol", "phrase"]:
        raise EntityDBError(f"{name}:1: expected header 'symbol,phrase'")
    grouped: dict[str, list[str]] = {}
    for lineno, row in enumerate(reader, start=2):
        if not row or not any(c.strip() for c in row):
            continue
        if len(row) < 2:
            raise EntityDBError(f"{name}:{lineno}: expected two columns")
        grouped.setdefault(row[0].strip(), []).append(row[1])
    return EntityDatabase(_make_record(s, None, forms) for s, forms in grouped.items())


def read_entity_db(path: str | Path) -> EntityDatabase:
    path = Path(path)
    fmt = "csv" if path.suffix.lower() == ".csv" else "json"
    with path.open("rb") as fh:
        return load_entity_db(fh, fmt=fmt, name=str(path))


def _boundary(text: str, pos: int) -> bool:
    # no boundary only when both neighbours are alphanumeric
    if pos <= 0 or pos >= len(text):
        return True
    return not (text[pos - 1].isalnum() and text[pos].isalnum())


def recognize(db: EntityDatabase, headline: str) -> list[EntityMention]:
    """Find all entity mentions in a raw headline.

    Candidates are whole-word, case-insensitive phrase matches. Overlaps are
    resolved longest first, then by earlier start. Result is in span order.
    """
    folded = fold(headline)
    n = len(folded)
    candidates: list[EntityMention] = []
    for start in range(n):
        if not _boundary(headline, start):
            continue
        node = db._root
        pos = start
        while pos < n:
            node = node.children.get(folded[pos])
            if node is None:
                break
            pos += 1
            if node.terminal is not None and _boundary(headline, pos):
                symbol, phrase = node.terminal
                candidates.append(EntityMention(symbol, start, pos, phrase))

    candidates.sort(key=lambda m: (-m.length, m.span_start))
    taken: list[EntityMention] = []
    for cand in candidates:
        if all(cand.span_end <= t.span_start or cand.span_start >= t.span_end for t in taken):
            taken.append(cand)
    return sorted(taken, key=lambda m: m.span_start)


_DIGIT_COMMA = re.compile(r"(?<=\d),(?=\d)")
# any non-word character or underscore, except a point between two digits
_SEPARATOR = re.compile(r"(?:[^\w.]|_|(?<!\d)\.|\.(?!\d))+")


def normalize_tokens(text: str) -> list[str]:
    """Lowercase, drop punctuation and special characters, split on whitespace.

    Decimal points inside numbers survive and digit-grouping commas are
    removed, so ``"1,200.5"`` becomes ``"1200.5"``.
    """
    text = _DIGIT_COMMA.sub("", text.lower())
    return _SEPARATOR.sub(" ", text).split()


def expand_instances(
    headline: str,
    mentions: Sequence[EntityMention],
    headline_id: str = "",
    labels: Mapping[str, str] | None = None,
) -> list[AnnotatedInstance]:
    """One instance per distinct mentioned symbol, in first-mention order.

    Every mention of the focus symbol becomes ``TARGET``; mentions of all
    other symbols become ``OTHER``.
    """
    mentions = sorted(mentions, key=lambda m: m.span_start)
    order: list[str] = []
    for m in mentions:
        if m.symbol not in order:
            order.append(m.symbol)

    instances = []
    for focus in order:
        tokens: list[str] = []
        cursor = 0
        for m in mentions:
            tokens.extend(normalize_tokens(headline[cursor:m.span_start]))
            tokens.append(TARGET if m.symbol == focus else OTHER)
            cursor = m.span_end
        tokens.extend(normalize_tokens(headline[cursor:]))
        label = labels.get(focus) if labels else None
        instances.append(
            AnnotatedInstance(
                headline_id=headline_id,
                target_symbol=focus,
                tokens=tuple(tokens),
                gold_label=label,
                other_symbols=tuple(s for s in order if s != focus),
            )
        )
    return instances
