"""Fixed-dimension encodings of feature sequences.

UBT: term frequencies of feature-literal uni-, bi- and tri-grams.
LPS: positional one-hot over (position, literal) pairs, a binary coding of
the literal sequence. Out-of-vocabulary keys are dropped at transform time.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .lexicon import FeatureClass, FeatureSequence

SPACE_FORMAT = "entsent.space"
SPACE_VERSION = 1
KINDS = ("UBT", "LPS")


@dataclass(frozen=True)
class SparseVector:
    indices: tuple[int, ...]
    values: tuple[float, ...]
    truncated: int = 0

    def __len__(self) -> int:
        return len(self.indices)

    def as_dict(self) -> dict[int, float]:
        return dict(zip(self.indices, self.values))


def ngrams(literals: Sequence[FeatureClass], orders: Iterable[int] = (1, 2, 3)) -> Counter:
    counts: Counter = Counter()
    for n in orders:
        for i in range(len(literals) - n + 1):
            counts[tuple(literals[i:i + n])] += 1
    return counts


class VectorSpace:
    """A frozen key -> column mapping for one representation kind."""

    def __init__(self, kind: str, keys: Sequence[Hashable], max_len: int | None = None):
        if kind not in KINDS:
            raise ValueError(f"unknown representation kind {kind!r}")
        if kind == "LPS" and (max_len is None or max_len < 1):
            raise ValueError("LPS space needs a positive max_len")
        self.kind = kind
        self.max_len = max_len if kind == "LPS" else None
        self.keys: tuple = tuple(keys)
        self.vocabulary: dict = {k: i for i, k in enumerate(self.keys)}
        if len(self.vocabulary) != len(self.keys):
            raise ValueError("duplicate vocabulary keys")

    @property
    def dimension(self) -> int:
        return len(self.keys)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, VectorSpace)
            and self.kind == other.kind
            and self.max_len == other.max_len
            and self.keys == other.keys
        )

    def __repr__(self) -> str:
        return f"VectorSpace(kind={self.kind!r}, dimension={self.dimension}, max_len={self.max_len})"

    def to_json(self) -> dict:
        if self.kind == "UBT":
            vocab = [[c.value for c in k] for k in self.keys]
        else:
            vocab = [[pos, c.value] for pos, c in self.keys]
        return {
            "format": SPACE_FORMAT,
            "version": SPACE_VERSION,
            "kind": self.kind,
            "max_len": self.max_len,
            "vocabulary": vocab,
        }

    @classmethod
    def from_json(cls, obj: dict) -> VectorSpace:
        if obj.get("format") != SPACE_FORMAT:
            raise ValueError("not a vector space document")
        if obj.get("version") != SPACE_VERSION:
            raise ValueError(f"unsupported vector space version {obj.get('version')!r}")
        kind = obj["kind"]
        if kind == "UBT":
            keys = [tuple(FeatureClass(c) for c in k) for k in obj["vocabulary"]]
        else:
            keys = [(int(pos), FeatureClass(c)) for pos, c in obj["vocabulary"]]
        return cls(kind, keys, obj.get("max_len"))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    def transform(self, seq: FeatureSequence | Sequence[FeatureClass]) -> SparseVector:
        return transform(self, seq)

    def matrix(self, seqs: Sequence[FeatureSequence]) -> sp.csr_matrix:
        return to_matrix(self, [transform(self, s) for s in seqs])


def _literals(seq) -> tuple[FeatureClass, ...]:
    return seq.literals if isinstance(seq, FeatureSequence) else tuple(seq)


def fit_space(kind: str, corpus: Sequence[FeatureSequence]) -> VectorSpace:
    """Collect the vocabulary observed in ``corpus``.

    Keys are ordered by first occurrence so a fixed corpus order gives fixed
    column indices.
    """
    if not corpus:
        raise ValueError("cannot fit a vector space on an empty corpus")
    seen: dict = {}
    if kind == "UBT":
        for seq in corpus:
            lits = _literals(seq)
            for n in (1, 2, 3):
                for i in range(len(lits) - n + 1):
                    seen.setdefault(tuple(lits[i:i + n]), None)
        return VectorSpace("UBT", list(seen))
    if kind == "LPS":
        max_len = max(len(_literals(s)) for s in corpus)
        for seq in corpus:
            for pos, lit in enumerate(_literals(seq)):
                seen.setdefault((pos, lit), None)
        return VectorSpace("LPS", list(seen), max(max_len, 1))
    raise ValueError(f"unknown representation kind {kind!r}")


def sequence_keys(kind: str, seq: FeatureSequence | Sequence[FeatureClass]) -> Counter:
    """Raw key counts for one sequence, before vocabulary lookup."""
    lits = _literals(seq)
    if kind == "UBT":
        return ngrams(lits)
    return Counter((pos, lit) for pos, lit in enumerate(lits))


def transform(space: VectorSpace, seq: FeatureSequence | Sequence[FeatureClass]) -> SparseVector:
    return transform_keys(space, sequence_keys(space.kind, seq))


def transform_keys(space: VectorSpace, keys: Counter) -> SparseVector:
    vocab = space.vocabulary
    truncated = 0
    if space.kind == "UBT":
        pairs = {vocab[k]: float(c) for k, c in keys.items() if k in vocab}
    else:
        pairs = {}
        for key in keys:
            if key[0] >= space.max_len:
                truncated += 1
                continue
            idx = vocab.get(key)
            if idx is not None:
                pairs[idx] = 1.0
    idx = sorted(pairs)
    return SparseVector(tuple(idx), tuple(pairs[i] for i in idx), truncated)


def to_matrix(space: VectorSpace, vectors: Sequence[SparseVector]) -> sp.csr_matrix:
    indptr = np.zeros(len(vectors) + 1, dtype=np.int64)
    for i, v in enumerate(vectors):
        indptr[i + 1] = indptr[i] + len(v)
    indices = np.fromiter((j for v in vectors for j in v.indices), dtype=np.int64, count=int(indptr[-1]))
    data = np.fromiter((x for v in vectors for x in v.values), dtype=np.float64, count=int(indptr[-1]))
    return sp.csr_matrix((data, indices, indptr), shape=(len(vectors), space.dimension))
