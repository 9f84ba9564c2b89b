"""Linear multiclass models on sparse feature vectors and the split evaluation protocol.

Two learners share one parameterisation (a 3 x d weight matrix and a bias
vector): multinomial logistic regression (``softmax``) and one-vs-rest
squared-hinge linear SVM (``hinge``). Both are fit by seeded mini-batch
gradient descent with an L2 penalty on the weights.
"""

from __future__ import annotations

import json
import statistics
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .gazetteer import LABELS, AnnotatedInstance
from .lexicon import FeatureSequence, MergedLexicon, annotate
from .representations import SparseVector, VectorSpace, fit_space, sequence_keys, to_matrix, transform_keys

CLASSES = LABELS  # (positive, negative, neutral)
LOSS_KINDS = ("softmax", "hinge")
MODEL_FORMAT = "entsent.model"
MODEL_VERSION = 1
# above this many cells the design matrix stays sparse during training
_DENSE_LIMIT = 8_000_000


@dataclass(frozen=True)
class TrainConfig:
    loss_kind: str = "hinge"
    learning_rate: float = 0.1
    epochs: int = 20
    l2: float = 1e-4
    batch_size: int = 64
    seed: int = 0

    def __post_init__(self):
        if self.loss_kind not in LOSS_KINDS:
            raise ValueError(f"loss_kind must be one of {LOSS_KINDS}")


@dataclass
class LinearModel:
    weights: np.ndarray  # (3, dimension)
    bias: np.ndarray  # (3,)
    space: VectorSpace
    loss_kind: str
    classes: tuple[str, ...] = CLASSES
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        self.bias = np.asarray(self.bias, dtype=np.float64)
        if self.weights.shape != (len(self.classes), self.space.dimension):
            raise ValueError(
                f"weight shape {self.weights.shape} does not match "
                f"({len(self.classes)}, {self.space.dimension})"
            )
        if not (np.all(np.isfinite(self.weights)) and np.all(np.isfinite(self.bias))):
            raise ValueError("model parameters must be finite")

    def scores(self, X) -> np.ndarray:
        return _scores(self.weights, self.bias, X, self.loss_kind)

    def to_json(self) -> dict:
        return {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "loss_kind": self.loss_kind,
            "classes": list(self.classes),
            "bias": self.bias.tolist(),
            "weights": self.weights.tolist(),
            "space": self.space.to_json(),
            "meta": self.meta,
        }

    @classmethod
    def from_json(cls, obj: dict) -> LinearModel:
        if obj.get("format") != MODEL_FORMAT or obj.get("version") != MODEL_VERSION:
            raise ValueError("not a supported model document")
        return cls(
            weights=np.array(obj["weights"], dtype=np.float64).reshape(len(obj["classes"]), -1),
            bias=np.array(obj["bias"], dtype=np.float64),
            space=VectorSpace.from_json(obj["space"]),
            loss_kind=obj["loss_kind"],
            classes=tuple(obj["classes"]),
            meta=obj.get("meta", {}),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=1)


def _softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def _scores(W, b, X, loss_kind) -> np.ndarray:
    z = np.asarray(X @ W.T) + b
    return _softmax(z) if loss_kind == "softmax" else z


def loss_and_grad(W, b, X, y, loss_kind: str, l2: float):
    """Mean batch loss plus ``l2/2 * ||W||^2`` and its gradient w.r.t. (W, b).

    ``y`` holds class indices. The bias is not penalised.
    """
    n = X.shape[0]
    z = np.asarray(X @ W.T) + b
    if loss_kind == "softmax":
        p = _softmax(z)
        logp = z - z.max(axis=1, keepdims=True)
        logp = logp - np.log(np.exp(logp).sum(axis=1, keepdims=True))
        loss = -logp[np.arange(n), y].mean()
        g = p
        g[np.arange(n), y] -= 1.0
    elif loss_kind == "hinge":
        sign = -np.ones_like(z)
        sign[np.arange(n), y] = 1.0
        slack = np.maximum(0.0, 1.0 - sign * z)
        loss = (slack ** 2).sum() / n
        g = -2.0 * slack * sign
    else:
        raise ValueError(f"unknown loss kind {loss_kind!r}")
    g = g / n
    gW = np.asarray(X.T @ g).T + l2 * W
    gb = g.sum(axis=0)
    return loss + 0.5 * l2 * float(np.sum(W * W)), gW, gb


def _label_index(labels: Sequence[str]) -> np.ndarray:
    try:
        return np.array([CLASSES.index(lab) for lab in labels], dtype=np.int64)
    except ValueError as exc:
        raise ValueError(f"labels must be drawn from {CLASSES}") from exc


def train(space: VectorSpace, data: Sequence[tuple[SparseVector, str]], config: TrainConfig | None = None,
          *, history: list | None = None) -> LinearModel:
    """Fit a linear model by seeded mini-batch gradient descent.

    ``history``, if given, receives the full-data objective after each epoch.
    """
    config = config or TrainConfig()
    if not data:
        raise ValueError("cannot train on empty data")
    X = to_matrix(space, [v for v, _ in data])
    y = _label_index([lab for _, lab in data])
    if len(np.unique(y)) < 2:
        raise ValueError("training data contains a single class")
    return _fit(space, X, y, config, history)


def _fit(space, X, y, config: TrainConfig, history=None) -> LinearModel:
    rng = np.random.default_rng(config.seed)
    k, d = len(CLASSES), space.dimension
    W = np.zeros((k, d))
    b = np.zeros(k)
    n = X.shape[0]
    bs = max(1, min(config.batch_size, n))
    Xfit = X.toarray() if sp.issparse(X) and n * d <= _DENSE_LIMIT else X
    for _ in range(config.epochs):
        order = rng.permutation(n)
        Xe, ye = Xfit[order], y[order]
        for start in range(0, n, bs):
            _, gW, gb = loss_and_grad(
                W, b, Xe[start:start + bs], ye[start:start + bs], config.loss_kind, config.l2
            )
            W -= config.learning_rate * gW
            b -= config.learning_rate * gb
        if history is not None:
            history.append(loss_and_grad(W, b, X, y, config.loss_kind, config.l2)[0])
    meta = {
        "learning_rate": config.learning_rate,
        "epochs": config.epochs,
        "l2": config.l2,
        "batch_size": config.batch_size,
        "seed": config.seed,
    }
    return LinearModel(W, b, space, config.loss_kind, CLASSES, meta)


def predict(model: LinearModel, vec: SparseVector) -> tuple[str, np.ndarray]:
    """Return ``(label, scores)``; ties go to the earlier class."""
    if vec.indices and max(vec.indices) >= model.space.dimension:
        raise ValueError("vector does not belong to the model's space")
    x = np.zeros(model.space.dimension)
    x[list(vec.indices)] = vec.values
    s = model.scores(x[None, :])[0]
    return model.classes[int(np.argmax(s))], s


def predict_many(model: LinearModel, X) -> np.ndarray:
    return np.argmax(model.scores(X), axis=1)


def binary_metrics(y_true: np.ndarray, y_pred: np.ndarray, cls: int) -> tuple[float, float]:
    """One-vs-rest accuracy and F1 for class index ``cls``. F1 is 0 when P+R is 0."""
    t = y_true == cls
    p = y_pred == cls
    tp = int(np.sum(t & p))
    acc = float(np.mean(t == p)) if len(t) else 0.0
    precision = tp / int(p.sum()) if p.any() else 0.0
    recall = tp / int(t.sum()) if t.any() else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return acc, f1


@dataclass
class EvalReport:
    loss_kind: str
    repr_kind: str
    splits: int
    seed: int
    # one row per (split, class): accuracy and one-vs-rest F1
    rows: list[dict] = field(default_factory=list)
    # one row per split: multiclass accuracy and macro F1
    overall: list[dict] = field(default_factory=list)

    def metric(self, cls: str, name: str) -> list[float]:
        return [r[name] for r in self.rows if r["class"] == cls]

    def summary(self) -> dict:
        out: dict = {
            "representation": self.repr_kind,
            "loss_kind": self.loss_kind,
            "splits": self.splits,
            "seed": self.seed,
            "classes": {},
        }
        for cls in CLASSES:
            out["classes"][cls] = {
                name: _aggregate(self.metric(cls, name)) for name in ("accuracy", "f1")
            }
        out["overall"] = {
            name: _aggregate([r[name] for r in self.overall]) for name in ("accuracy", "macro_f1")
        }
        return out


def _aggregate(values: list[float]) -> dict:
    return {
        "median": float(statistics.median(values)),
        "mean": float(statistics.fmean(values)),
        # sample standard deviation across splits
        "sd": float(statistics.stdev(values)) if len(values) > 1 else 0.0,
    }


def split_rng(seed: int, split: int) -> np.random.Generator:
    """Generator for split ``split`` of a run seeded with ``seed``.

    Each split draws from its own stream keyed by ``(seed, split)``, so any
    single split can be re-run in isolation.
    """
    return np.random.default_rng([seed, split])


def evaluate_protocol(
    corpus: Sequence[AnnotatedInstance | FeatureSequence],
    repr_kind: str = "UBT",
    loss_kind: str = "hinge",
    *,
    lexicon: MergedLexicon | None = None,
    splits: int = 31,
    train_frac: float = 0.8,
    seed: int = 0,
    config: TrainConfig | None = None,
) -> EvalReport:
    """Repeated random train/test evaluation.

    For each split the corpus is shuffled independently, the first
    ``train_frac`` share becomes the training set, the vector space is fit on
    training data only, and per-class one-vs-rest accuracy and F1 are scored
    on the held-out part.
    """
    if splits < 1:
        raise ValueError("splits must be >= 1")
    if len(corpus) < 10:
        raise ValueError("corpus needs at least 10 labelled instances")
    seqs = [_as_sequence(item, lexicon) for item in corpus]
    if any(s.label is None for s in seqs):
        raise ValueError("every instance needs a gold label")
    labels = _label_index([s.label for s in seqs])
    keys = [sequence_keys(repr_kind, s) for s in seqs]
    base = config or TrainConfig(loss_kind=loss_kind)
    n = len(seqs)
    n_train = min(max(int(round(train_frac * n)), 1), n - 1)

    report = EvalReport(loss_kind, repr_kind, splits, seed)
    for split in range(splits):
        rng = split_rng(seed, split)
        perm = rng.permutation(n)
        tr, te = perm[:n_train], perm[n_train:]
        space = fit_space(repr_kind, [seqs[i] for i in tr])
        Xtr = to_matrix(space, [transform_keys(space, keys[i]) for i in tr])
        Xte = to_matrix(space, [transform_keys(space, keys[i]) for i in te])
        cfg = TrainConfig(
            loss_kind=loss_kind,
            learning_rate=base.learning_rate,
            epochs=base.epochs,
            l2=base.l2,
            batch_size=base.batch_size,
            seed=int(rng.integers(2**31)),
        )
        if len(np.unique(labels[tr])) < 2:
            raise ValueError(f"split {split}: training partition has a single class")
        model = _fit(space, Xtr, labels[tr], cfg)
        pred = predict_many(model, Xte)
        f1s = []
        for ci, cls in enumerate(CLASSES):
            acc, f1 = binary_metrics(labels[te], pred, ci)
            f1s.append(f1)
            report.rows.append({"split": split, "class": cls, "accuracy": acc, "f1": f1})
        report.overall.append(
            {"split": split, "accuracy": float(np.mean(pred == labels[te])), "macro_f1": float(np.mean(f1s))}
        )
    return report


def _as_sequence(item, lexicon) -> FeatureSequence:
    if isinstance(item, FeatureSequence):
        return item
    if lexicon is None:
        raise ValueError("a lexicon is required to annotate raw instances")
    return annotate(lexicon, item)


def train_on_instances(
    instances: Sequence[AnnotatedInstance | FeatureSequence],
    repr_kind: str,
    config: TrainConfig,
    lexicon: MergedLexicon | None = None,
) -> LinearModel:
    seqs = [_as_sequence(x, lexicon) for x in instances]
    if not seqs:
        raise ValueError("no training instances")
    if any(s.label is None for s in seqs):
        raise ValueError("every training instance needs a gold label")
    space = fit_space(repr_kind, seqs)
    return train(space, [(space.transform(s), s.label) for s in seqs], config)

