"""Seeded synthetic data: feature corpora, planted-signal series, and demo fixtures."""

from __future__ import annotations

import csv
import json
import math
from datetime import date, datetime, time, timedelta
from pathlib import Path

import numpy as np

from .gazetteer import LABELS
from .lexicon import FeatureClass, FeatureSequence

_FILLER = [
    FeatureClass.Plain,
    FeatureClass.Neutral,
    FeatureClass.Number,
    FeatureClass.Other,
    FeatureClass.Negator,
    FeatureClass.Positive,
    FeatureClass.Negative,
    FeatureClass.PositiveIfUp,
    FeatureClass.NegativeIfUp,
]


def bigram_rule_corpus(n: int = 3000, flip: float = 0.1, seed: int = 0) -> list[FeatureSequence]:
    """Label is a function of two planted bigrams, then flipped with probability ``flip``.

    ``(Target, Up)`` -> positive, ``(Target, Down)`` -> negative, neither ->
    neutral. Filler never contains Target, Up or Down, so the planted bigram
    is the only source of signal.
    """
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        kind = int(rng.integers(3))
        length = int(rng.integers(4, 12))
        lits = [_FILLER[j] for j in rng.integers(len(_FILLER), size=length)]
        pos = int(rng.integers(length - 1))
        if kind == 0:
            lits[pos:pos + 2] = [FeatureClass.Target, FeatureClass.Up]
        elif kind == 1:
            lits[pos:pos + 2] = [FeatureClass.Target, FeatureClass.Down]
        else:
            lits[pos] = FeatureClass.Target
        label = LABELS[kind]
        if rng.random() < flip:
            label = LABELS[(kind + int(rng.integers(1, 3))) % 3]
        out.append(FeatureSequence.of(lits, label))
    return out


def random_label_corpus(n: int = 3000, seed: int = 0) -> list[FeatureSequence]:
    rng = np.random.default_rng(seed)
    classes = list(FeatureClass)
    out = []
    for _ in range(n):
        length = int(rng.integers(3, 12))
        lits = [classes[j] for j in rng.integers(len(classes), size=length)]
        out.append(FeatureSequence.of(lits, LABELS[int(rng.integers(3))]))
    return out


def planted_lag_series(n: int = 250, lag: int = 2, beta: float = 0.1, noise: float = 0.01, seed: int = 0):
    """``d(t) = beta * s(t - lag) + N(0, noise^2)`` with ``s`` uniform on [-1, 1]."""
    rng = np.random.default_rng(seed)
    s = rng.uniform(-1, 1, size=n + lag)
    d = beta * s[:-lag] + rng.normal(0.0, noise, size=n) if lag else beta * s + rng.normal(0.0, noise, size=n)
    return d, s[lag:]


# Demo fixtures --------------------------------------------------------------

DEMO_ENTITIES = {
    "SBIN": {"official_name": "State Bank of India Ltd.", "other_forms": ["State Bank", "SBI", "State Bank of India"]},
    "TATASTEEL": {"official_name": "Tata Steel Ltd.", "other_forms": ["Tata Steel", "Tata Stl"]},
    "HINDALCO": {"official_name": "Hindalco Industries Ltd.", "other_forms": ["Hindalco"]},
    "LT": {"official_name": "Larsen & Toubro Ltd.", "other_forms": ["L&T", "Larsen", "Larsen & Toubro", "Larsen and Toubro"]},
    "INFY": {"official_name": "Infosys Ltd.", "other_forms": ["Infosys", "Infy"]},
    "RELIANCE": {"official_name": "Reliance Industries Ltd.", "other_forms": ["RIL", "Reliance", "Reliance Industries"]},
    "IDEA": {"official_name": "Idea Cellular Ltd.", "other_forms": ["Idea", "Idea Cellular"]},
    "BHARTIARTL": {"official_name": "Bharti Airtel Ltd.", "other_forms": ["Bharti Airtel", "Airtel", "Bharti"]},
    "COALINDIA": {"official_name": "Coal India Ltd.", "other_forms": ["Coal India", "CIL"]},
    "ABBOTINDIA": {"official_name": "Abbott India Ltd.", "other_forms": ["Abbott India"]},
    "CHAMBLFERT": {"official_name": "Chambal Fertilisers and Chemicals Ltd.", "other_forms": ["Chambal"]},
    "ADVANTA": {"official_name": "Advanta India Ltd.", "other_forms": ["Advanta"]},
    "AUTO": {"official_name": None, "other_forms": ["auto sector", "auto stocks", "auto space", "auto ind"]},
}

DEMO_LEXICON = [
    ("word", "feature", "source"),
    ("rally", "Up", "CUSTOM"),
    ("rally", "Positive", "LM"),
    ("rallies", "Up", "CUSTOM"),
    ("gains", "Up", "GI"),
    ("gain", "Up", "GI"),
    ("rises", "Up", "GI"),
    ("jumps", "Up", "CUSTOM"),
    ("surges", "Up", "CUSTOM"),
    ("up", "Up", "LM"),
    ("falls", "Down", "GI"),
    ("drops", "Down", "GI"),
    ("slips", "Down", "CUSTOM"),
    ("plunges", "Down", "CUSTOM"),
    ("down", "Down", "CUSTOM"),
    ("ends", "Down", "CUSTOM"),
    ("profit", "PositiveIfUp", "MALO"),
    ("profit", "Positive", "GI"),
    ("sales", "PositiveIfUp", "MALO"),
    ("margins", "PositiveIfUp", "MALO"),
    ("loss", "NegativeIfUp", "MALO"),
    ("debt", "NegativeIfUp", "MALO"),
    ("costs", "NegativeIfUp", "MALO"),
    ("not", "Negator", "GI"),
    ("no", "Negator", "GI"),
    ("buy", "Positive", "LM"),
    ("accumulate", "Positive", "CUSTOM"),
    ("outperforms", "Positive", "CUSTOM"),
    ("strong", "Positive", "LM"),
    ("upgrade", "Positive", "LM"),
    ("sell", "Negative", "LM"),
    ("weak", "Negative", "LM"),
    ("downgrade", "Negative", "LM"),
    ("negative", "Negative", "LM"),
    ("concerns", "Negative", "MPQA"),
    ("probe", "Negative", "MPQA"),
    ("stock", "Neutral", "LM"),
    ("shares", "Neutral", "LM"),
    ("stk", "Neutral", "CUSTOM"),
    ("board", "Neutral", "LM"),
    ("meeting", "Neutral", "LM"),
    ("results", "Neutral", "LM"),
    ("announces", "Neutral", "MPQA"),
    ("q3", "Neutral", "CUSTOM"),
    ("net", "Neutral", "CUSTOM"),
]

_POS_SINGLE = [
    "{A} shares rally after Q3 profit rises {n} pc",
    "{A} stock jumps on strong sales",
    "Buy {A}, target Rs {n}: analyst",
    "{A} Q3 net up {n} pc at Rs {n} crore",
    "{A} gains as margins improve",
    "Upgrade {A} on strong results",
]
_NEG_SINGLE = [
    "{A} shares fall after Q3 loss widens",
    "{A} stock plunges on weak sales",
    "Sell {A}, target Rs {n}: analyst",
    "{A} slips as debt concerns mount",
    "{A} profit drops {n} pc",
    "Downgrade {A} on probe concerns",
]
_NEU_SINGLE = [
    "{A} board meeting on {day}",
    "{A} announces results date",
    "{A} stock in focus ahead of meeting",
    "{A} rally ends, stk flat",
    "{A} to consider fund raising",
]
# two-entity templates carry one label per slot
_PAIR = [
    ("Buy {A}, sell {B}: analyst", ("positive", "negative")),
    ("Accumulate {A}, {B} on declines", ("positive", "positive")),
    ("{A} outperforms, {B} slips", ("positive", "negative")),
    ("{A} gains, {B} board meeting on {day}", ("positive", "neutral")),
    ("Negative on {A}, {B}: analyst", ("negative", "negative")),
    ("{A} falls as {B} rallies", ("negative", "positive")),
    ("{A} and {B} to announce results", ("neutral", "neutral")),
]


def _fill(template: str, rng, names: dict[str, str]) -> str:
    out = template
    for key, val in names.items():
        out = out.replace("{" + key + "}", val)
    while "{n}" in out:
        out = out.replace("{n}", str(int(rng.integers(2, 900))), 1)
    return out.replace("{day}", ["Monday", "Tuesday", "Friday"][int(rng.integers(3))])


def demo_headlines(n: int, seed: int = 0, bias: float = 0.0):
    """Yield ``(headline, {symbol: label})`` pairs from templates.

    ``bias`` in [-1, 1] tilts single-entity headlines toward positive (> 0)
    or negative (< 0) sentiment.
    """
    rng = np.random.default_rng(seed)
    symbols = sorted(DEMO_ENTITIES)
    for _ in range(n):
        a, b = rng.choice(len(symbols), size=2, replace=False)
        sa, sb = symbols[a], symbols[b]
        pa = _surface(rng, sa)
        pb = _surface(rng, sb)
        if rng.random() < 0.25:
            template, labels = _PAIR[int(rng.integers(len(_PAIR)))]
            yield _fill(template, rng, {"A": pa, "B": pb}), {sa: labels[0], sb: labels[1]}
            continue
        u = rng.random()
        p_pos = (1 + bias) / 3
        p_neg = (1 - bias) / 3
        if u < p_pos:
            label, pool = "positive", _POS_SINGLE
        elif u < p_pos + p_neg:
            label, pool = "negative", _NEG_SINGLE
        else:
            label, pool = "neutral", _NEU_SINGLE
        yield _fill(pool[int(rng.integers(len(pool)))], rng, {"A": pa}), {sa: label}


def _surface(rng, symbol: str) -> str:
    rec = DEMO_ENTITIES[symbol]
    forms = list(rec["other_forms"])
    return forms[int(rng.integers(len(forms)))]


def write_demo_fixtures(out_dir: str | Path, seed: int = 7, n_train: int = 600, n_days: int = 90) -> dict[str, Path]:
    """Write a self-consistent fixture set for the CLI pipeline.

    Files: entities.json, lexicon.tsv, train_headlines.csv (labelled),
    news_headlines.csv (timestamped), calendar.csv, prices.csv. After-market
    returns are generated as ``0.002 * daily bias + noise`` so the
    regression has something to find.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    paths = {name: out / name for name in (
        "entities.json", "lexicon.tsv", "train_headlines.csv", "news_headlines.csv", "calendar.csv", "prices.csv",
    )}
    paths["entities.json"].write_text(json.dumps(DEMO_ENTITIES, indent=2) + "\n", encoding="utf-8")
    with paths["lexicon.tsv"].open("w", encoding="utf-8", newline="") as fh:
        for row in DEMO_LEXICON:
            fh.write("\t".join(row) + "\n")

    with paths["train_headlines.csv"].open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", "headline", "labels"])
        for i, (text, labels) in enumerate(demo_headlines(n_train, seed=seed)):
            w.writerow([f"t{i:05d}", text, json.dumps(labels, sort_keys=True)])

    days = []
    d = date(2015, 1, 5)
    while len(days) < n_days + 1:
        if d.weekday() < 5:
            days.append(d)
        d += timedelta(days=1)
    with paths["calendar.csv"].open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["date", "open", "close"])
        for d in days:
            w.writerow([d.isoformat(), "", ""])

    biases = rng.uniform(-0.9, 0.9, size=len(days))
    news_rows = []
    for i, day in enumerate(days[:-1]):
        close_dt = datetime.combine(day, time(15, 30))
        next_open = datetime.combine(days[i + 1], time(9, 30))
        span = (next_open - close_dt).total_seconds()
        k_am = int(rng.integers(4, 9))
        for j, (text, _) in enumerate(demo_headlines(k_am, seed=seed * 100003 + i, bias=float(biases[i]))):
            ts = close_dt + timedelta(seconds=int(rng.uniform(60, span - 60)))
            news_rows.append((ts, f"n{i:03d}a{j}", text))
        for j, (text, _) in enumerate(demo_headlines(3, seed=seed * 200003 + i)):
            ts = datetime.combine(day, time(10, 0)) + timedelta(minutes=int(rng.integers(0, 300)))
            news_rows.append((ts, f"n{i:03d}m{j}", text))
    news_rows.sort()
    with paths["news_headlines.csv"].open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", "timestamp", "headline"])
        for ts, hid, text in news_rows:
            w.writerow([hid, ts.isoformat(), text])

    with paths["prices.csv"].open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["date", "open", "close"])
        price = 8000.0
        open_ = price
        for i, day in enumerate(days):
            close = open_ * math.exp(rng.normal(0.0, 0.006))
            w.writerow([day.isoformat(), f"{open_:.2f}", f"{close:.2f}"])
            open_ = close * math.exp(0.002 * biases[i] + rng.normal(0.0, 0.0005))
    return paths
