"""Acceptance criteria. Each test records one PASS/FAIL line for the session summary.

Run just these with ``pytest -m acceptance``.
"""

from __future__ import annotations

import ast
import csv
import filecmp
import json
import math
import os
import time
from pathlib import Path

import numpy as np
import pytest

from conftest import db_from
from entsent.classifier import CLASSES, evaluate_protocol, loss_and_grad
from entsent.cli import main
from entsent.econo import hypothesis_test, ols
from entsent.gazetteer import OTHER, TARGET, expand_instances, fold, read_entity_db, recognize
from entsent.lexicon import FeatureClass, read_lexicon
from entsent.representations import ngrams
from entsent.sentindex import s1, s2
from entsent.synthetic import bigram_rule_corpus, planted_lag_series
from marketfiles import trading_days, write_market
from oracles import brute_force_mentions, db_json, gradient_check_case, normal_equations, random_matcher_case

pytestmark = pytest.mark.acceptance


def test_c01_matcher_matches_brute_force(criterion):
    rng = np.random.default_rng(2024)
    cases = [random_matcher_case(rng) for _ in range(1000)]
    dbs = [db_from(db_json(phrases)) for phrases, _ in cases]
    t0 = time.perf_counter()
    ours = [recognize(db, headline) for db, (_, headline) in zip(dbs, cases)]
    elapsed = time.perf_counter() - t0
    mismatches = 0
    for got, (phrases, headline) in zip(ours, cases):
        oracle = brute_force_mentions({p.lower(): s for p, s in phrases.items()}, headline)
        mismatches += [(m.span_start, m.span_end, m.symbol) for m in got] != oracle
    n_mentions = sum(len(m) for m in ours)
    ok = mismatches == 0 and elapsed < 5.0
    criterion(1, ok, f"matcher vs brute force: {mismatches}/1000 mismatches, {n_mentions} mentions, {elapsed:.3f}s")
    assert ok


def test_c02_instance_expansion(criterion):
    headline = "Negative on Chambal, Advanta: Mitesh Thacker"
    db = db_from({"CHMB": {"official_name": None, "other_forms": ["Chambal"]},
                  "ADVA": {"official_name": None, "other_forms": ["Advanta"]}})
    insts = expand_instances(headline, recognize(db, headline))
    layout_ok = [i.tokens for i in insts] == [
        ("negative", "on", TARGET, OTHER, "mitesh", "thacker"),
        ("negative", "on", OTHER, TARGET, "mitesh", "thacker"),
    ]
    rng = np.random.default_rng(7)
    names = ["Alpha", "Beta Corp", "Gamma", "Delta & Co", "Eps"]
    fillers = ["up", "falls", "on", "26", "Q3,", "-", "the", "1,200.5"]
    seen_n, bad = set(), 0
    for _ in range(500):
        n_sym = int(rng.integers(1, 6))
        db = db_from({f"S{i}": {"official_name": None, "other_forms": [names[i]]} for i in range(n_sym)})
        picks = list(rng.permutation(n_sym)) + list(rng.integers(n_sym, size=int(rng.integers(0, 3))))
        rng.shuffle(picks)
        parts = []
        for p in picks:
            parts += [fillers[int(rng.integers(len(fillers)))], names[p]]
        text = " ".join(parts)
        ms = recognize(db, text)
        insts = expand_instances(text, ms)
        distinct = len({m.symbol for m in ms})
        seen_n.add(distinct)
        bad += len(insts) != distinct
        for inst in insts:
            k = sum(m.symbol == inst.target_symbol for m in ms)
            bad += inst.tokens.count(TARGET) != k
            bad += len(set(inst.other_symbols)) != distinct - 1
            bad += inst.tokens.count(OTHER) != len(ms) - k
    ok = layout_ok and bad == 0 and seen_n == {1, 2, 3, 4, 5}
    criterion(2, ok, f"Chambal/Advanta layouts {'ok' if layout_ok else 'WRONG'}; 500 random headlines, N in "
                     f"{sorted(seen_n)}, {bad} violations")
    assert ok


def test_c03_ubt_identity(criterion):
    rng = np.random.default_rng(3)
    classes = list(FeatureClass)
    bad = 0
    for _ in range(500):
        seq = [classes[j] for j in rng.integers(len(classes), size=int(rng.integers(0, 30)))]
        counts = ngrams(seq)
        sums = {n: sum(c for k, c in counts.items() if len(k) == n) for n in (1, 2, 3)}
        L = len(seq)
        bad += sums != {1: L, 2: max(L - 1, 0), 3: max(L - 2, 0)}
    criterion(3, bad == 0, f"UBT n-gram count sums on 500 sequences: {bad} violations")
    assert bad == 0


def test_c04_gradient_check(criterion):
    rng = np.random.default_rng(4)
    worst = {}
    for loss in ("softmax", "hinge"):
        worst[loss] = max(gradient_check_case(rng, loss, loss_and_grad) for _ in range(50))
    ok = all(v < 1e-4 for v in worst.values())
    criterion(4, ok, "max relative gradient error over 50 pairs: "
                     + ", ".join(f"{k} {v:.2e}" for k, v in worst.items()))
    assert ok


def test_c05_learnability(criterion):
    corpus = bigram_rule_corpus(3000, flip=0.1, seed=0)
    parts, ok = [], True
    for loss in ("hinge", "softmax"):
        t0 = time.perf_counter()
        summary = evaluate_protocol(corpus, "UBT", loss, splits=31, seed=0).summary()
        elapsed = time.perf_counter() - t0
        medians = [summary["classes"][c]["accuracy"]["median"] for c in CLASSES]
        ok &= min(medians) >= 0.85 and elapsed < 60
        parts.append(f"{loss} medians " + "/".join(f"{m:.3f}" for m in medians) + f" in {elapsed:.1f}s")
    criterion(5, ok, "31-split UBT on 3,000 noisy instances: " + "; ".join(parts))
    assert ok


# ---------------------------------------------------------------- criterion 6 (needs user data)

REPORTED_UBT_HINGE = {"positive": 0.8379, "negative": 0.8724, "neutral": 0.7938}


def _parse_decisions(text: str) -> dict:
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return ast.literal_eval(text)


def load_sentfin(path: Path, db=None):
    """Headline CSV with a title column and a per-entity decisions dict.

    Without an entity db, one is derived from the annotated entity strings.
    """
    with open(path, encoding="utf-8-sig", newline="") as fh:
        reader = csv.DictReader(fh)
        cols = {c.lower(): c for c in reader.fieldnames or ()}
        title = cols.get("title") or cols["headline"]
        decisions = cols.get("decisions") or cols["labels"]
        rows = [(r[title], _parse_decisions(r[decisions])) for r in reader]
    if db is None:
        doc, owner = {}, {}
        for _, dec in rows:
            for key in dec:
                sym = owner.setdefault(fold(key.strip()), fold(key.strip()).upper())
                doc.setdefault(sym, {"official_name": None, "other_forms": [key.strip()]})
        db = db_from(doc)
    instances = []
    for i, (text, dec) in enumerate(rows):
        labels = {db.resolve(k.strip()): v for k, v in dec.items() if db.resolve(k.strip())}
        instances += [x for x in expand_instances(text, recognize(db, text), str(i), labels) if x.gold_label]
    return instances


def test_c06_published_accuracy_replication(criterion):
    data = os.environ.get("ENTSENT_SENTFIN")
    lexicon = os.environ.get("ENTSENT_LEXICON")
    if not (data and lexicon):
        criterion(6, None, "not runnable: set ENTSENT_SENTFIN and ENTSENT_LEXICON (optional ENTSENT_ENTITY_DB); "
                           "replaced by criterion 5")
        pytest.skip("user-supplied dataset and lexicon not provided")
    db_path = os.environ.get("ENTSENT_ENTITY_DB")
    instances = load_sentfin(Path(data), read_entity_db(db_path) if db_path else None)
    lex = read_lexicon(lexicon.split(os.pathsep))
    summary = evaluate_protocol(instances, "UBT", "hinge", lexicon=lex, splits=31, seed=0).summary()
    got = {c: summary["classes"][c]["accuracy"]["median"] for c in CLASSES}
    ok = all(abs(got[c] - REPORTED_UBT_HINGE[c]) <= 0.03 for c in CLASSES)
    criterion(6, ok, f"{len(instances)} instances; medians " + ", ".join(
        f"{c} {got[c]:.4f} (target {REPORTED_UBT_HINGE[c]:.4f})" for c in CLASSES))
    assert ok


# ---------------------------------------------------------------- econometrics


def test_c07_score_identities(criterion):
    bad = cases = 0
    for p in range(20):
        for u in range(20):
            for n in range(20):
                cases += 1
                if p + n:
                    if u == 0:
                        bad += s2(p, 0, n) != s1(p, n)
                    bad += abs(s2(p, u, n)) > abs(s1(p, n))
                    bad += any(s1(k * p, k * n) != s1(p, n) for k in (2, 3, 7))
                if p + u + n:
                    bad += any(s2(k * p, k * u, k * n) != s2(p, u, n) for k in (2, 3, 7))
    criterion(7, bad == 0 and cases == 8000, f"{cases} count triples checked exactly: {bad} violations")
    assert bad == 0 and cases == 8000


def test_c08_ols_oracle(criterion):
    rng = np.random.default_rng(8)
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(10, 61))
        k = int(rng.integers(1, 5))
        X = rng.normal(0, rng.uniform(0.5, 5), size=(n, k))
        y = X @ rng.normal(0, 1, k) + rng.normal(0, 1, n) + rng.normal()
        res = ols(y, X)
        beta, se, r2 = normal_equations(y, np.column_stack([np.ones(n), X]))
        for a, b in ((res.coef, beta), (res.se, se), (np.array([res.r_squared]), np.array([r2]))):
            worst = max(worst, float(np.max(np.abs(a - b) / np.maximum(1.0, np.abs(b)))))
    ok = worst <= 1e-10
    criterion(8, ok, f"100 random designs vs explicit inverse: max error {worst:.1e}")
    assert ok


def test_c09_regression_size(criterion):
    rng = np.random.default_rng(9)
    days = trading_days(250)
    t0 = time.perf_counter()
    rejected = 0
    for _ in range(1000):
        d = rng.normal(size=250)
        s = rng.normal(size=250)
        rejected += hypothesis_test(list(zip(days, d)), list(zip(days, s))).p("s") < 0.05
    elapsed = time.perf_counter() - t0
    rate = rejected / 1000
    ok = 0.03 <= rate <= 0.07 and elapsed < 30
    criterion(9, ok, f"white-noise rejection rate at 5%: {rate:.3f} over 1000 trials in {elapsed:.1f}s")
    assert ok


def test_c10_planted_signal(criterion, tmp_path):
    rng = np.random.default_rng(0)
    days = trading_days(250)
    covered = 0
    for _ in range(200):
        s = rng.uniform(-1, 1, 250)
        d = 0.002 * s + rng.normal(0, 0.005, 250)
        res = hypothesis_test(list(zip(days, d)), list(zip(days, s)))
        covered += abs(res["s"] - 0.002) <= 2 * res.se_of("s")
    first = 0
    for trial in range(200):
        d, s = planted_lag_series(250, lag=2, beta=0.1, noise=0.01, seed=trial)
        series, prices = write_market(tmp_path / "in", d, s, kind="pct")
        out = tmp_path / "out"
        code = main(["var", "--series", str(series), "--prices", str(prices), "--out", str(out), "--pooled"])
        with open(out / "var.csv", newline="") as fh:
            top = next(csv.DictReader(fh))
        first += code == 0 and (top["p1"], top["p2"]) == ("0", "2")
    ok = covered >= 190 and first >= 180
    criterion(10, ok, f"beta within 2 se in {covered}/200 trials; var ranks (0,2) first in {first}/200 runs")
    assert ok


def test_c11_end_to_end_determinism(criterion, demo_dir, tmp_path):
    f = demo_dir
    t0 = time.perf_counter()
    for run in ("a", "b"):
        out = tmp_path / run
        steps = [
            ["recognize", "--db", f / "entities.json", "--headlines", f / "train_headlines.csv"],
            ["train", "--instances", out / "instances.jsonl", "--lexicon", f / "lexicon.tsv"],
            ["score", "--model", out / "model.json", "--db", f / "entities.json", "--lexicon", f / "lexicon.tsv",
             "--headlines", f / "news_headlines.csv"],
            ["index", "--events", out / "events.csv", "--calendar", f / "calendar.csv", "--ma-window", "30"],
            ["regress", "--series", out / "series.csv", "--prices", f / "prices.csv", "--calendar", f / "calendar.csv"],
        ]
        for argv in steps:
            assert main([str(a) for a in argv] + ["--out", str(out), "--seed", "11"]) == 0
    elapsed = time.perf_counter() - t0
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    same = filecmp.cmpfiles(tmp_path / "a", tmp_path / "b", names, shallow=False)[0]
    ok = same == names and (tmp_path / "b").exists() and elapsed < 120 and len(names) >= 10
    criterion(11, ok, f"{len(same)}/{len(names)} output files byte-identical across two runs, {elapsed:.1f}s")
    assert ok


def test_sentfin_loader_layout(tmp_path):
    path = tmp_path / "sentfin.csv"
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["S No.", "Title", "Decisions", "Words"])
        w.writerow([1, "Negative on Chambal, Advanta: Mitesh Thacker",
                    "{'Chambal': 'negative', 'Advanta': 'neutral'}", 2])
        w.writerow([2, "SpiceJet shares rally", json.dumps({"SpiceJet": "positive"}), 1])
    insts = load_sentfin(path)
    assert [(i.target_symbol, i.gold_label) for i in insts] == [
        ("CHAMBAL", "negative"), ("ADVANTA", "neutral"), ("SPICEJET", "positive")]
    assert insts[0].tokens == ("negative", "on", TARGET, OTHER, "mitesh", "thacker")
