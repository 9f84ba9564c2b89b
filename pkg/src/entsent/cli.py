"""Command-line entry point: ``entsent <command> [options]``.

Commands compose as recognize -> train/eval, and score -> index -> regress/var.
Every option can also come from a JSON file passed with ``--config``;
command-line flags win over the file.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import math
import sys
from collections import Counter, defaultdict
from datetime import time
from pathlib import Path
from typing import Sequence

from . import __version__
from .classifier import CLASSES, LinearModel, TrainConfig, evaluate_protocol, predict_many, train_on_instances
from .econo import (
    HYPOTHESIS_STARS,
    VAR_STARS,
    RegressionError,
    after_market_returns,
    align,
    hypothesis_test,
    read_prices,
    stars,
    var_scan,
)
from .gazetteer import LABELS, AnnotatedInstance, EntityDatabase, expand_instances, read_entity_db, recognize
from .lexicon import annotate, read_lexicon
from .representations import to_matrix
from .sentindex import (
    AFTER_MARKET,
    DEFAULT_TZ,
    DURATIONS,
    TradingCalendar,
    bucket_series,
    parse_timestamp,
    read_events,
    read_series,
    write_series,
)

log = logging.getLogger("entsent")

DEFAULTS = {
    "seed": 0,
    "out": "out",
    "repr": "UBT",
    "loss": "hinge",
    "learning_rate": 0.1,
    "epochs": 20,
    "l2": 1e-4,
    "batch_size": 64,
    "splits": 31,
    "train_frac": 0.8,
    "timezone": DEFAULT_TZ,
    "session_open": "09:30",
    "session_close": "15:30",
    "policy": "skip",
    "ma_window": 0,
    "returns": None,  # per-command default below
    "measure": None,
    "duration": AFTER_MARKET,
    "min_obs": 30,
    "p1_max": 3,
    "p2_max": 3,
    "alpha": 0.1,
    "by_year": True,
}


class CLIError(Exception):
    pass


# ---------------------------------------------------------------- helpers


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _need(args, *flags: str) -> dict[str, Path]:
    """Check required input paths; error messages name the flag."""
    out = {}
    for flag in flags:
        dest = flag.lstrip("-").replace("-", "_")
        value = getattr(args, dest, None)
        if value is None:
            raise CLIError(f"{flag} is required")
        values = value if isinstance(value, list) else [value]
        for v in values:
            if not Path(v).is_file():
                raise CLIError(f"{flag}: file not found: {v}")
        out[dest] = value
    return out


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_manifest(args, out: Path, inputs: dict[str, Sequence[str] | str], params: dict) -> dict:
    """Write ``<command>.manifest.json``; its content depends only on inputs and settings."""
    hashed = {}
    for name, value in sorted(inputs.items()):
        paths = value if isinstance(value, list) else [value]
        hashed[name] = [{"file": Path(p).name, "sha256": _sha256(Path(p))} for p in paths]
    body = {"command": args.command, "seed": args.seed, "params": params, "inputs": hashed}
    config_hash = hashlib.sha256(json.dumps(body, sort_keys=True).encode()).hexdigest()[:16]
    manifest = {"tool": "entsent", "version": __version__, "config_hash": config_hash, **body}
    (out / f"{args.command}.manifest.json").write_text(json.dumps(manifest, sort_keys=True, indent=1) + "\n")
    return manifest


def _dump_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, sort_keys=True, indent=1, allow_nan=False) + "\n", encoding="utf-8")


def _f(x: float) -> str:
    return "" if x is None or (isinstance(x, float) and math.isnan(x)) else repr(float(x))


def _csv_writer(fh):
    return csv.writer(fh, lineterminator="\n")


def read_headlines(path: Path) -> list[dict]:
    """Rows with ``id``, ``headline`` and optional ``timestamp`` / ``labels`` (JSON object)."""
    with open(path, encoding="utf-8-sig", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            return []
        missing = {"id", "headline"} - set(reader.fieldnames)
        if missing:
            raise CLIError(f"{path}: missing columns {sorted(missing)}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            labels = (row.get("labels") or "").strip()
            if labels:
                try:
                    row["labels"] = json.loads(labels)
                except json.JSONDecodeError as exc:
                    raise CLIError(f"{path}:{lineno}: labels column is not JSON: {exc.msg}") from None
                if not isinstance(row["labels"], dict):
                    raise CLIError(f"{path}:{lineno}: labels must be a JSON object")
            else:
                row["labels"] = None
            row["_line"] = lineno
            rows.append(row)
        return rows


def _resolve_labels(db: EntityDatabase, labels: dict | None, where: str, report: Counter) -> dict[str, str] | None:
    if labels is None:
        return None
    out = {}
    for key, lab in labels.items():
        if lab not in LABELS:
            raise CLIError(f"{where}: unknown label {lab!r} for {key!r}")
        symbol = db.resolve(key)
        if symbol is None:
            report["unresolved label keys"] += 1
            log.warning("%s: label key %r matches no entity", where, key)
            continue
        out[symbol] = lab
    return out


def _instances_for(db: EntityDatabase, rows: list[dict], report: Counter, path: Path):
    for row in rows:
        where = f"{path}:{row['_line']}"
        mentions = recognize(db, row["headline"])
        labels = _resolve_labels(db, row["labels"], where, report)
        instances = expand_instances(row["headline"], mentions, str(row["id"]), labels)
        report["headlines"] += 1
        if not mentions:
            report["headlines without entities"] += 1
        if labels is not None:
            found = {i.target_symbol for i in instances}
            report["labelled entities not recognized"] += len(set(labels) - found)
        yield row, mentions, instances


def _print_report(title: str, report: Counter) -> None:
    print(f"{title}:")
    for key in sorted(report):
        print(f"  {key}: {report[key]}")


def read_instances(path: Path) -> list[AnnotatedInstance]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                out.append(AnnotatedInstance.from_json(json.loads(line)))
            except (KeyError, ValueError) as exc:
                raise CLIError(f"{path}:{lineno}: bad instance record: {exc}") from None
    return out


def _train_config(args) -> TrainConfig:
    return TrainConfig(
        loss_kind=args.loss,
        learning_rate=args.learning_rate,
        epochs=args.epochs,
        l2=args.l2,
        batch_size=args.batch_size,
        seed=args.seed,
    )


def _labelled(instances: list[AnnotatedInstance], path) -> list[AnnotatedInstance]:
    labelled = [i for i in instances if i.gold_label is not None]
    if not labelled:
        raise CLIError(f"{path}: no gold labels found (is the labels column missing?)")
    if len(labelled) < len(instances):
        log.warning("%s: %d instances without a gold label ignored", path, len(instances) - len(labelled))
    return labelled


# ---------------------------------------------------------------- commands


def cmd_recognize(args) -> int:
    paths = _need(args, "--db", "--headlines")
    db = read_entity_db(paths["db"])
    rows = read_headlines(Path(paths["headlines"]))
    out = _out_dir(args)
    report: Counter = Counter()
    with open(out / "mentions.csv", "w", encoding="utf-8", newline="") as mfh, \
            open(out / "instances.jsonl", "w", encoding="utf-8") as ifh:
        mw = _csv_writer(mfh)
        mw.writerow(["headline_id", "symbol", "start", "end", "phrase"])
        for row, mentions, instances in _instances_for(db, rows, report, Path(paths["headlines"])):
            for m in mentions:
                mw.writerow([row["id"], m.symbol, m.span_start, m.span_end, m.matched_phrase])
            for inst in instances:
                rec = inst.to_json()
                if row.get("timestamp"):
                    rec["timestamp"] = row["timestamp"]
                ifh.write(json.dumps(rec, sort_keys=True) + "\n")
                report["instances"] += 1
    _write_manifest(args, out, paths, {})
    _print_report("recognize", report)
    return 0


def cmd_train(args) -> int:
    paths = _need(args, "--instances", "--lexicon")
    lex = read_lexicon(paths["lexicon"])
    instances = _labelled(read_instances(Path(paths["instances"])), paths["instances"])
    model = train_on_instances(instances, args.repr, _train_config(args), lex)
    out = _out_dir(args)
    manifest = _write_manifest(args, out, paths, {"repr": args.repr, **model.meta, "loss": args.loss})
    model.meta.update({"lexicon_fingerprint": lex.fingerprint(), "config_hash": manifest["config_hash"]})
    (out / "model.json").write_text(model.dumps() + "\n", encoding="utf-8")
    print(f"trained {args.loss}/{args.repr} model on {len(instances)} instances, dimension {model.space.dimension}")
    return 0


def cmd_eval(args) -> int:
    paths = _need(args, "--instances", "--lexicon")
    lex = read_lexicon(paths["lexicon"])
    instances = _labelled(read_instances(Path(paths["instances"])), paths["instances"])
    report = evaluate_protocol(
        instances, args.repr, args.loss, lexicon=lex, splits=args.splits,
        train_frac=args.train_frac, seed=args.seed, config=_train_config(args),
    )
    out = _out_dir(args)
    with open(out / "eval_splits.csv", "w", encoding="utf-8", newline="") as fh:
        w = _csv_writer(fh)
        w.writerow(["split", "class", "accuracy", "f1"])
        for r in report.rows:
            w.writerow([r["split"], r["class"], _f(r["accuracy"]), _f(r["f1"])])
    manifest = _write_manifest(args, out, paths, {
        "repr": args.repr, "loss": args.loss, "splits": args.splits, "train_frac": args.train_frac,
        "learning_rate": args.learning_rate, "epochs": args.epochs, "l2": args.l2, "batch_size": args.batch_size,
    })
    summary = report.summary()
    summary["config_hash"] = manifest["config_hash"]
    _dump_json(out / "eval_summary.json", summary)
    print(f"{'class':<10}{'acc median':>12}{'acc mean':>10}{'acc sd':>9}{'f1 median':>11}")
    for cls in CLASSES:
        a, f = summary["classes"][cls]["accuracy"], summary["classes"][cls]["f1"]
        print(f"{cls:<10}{a['median']:>12.4f}{a['mean']:>10.4f}{a['sd']:>9.4f}{f['median']:>11.4f}")
    return 0


def cmd_score(args) -> int:
    paths = _need(args, "--model", "--db", "--lexicon", "--headlines")
    model = LinearModel.from_json(json.loads(Path(paths["model"]).read_text(encoding="utf-8")))
    lex = read_lexicon(paths["lexicon"])
    want = model.meta.get("lexicon_fingerprint")
    if want is not None and want != lex.fingerprint():
        raise CLIError("--lexicon does not match the lexicon the model was trained with (model/space mismatch)")
    db = read_entity_db(paths["db"])
    rows = read_headlines(Path(paths["headlines"]))
    report: Counter = Counter()
    pending = []
    for row, _, instances in _instances_for(db, rows, report, Path(paths["headlines"])):
        ts_text = (row.get("timestamp") or "").strip()
        if instances and not ts_text:
            raise CLIError(f"{paths['headlines']}:{row['_line']}: timestamp is required for scoring")
        for inst in instances:
            pending.append((row, inst))
    out = _out_dir(args)
    labels: list[str] = []
    if pending:
        seqs = [annotate(lex, inst) for _, inst in pending]
        X = to_matrix(model.space, [model.space.transform(s) for s in seqs])
        labels = [model.classes[i] for i in predict_many(model, X)]
    with open(out / "events.csv", "w", encoding="utf-8", newline="") as fh:
        w = _csv_writer(fh)
        w.writerow(["id", "timestamp", "symbol", "label"])
        for (row, inst), lab in zip(pending, labels):
            ts = parse_timestamp(row["timestamp"], args.timezone)
            w.writerow([f"{row['id']}:{inst.target_symbol}", ts.isoformat(), inst.target_symbol, lab])
            report[f"events {lab}"] += 1
    report["events"] = len(pending)
    _write_manifest(args, out, paths, {"timezone": args.timezone})
    _print_report("score", report)
    return 0


def _calendar(args, path) -> TradingCalendar:
    return TradingCalendar.from_csv(
        path,
        open_time=time.fromisoformat(args.session_open),
        close_time=time.fromisoformat(args.session_close),
        tz=args.timezone,
    )


def cmd_index(args) -> int:
    paths = _need(args, "--events", "--calendar")
    cal = _calendar(args, paths["calendar"])
    events = read_events(paths["events"], args.timezone)
    constituency = None
    if args.constituency:
        paths.update(_need(args, "--constituency"))
        raw = json.loads(Path(args.constituency).read_text(encoding="utf-8"))
        constituency = {int(year): set(symbols) for year, symbols in raw.items()}
    result = bucket_series(events, cal, constituency, args.policy)
    out = _out_dir(args)
    n_rows = write_series(out / "series.csv", result, args.ma_window)
    _write_manifest(args, out, paths, {
        "timezone": args.timezone, "session_open": args.session_open, "session_close": args.session_close,
        "policy": args.policy, "ma_window": args.ma_window,
    })
    print(f"index: {len(events)} events, {result.n_included} included, {n_rows} series rows")
    if result.excluded:
        print("excluded (outside constituency):")
        for sym, k in sorted(result.excluded.items()):
            print(f"  {sym}: {k}")
    return 0


def _returns(args, paths, kind):
    bars = read_prices(paths["prices"])
    next_day = None
    if getattr(args, "calendar", None):
        paths.update(_need(args, "--calendar"))
        next_day = _calendar(args, paths["calendar"]).next_day
    values, gaps = after_market_returns(bars, kind, next_day)
    if len(gaps) > 1:
        log.warning("%d days without a next-day open (gaps): %s", len(gaps), ", ".join(str(g) for g in gaps[:5]))
    return values


def _overlap_error(returns, series) -> CLIError:
    def rng(xs):
        return f"{xs[0][0]}..{xs[-1][0]}" if xs else "empty"

    days, _, _ = align(returns, series)
    return CLIError(
        f"returns ({rng(returns)}) and sentiment ({rng(series)}) overlap on {len(days)} days"
        + (f" ({days[0]}..{days[-1]})" if days else "")
    )


def cmd_regress(args) -> int:
    paths = _need(args, "--series", "--prices")
    kind = args.returns or "log"
    measures = args.measure.split(",") if args.measure else ["s1", "s2"]
    returns = _returns(args, paths, kind)
    series = {m: read_series(paths["series"], args.duration, m) for m in measures}

    groups: dict[str, dict] = {}
    years = sorted({d.year for d, _ in returns} & {d.year for m in measures for d, _ in series[m]})
    scopes = ([str(y) for y in years] if args.by_year else []) + ["all"]
    for scope in scopes:
        row = {}
        for m in measures:
            ret = returns if scope == "all" else [(d, v) for d, v in returns if d.year == int(scope)]
            ser = series[m] if scope == "all" else [(d, v) for d, v in series[m] if d.year == int(scope)]
            try:
                row[m] = hypothesis_test(ret, ser, min_obs=args.min_obs, measure=m)
            except RegressionError as exc:
                if scope == "all":
                    raise _overlap_error(ret, ser) from exc
                log.warning("%s/%s skipped: %s", scope, m, exc)
        if row:
            groups[scope] = row

    out = _out_dir(args)
    header = ["period", "n"]
    for m in measures:
        header += [f"beta_{m}", f"se_{m}", f"p_{m}", f"stars_{m}", f"r2_{m}"]
    doc = {"returns": kind, "duration": args.duration, "measures": measures, "periods": {}}
    with open(out / "regress.csv", "w", encoding="utf-8", newline="") as fh:
        w = _csv_writer(fh)
        w.writerow(header)
        for scope, row in groups.items():
            n = max(r.n for r in row.values())
            line = [scope, n]
            for m in measures:
                r = row.get(m)
                if r is None:
                    line += ["", "", "", "", ""]
                    continue
                p = r.p(m)
                line += [_f(r[m]), _f(r.se_of(m)), _f(p), stars(p, HYPOTHESIS_STARS), _f(r.r_squared)]
            w.writerow(line)
            doc["periods"][scope] = {m: r.to_json(HYPOTHESIS_STARS) for m, r in row.items()}
    manifest = _write_manifest(args, out, paths, {
        "returns": kind, "measures": measures, "duration": args.duration, "min_obs": args.min_obs,
        "by_year": args.by_year,
    })
    doc["config_hash"] = manifest["config_hash"]
    _dump_json(out / "regress.json", doc)

    print(f"d_i = alpha + beta * s_i  ({kind} after-market returns, {args.duration} sentiment)")
    print(f"{'period':<8}{'n':>5}" + "".join(f"{'beta ' + m:>16}{'r2 ' + m:>10}" for m in measures))
    for scope, row in groups.items():
        n = max(r.n for r in row.values())
        cells = ""
        for m in measures:
            r = row.get(m)
            if r is None:
                cells += f"{'':>16}{'':>10}"
            else:
                cells += f"{r[m]:>12.5f}{stars(r.p(m)):<4}{r.r_squared:>10.4f}"
        print(f"{scope:<8}{n:>5}" + cells)
    print("* p < 0.1; ** p < 0.05; *** p < 0.01")
    return 0


def cmd_var(args) -> int:
    paths = _need(args, "--series", "--prices")
    kind = args.returns or "pct"
    measure = args.measure or "s2"
    returns = _returns(args, paths, kind)
    series = read_series(paths["series"], args.duration, measure)
    days, d, s = align(returns, series)
    need = max(args.p1_max, args.p2_max) * 3 + 3
    if len(days) < need:
        raise _overlap_error(returns, series)

    scopes = defaultdict(list)
    for i, day in enumerate(days):
        scopes[str(day.year) if args.by_year else "all"].append(i)
    results = {}
    for scope, idx in sorted(scopes.items()):
        try:
            results[scope] = var_scan(d[idx], s[idx], args.p1_max, args.p2_max, alpha=args.alpha)
        except RegressionError as exc:
            log.warning("%s skipped: %s", scope, exc)
    if not results:
        raise CLIError("no period has enough aligned observations for the VAR scan")

    lag_cols = [f"d_t-{j}" for j in range(1, args.p1_max + 1)] + [f"s_t-{j}" for j in range(1, args.p2_max + 1)]
    out = _out_dir(args)
    doc = {"returns": kind, "measure": measure, "alpha": args.alpha, "periods": {}}
    with open(out / "var.csv", "w", encoding="utf-8", newline="") as fh:
        w = _csv_writer(fh)
        w.writerow(["period", "rank", "p1", "p2", "n"] + lag_cols + ["bic", "significant"])
        for scope, entries in results.items():
            doc["periods"][scope] = []
            for e in entries:
                res = e.result
                cells = []
                for col in lag_cols:
                    if col in res.names:
                        cells.append(f"{res[col]!r}{stars(res.p(col), VAR_STARS)}")
                    else:
                        cells.append("")
                w.writerow([scope, e.rank, e.spec.p1, e.spec.p2, res.n] + cells + [_f(res.bic), int(e.significant)])
                doc["periods"][scope].append(
                    {"rank": e.rank, "significant": e.significant, **res.to_json(VAR_STARS)}
                )
    manifest = _write_manifest(args, out, paths, {
        "returns": kind, "measure": measure, "duration": args.duration, "p1_max": args.p1_max,
        "p2_max": args.p2_max, "alpha": args.alpha, "by_year": args.by_year,
    })
    doc["config_hash"] = manifest["config_hash"]
    _dump_json(out / "var.json", doc)

    for scope, entries in results.items():
        print(f"[{scope}] VAR(p1,p2) ranked by BIC ({kind} returns, {measure})")
        for e in entries:
            flag = "*" if e.significant else " "
            print(f"  {e.rank:>2}. {str(e.spec):<7} BIC {e.result.bic:>12.3f} {flag}")
    print("+ p < 0.1; * p < 0.05; ** p < 0.01; *** p < 0.001; '*' after BIC: at least one lag significant")
    return 0


# ---------------------------------------------------------------- parser


def _common(sub: argparse.ArgumentParser) -> None:
    g = sub.add_argument_group("global")
    g.add_argument("--config", default=argparse.SUPPRESS, help="JSON file of option defaults")
    g.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    g.add_argument("--out", default=argparse.SUPPRESS, help="output directory")
    g.add_argument("--timezone", default=argparse.SUPPRESS, help="exchange timezone (default Asia/Kolkata)")


def _train_opts(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--instances", help="instances.jsonl from `recognize` (with gold labels)")
    sub.add_argument("--lexicon", nargs="+", help="one or more lexicon TSV files")
    sub.add_argument("--repr", choices=("UBT", "LPS"))
    sub.add_argument("--loss", choices=("hinge", "softmax"))
    sub.add_argument("--learning-rate", type=float)
    sub.add_argument("--epochs", type=int)
    sub.add_argument("--l2", type=float)
    sub.add_argument("--batch-size", type=int)


def _series_opts(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--series", help="series.csv from `index`")
    sub.add_argument("--prices", help="prices CSV: date,open,close")
    sub.add_argument("--calendar", help="optional calendar CSV for gap detection")
    sub.add_argument("--returns", choices=("log", "pct"))
    sub.add_argument("--duration", choices=DURATIONS)
    sub.add_argument("--by-year", dest="by_year", action="store_true", default=None)
    sub.add_argument("--pooled", dest="by_year", action="store_false", help="one pooled fit instead of per year")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="entsent", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"entsent {__version__}")
    p.add_argument("--config", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--timezone", default=None)
    p.add_argument("-v", "--verbose", action="store_true")
    subs = p.add_subparsers(dest="command", required=True)

    s = subs.add_parser("recognize", help="find entities and write Target/Other instances")
    _common(s)
    s.add_argument("--db", help="entity database (.json or symbol,phrase .csv)")
    s.add_argument("--headlines", help="headlines CSV: id,headline[,timestamp][,labels]")
    s.set_defaults(func=cmd_recognize)

    s = subs.add_parser("train", help="fit a model on all labelled instances")
    _common(s)
    _train_opts(s)
    s.set_defaults(func=cmd_train)

    s = subs.add_parser("eval", help="repeated random split evaluation")
    _common(s)
    _train_opts(s)
    s.add_argument("--splits", type=int)
    s.add_argument("--train-frac", type=float)
    s.set_defaults(func=cmd_eval)

    s = subs.add_parser("score", help="predict per-entity sentiment events for timestamped headlines")
    _common(s)
    s.add_argument("--model")
    s.add_argument("--db")
    s.add_argument("--lexicon", nargs="+")
    s.add_argument("--headlines")
    s.set_defaults(func=cmd_score)

    s = subs.add_parser("index", help="bucket events into daily market / after-market series")
    _common(s)
    s.add_argument("--events")
    s.add_argument("--calendar")
    s.add_argument("--constituency", help="JSON {year: [symbols]}")
    s.add_argument("--policy", choices=("skip", "zero"))
    s.add_argument("--ma-window", type=int, help="add trailing moving-average columns (0 = off)")
    s.add_argument("--session-open")
    s.add_argument("--session-close")
    s.set_defaults(func=cmd_index)

    s = subs.add_parser("regress", help="per-year after-market return regressions")
    _common(s)
    _series_opts(s)
    s.add_argument("--measure", help="comma list of s1,s2 (default both)")
    s.add_argument("--min-obs", type=int)
    s.add_argument("--session-open")
    s.add_argument("--session-close")
    s.set_defaults(func=cmd_regress)

    s = subs.add_parser("var", help="VAR(p1,p2) lag scan ranked by BIC")
    _common(s)
    _series_opts(s)
    s.add_argument("--measure", choices=("s1", "s2"))
    s.add_argument("--p1-max", type=int)
    s.add_argument("--p2-max", type=int)
    s.add_argument("--alpha", type=float)
    s.add_argument("--session-open")
    s.add_argument("--session-close")
    s.set_defaults(func=cmd_var)
    return p


def _resolve(args: argparse.Namespace) -> argparse.Namespace:
    config = {}
    if args.config:
        path = Path(args.config)
        if not path.is_file():
            raise CLIError(f"--config: file not found: {path}")
        try:
            config = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise CLIError(f"--config: {path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
        config = {k.replace("-", "_"): v for k, v in config.items()}
    for key, default in DEFAULTS.items():
        if getattr(args, key, None) is None:
            setattr(args, key, config.get(key, default))
    for key, value in config.items():
        if getattr(args, key, None) is None:
            setattr(args, key, value)
    return args


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        args = _resolve(args)
        return args.func(args)
    except CLIError as exc:
        print(f"entsent {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"entsent {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
