"""Daily sentiment index from timestamped entity-sentiment events.

Each trading day ``i`` owns two windows: MARKET ``[open_i, close_i)`` and
AFTER_MARKET ``[close_i, open_{i+1})``. Weekends and holidays fall inside
the after-market window of the preceding trading day.
"""

from __future__ import annotations

import bisect
import csv
import math
from collections import Counter
from dataclasses import dataclass, field
from datetime import date, datetime, time, timedelta
from pathlib import Path
from typing import Iterable, Mapping, Sequence
from zoneinfo import ZoneInfo

from .gazetteer import LABELS

MARKET = "MARKET"
AFTER_MARKET = "AFTER_MARKET"
DURATIONS = (MARKET, AFTER_MARKET)

DEFAULT_TZ = "Asia/Kolkata"
DEFAULT_OPEN = time(9, 30)
DEFAULT_CLOSE = time(15, 30)


class UndefinedScore(ZeroDivisionError):
    """The score's denominator is zero."""


class CalendarError(ValueError):
    pass


def s1(pos: int, neg: int) -> float:
    """(pos - neg) / (pos + neg)."""
    if pos + neg == 0:
        raise UndefinedScore("s1 is undefined with no positive or negative events")
    return (pos - neg) / (pos + neg)


def s2(pos: int, neu: int, neg: int) -> float:
    """(pos - neg) / (pos + neu + neg); neutral events damp the score."""
    if pos + neu + neg == 0:
        raise UndefinedScore("s2 is undefined with no events")
    return (pos - neg) / (pos + neu + neg)


@dataclass(frozen=True)
class SentimentEvent:
    timestamp: datetime
    symbol: str
    label: str
    id: str = ""

    def __post_init__(self):
        if self.label not in LABELS:
            raise ValueError(f"unknown sentiment label {self.label!r}")
        if self.timestamp.tzinfo is None:
            raise ValueError("event timestamps must be timezone-aware")


def parse_timestamp(text: str, tz: ZoneInfo | str = DEFAULT_TZ) -> datetime:
    """ISO 8601 parse; naive values are taken to be in ``tz``."""
    if isinstance(tz, str):
        tz = ZoneInfo(tz)
    text = text.strip()
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    ts = datetime.fromisoformat(text)
    return ts.replace(tzinfo=tz) if ts.tzinfo is None else ts


class TradingCalendar:
    """Trading days with per-day session open/close in one exchange timezone."""

    def __init__(
        self,
        days: Iterable[date],
        *,
        open_time: time = DEFAULT_OPEN,
        close_time: time = DEFAULT_CLOSE,
        overrides: Mapping[date, tuple[time | None, time | None]] | None = None,
        tz: str = DEFAULT_TZ,
    ):
        self.days: list[date] = sorted(set(days))
        if not self.days:
            raise CalendarError("calendar has no trading days")
        self.tz = ZoneInfo(tz)
        self.tz_name = tz
        overrides = dict(overrides or {})
        self._opens: list[datetime] = []
        self._closes: list[datetime] = []
        for d in self.days:
            o, c = overrides.get(d, (None, None))
            o_dt = datetime.combine(d, o or open_time, self.tz)
            c_dt = datetime.combine(d, c or close_time, self.tz)
            if not o_dt < c_dt:
                raise CalendarError(f"{d}: session open must precede close")
            if self._closes and o_dt < self._closes[-1]:
                raise CalendarError(f"{d}: session overlaps the previous one")
            self._opens.append(o_dt)
            self._closes.append(c_dt)
        self._index = {d: i for i, d in enumerate(self.days)}

    @classmethod
    def weekdays(cls, start: date, end: date, holidays: Iterable[date] = (), **kw) -> TradingCalendar:
        skip = set(holidays)
        days = []
        d = start
        while d <= end:
            if d.weekday() < 5 and d not in skip:
                days.append(d)
            d += timedelta(days=1)
        return cls(days, **kw)

    @classmethod
    def from_csv(cls, path: str | Path, **kw) -> TradingCalendar:
        """Rows of ``date[,open,close]``; blank open/close use the defaults."""
        days, overrides = [], {}
        with open(path, encoding="utf-8-sig", newline="") as fh:
            reader = csv.DictReader(fh)
            if not reader.fieldnames or "date" not in reader.fieldnames:
                raise CalendarError(f"{path}: missing 'date' column")
            for lineno, row in enumerate(reader, start=2):
                try:
                    d = date.fromisoformat(row["date"].strip())
                    o = (row.get("open") or "").strip()
                    c = (row.get("close") or "").strip()
                    days.append(d)
                    if o or c:
                        overrides[d] = (time.fromisoformat(o) if o else None, time.fromisoformat(c) if c else None)
                except ValueError as exc:
                    raise CalendarError(f"{path}:{lineno}: {exc}") from None
        return cls(days, overrides=overrides, **kw)

    def __len__(self) -> int:
        return len(self.days)

    def session(self, day: date) -> tuple[datetime, datetime]:
        i = self._index[day]
        return self._opens[i], self._closes[i]

    def next_day(self, day: date) -> date | None:
        i = self._index[day] + 1
        return self.days[i] if i < len(self.days) else None

    def windows(self) -> list[tuple[datetime, datetime, date, str]]:
        """All (start, end, day, duration) windows in time order.

        The last day has no after-market window because the next open is
        unknown.
        """
        out = []
        for i, d in enumerate(self.days):
            out.append((self._opens[i], self._closes[i], d, MARKET))
            if i + 1 < len(self.days):
                out.append((self._closes[i], self._opens[i + 1], d, AFTER_MARKET))
        return out

    def assign(self, ts: datetime) -> tuple[date, str]:
        """(trading day, duration) that owns instant ``ts``."""
        if ts.tzinfo is None:
            ts = ts.replace(tzinfo=self.tz)
        i = bisect.bisect_right(self._opens, ts) - 1
        if i < 0:
            raise CalendarError(f"event at {ts.isoformat()} precedes the calendar start {self._opens[0].isoformat()}")
        if ts < self._closes[i]:
            return self.days[i], MARKET
        if i + 1 >= len(self.days):
            raise CalendarError(
                f"event at {ts.isoformat()} is after the final session close; extend the calendar"
            )
        return self.days[i], AFTER_MARKET


@dataclass(frozen=True)
class SeriesPoint:
    day: date
    pos: int
    neu: int
    neg: int
    s1: float  # nan when undefined
    s2: float

    @property
    def total(self) -> int:
        return self.pos + self.neu + self.neg


@dataclass
class SentimentSeries:
    duration: str
    points: list[SeriesPoint] = field(default_factory=list)

    def values(self, measure: str = "s1") -> list[tuple[date, float]]:
        return [(p.day, getattr(p, measure)) for p in self.points if not math.isnan(getattr(p, measure))]

    def days(self) -> list[date]:
        return [p.day for p in self.points]


@dataclass
class BucketResult:
    series: dict[str, SentimentSeries]
    counts: dict[tuple[date, str], Counter]
    excluded: Counter = field(default_factory=Counter)

    @property
    def n_included(self) -> int:
        return sum(sum(c.values()) for c in self.counts.values())


def bucket_series(
    events: Iterable[SentimentEvent],
    calendar: TradingCalendar,
    constituency: Mapping[int, set[str]] | None = None,
    policy: str = "skip",
) -> BucketResult:
    """Count events per (trading day, duration) and score each bucket.

    ``constituency`` maps a year to the symbols that count in that year;
    other symbols are tallied in ``excluded``. With ``policy="skip"`` days
    whose bucket is empty are left out and undefined scores are NaN; with
    ``policy="zero"`` every trading day appears and undefined scores are 0.
    """
    if policy not in ("skip", "zero"):
        raise ValueError("policy must be 'skip' or 'zero'")
    counts: dict[tuple[date, str], Counter] = {}
    excluded: Counter = Counter()
    for ev in sorted(events, key=lambda e: (e.timestamp, e.symbol, e.id)):
        day, duration = calendar.assign(ev.timestamp)
        if constituency is not None and ev.symbol not in constituency.get(day.year, ()):
            excluded[ev.symbol] += 1
            continue
        counts.setdefault((day, duration), Counter())[ev.label] += 1

    series = {}
    for duration in DURATIONS:
        days = calendar.days if duration == MARKET else calendar.days[:-1]
        points = []
        for d in days:
            c = counts.get((d, duration))
            if c is None and policy == "skip":
                continue
            c = c or Counter()
            pos, neu, neg = c["positive"], c["neutral"], c["negative"]
            fill = 0.0 if policy == "zero" else math.nan
            points.append(
                SeriesPoint(
                    d, pos, neu, neg,
                    s1(pos, neg) if pos + neg else fill,
                    s2(pos, neu, neg) if pos + neu + neg else fill,
                )
            )
        series[duration] = SentimentSeries(duration, points)
    return BucketResult(series, counts, excluded)


def moving_average(series: Sequence[tuple[date, float]], window: int = 30) -> list[tuple[date, float]]:
    """Trailing mean over the last ``window`` points; the first ``window-1`` days are omitted."""
    if window < 1:
        raise ValueError("window must be >= 1")
    vals = [v for _, v in series]
    return [
        (d, math.fsum(vals[i + 1 - window:i + 1]) / window)
        for i, (d, _) in enumerate(series)
        if i + 1 >= window
    ]


EVENT_FIELDS = ("id", "timestamp", "symbol", "label")
SERIES_FIELDS = ("date", "duration", "pos", "neu", "neg", "s1", "s2")


def read_events(path: str | Path, tz: str = DEFAULT_TZ) -> list[SentimentEvent]:
    zone = ZoneInfo(tz)
    events = []
    with open(path, encoding="utf-8-sig", newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(EVENT_FIELDS[1:]) - set(reader.fieldnames or ())
        if reader.fieldnames and missing:
            raise ValueError(f"{path}: missing columns {sorted(missing)}")
        for lineno, row in enumerate(reader, start=2):
            try:
                events.append(
                    SentimentEvent(
                        parse_timestamp(row["timestamp"], zone),
                        row["symbol"].strip(),
                        row["label"].strip(),
                        (row.get("id") or "").strip(),
                    )
                )
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
    return events


def _fmt(x: float) -> str:
    return "" if math.isnan(x) else repr(float(x))


def write_series(path: str | Path, result: BucketResult, ma_window: int = 0) -> int:
    """Write both durations as long-format CSV; returns the row count."""
    fields = list(SERIES_FIELDS) + (["s1_ma", "s2_ma"] if ma_window else [])
    rows = 0
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(fields)
        for duration in DURATIONS:
            ser = result.series[duration]
            ma = {}
            if ma_window:
                for m in ("s1", "s2"):
                    ma[m] = dict(moving_average(ser.values(m), ma_window))
            for p in ser.points:
                row = [p.day.isoformat(), duration, p.pos, p.neu, p.neg, _fmt(p.s1), _fmt(p.s2)]
                if ma_window:
                    row += [_fmt(ma[m].get(p.day, math.nan)) for m in ("s1", "s2")]
                w.writerow(row)
                rows += 1
    return rows


def read_series(path: str | Path, duration: str = AFTER_MARKET, measure: str = "s1") -> list[tuple[date, float]]:
    """(day, score) pairs for one duration; blank scores are skipped."""
    out = []
    with open(path, encoding="utf-8-sig", newline="") as fh:
        reader = csv.DictReader(fh)
        need = {"date", "duration", measure}
        if not need <= set(reader.fieldnames or ()):
            raise ValueError(f"{path}: expected columns {sorted(need)}")
        for lineno, row in enumerate(reader, start=2):
            if row["duration"] != duration or not row[measure].strip():
                continue
            try:
                out.append((date.fromisoformat(row["date"]), float(row[measure])))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
    out.sort()
    return out
