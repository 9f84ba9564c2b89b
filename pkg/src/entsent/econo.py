"""After-market returns, OLS with classical inference, and single-equation VAR lag scans."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.linalg import solve_triangular
from scipy.special import betainc

# (threshold, marker), strictest first
HYPOTHESIS_STARS = ((0.01, "***"), (0.05, "**"), (0.1, "*"))
VAR_STARS = ((0.001, "***"), (0.01, "**"), (0.05, "*"), (0.1, "+"))


class RegressionError(ValueError):
    pass


@dataclass(frozen=True)
class PriceBar:
    trading_day: date
    open: float
    close: float

    def __post_init__(self):
        if not (self.open > 0 and self.close > 0):
            raise ValueError(f"{self.trading_day}: prices must be positive")


def read_prices(path: str | Path) -> list[PriceBar]:
    bars = []
    with open(path, encoding="utf-8-sig", newline="") as fh:
        reader = csv.DictReader(fh)
        missing = {"date", "open", "close"} - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"{path}: missing columns {sorted(missing)}")
        for lineno, row in enumerate(reader, start=2):
            try:
                bars.append(PriceBar(date.fromisoformat(row["date"].strip()), float(row["open"]), float(row["close"])))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
    bars.sort(key=lambda b: b.trading_day)
    for a, b in zip(bars, bars[1:]):
        if a.trading_day == b.trading_day:
            raise ValueError(f"{path}: duplicate day {a.trading_day}")
    return bars


def after_market_log_return(close_today: float, open_next: float) -> float:
    return math.log(open_next) - math.log(close_today)


def after_market_pct_return(close_today: float, open_next: float) -> float:
    return (open_next - close_today) / close_today


def after_market_returns(
    bars: Sequence[PriceBar], kind: str = "log", next_day=None
) -> tuple[list[tuple[date, float]], list[date]]:
    """Return ``(values, gaps)`` with one value per day whose next trading day is present.

    Bars are taken as consecutive trading days unless ``next_day`` (a
    callable such as ``TradingCalendar.next_day``) says otherwise.
    """
    fn = {"log": after_market_log_return, "pct": after_market_pct_return}[kind]
    bars = sorted(bars, key=lambda b: b.trading_day)
    values, gaps = [], []
    for i, bar in enumerate(bars):
        nxt = bars[i + 1] if i + 1 < len(bars) else None
        if nxt is None or (next_day is not None and next_day(bar.trading_day) != nxt.trading_day):
            gaps.append(bar.trading_day)
            continue
        values.append((bar.trading_day, fn(bar.close, nxt.open)))
    return values, gaps


def t_sf_two_sided(t: float, df: float) -> float:
    """P(|T| > |t|) for Student's t with ``df`` degrees of freedom."""
    if math.isnan(t):
        return math.nan
    if math.isinf(t):
        return 0.0
    return float(betainc(df / 2.0, 0.5, df / (df + t * t)))


def stars(p: float, levels=HYPOTHESIS_STARS) -> str:
    for threshold, mark in levels:
        if p < threshold:
            return mark
    return ""


@dataclass
class RegressionResult:
    names: list[str]
    coef: np.ndarray
    se: np.ndarray
    tstat: np.ndarray
    pvalue: np.ndarray
    r_squared: float
    n: int
    resid: np.ndarray
    rss: float
    bic: float
    df_resid: int
    intercept: bool
    meta: dict = field(default_factory=dict)

    def __getitem__(self, name: str) -> float:
        return float(self.coef[self.names.index(name)])

    def p(self, name: str) -> float:
        return float(self.pvalue[self.names.index(name)])

    def se_of(self, name: str) -> float:
        return float(self.se[self.names.index(name)])

    def to_json(self, levels=HYPOTHESIS_STARS) -> dict:
        return {
            "n": self.n,
            "df_resid": self.df_resid,
            "r_squared": self.r_squared,
            "bic": self.bic,
            "rss": self.rss,
            "coefficients": [
                {
                    "name": name,
                    "coef": float(c),
                    "se": float(s),
                    "t": float(t),
                    "p": float(p),
                    "stars": stars(p, levels),
                }
                for name, c, s, t, p in zip(self.names, self.coef, self.se, self.tstat, self.pvalue)
            ],
            **self.meta,
        }


def bic(rss: float, n: int, k: int) -> float:
    """Gaussian BIC counting ``k`` coefficients plus the error variance."""
    return n * math.log(rss / n) + (k + 1) * math.log(n) + n * (1.0 + math.log(2.0 * math.pi))


def _check_rank(X: np.ndarray, names: Sequence[str]) -> None:
    scale = np.linalg.norm(X, axis=0)
    scale[scale == 0] = 1.0
    Xs = X / scale
    rank = 0
    for j in range(X.shape[1]):
        r = np.linalg.matrix_rank(Xs[:, : j + 1])
        if r == rank:
            raise RegressionError(f"design is rank deficient: column {names[j]!r} is collinear with earlier columns")
        rank = r


def ols(y, X, intercept: bool = True, names: Sequence[str] | None = None) -> RegressionResult:
    """Least squares with homoskedastic standard errors and two-sided t tests."""
    y = np.asarray(y, dtype=np.float64).ravel()
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    n = len(y)
    if X.shape[0] != n:
        raise RegressionError("y and X have different lengths")
    names = list(names) if names is not None else [f"x{j + 1}" for j in range(X.shape[1])]
    if intercept:
        X = np.column_stack([np.ones(n), X])
        names = ["const"] + names
    k = X.shape[1]
    if k == 0:
        raise RegressionError("empty design")
    if n <= k:
        raise RegressionError(f"need more observations ({n}) than parameters ({k})")
    _check_rank(X, names)

    Q, R = np.linalg.qr(X)
    coef = solve_triangular(R, Q.T @ y)
    resid = y - X @ coef
    rss = float(resid @ resid)
    df = n - k
    sigma2 = rss / df
    Rinv = solve_triangular(R, np.eye(k))
    cov = sigma2 * (Rinv @ Rinv.T)
    se = np.sqrt(np.diag(cov))
    with np.errstate(divide="ignore", invalid="ignore"):
        tstat = np.where(se > 0, coef / se, np.sign(coef) * np.inf)
    pvalue = np.array([t_sf_two_sided(t, df) for t in tstat])
    if intercept:
        tss = float(np.sum((y - y.mean()) ** 2))
    else:
        tss = float(y @ y)
    r2 = 1.0 - rss / tss if tss > 0 else 1.0
    return RegressionResult(
        names=names,
        coef=coef,
        se=se,
        tstat=tstat,
        pvalue=pvalue,
        r_squared=r2,
        n=n,
        resid=resid,
        rss=rss,
        bic=bic(max(rss, np.finfo(float).tiny), n, k),
        df_resid=df,
        intercept=intercept,
    )


def align(
    left: Iterable[tuple[date, float]] | Mapping[date, float],
    right: Iterable[tuple[date, float]] | Mapping[date, float],
) -> tuple[list[date], np.ndarray, np.ndarray]:
    """Inner join of two dated series, dropping NaNs."""
    a = dict(left.items() if isinstance(left, Mapping) else left)
    b = dict(right.items() if isinstance(right, Mapping) else right)
    days = sorted(d for d in a.keys() & b.keys() if not (math.isnan(a[d]) or math.isnan(b[d])))
    return days, np.array([a[d] for d in days]), np.array([b[d] for d in days])


def hypothesis_test(returns, sentiment, min_obs: int = 30, measure: str = "s") -> RegressionResult:
    """Fit ``d_i = alpha + beta * s_i + e`` on days present in both series."""
    days, d, s = align(returns, sentiment)
    if len(days) < min_obs:
        raise RegressionError(f"only {len(days)} aligned days; at least {min_obs} required")
    res = ols(d, s, intercept=True, names=[measure])
    res.meta.update({"start": days[0].isoformat(), "end": days[-1].isoformat()})
    return res


@dataclass(frozen=True)
class VarSpec:
    p1: int
    p2: int

    def __post_init__(self):
        if self.p1 < 0 or self.p2 < 0 or self.p1 + self.p2 < 1:
            raise ValueError("need p1, p2 >= 0 and p1 + p2 >= 1")

    @property
    def max_lag(self) -> int:
        return max(self.p1, self.p2)

    def __str__(self) -> str:
        return f"({self.p1},{self.p2})"


def lag_names(spec: VarSpec) -> list[str]:
    return [f"d_t-{j}" for j in range(1, spec.p1 + 1)] + [f"s_t-{j}" for j in range(1, spec.p2 + 1)]


def var_fit(d, s, spec: VarSpec, *, intercept: bool = True, start: int | None = None) -> RegressionResult:
    """Regress ``d(t)`` on ``d(t-1..p1)`` and ``s(t-1..p2)``.

    ``start`` is the first usable row; it defaults to the spec's own max lag
    and is raised to a common value when several specs must share a sample.
    """
    d = np.asarray(d, dtype=np.float64)
    s = np.asarray(s, dtype=np.float64)
    if len(d) != len(s):
        raise RegressionError("d and s must be aligned and equally long")
    start = spec.max_lag if start is None else start
    if start < spec.max_lag:
        raise RegressionError("start must be at least the largest lag")
    n = len(d)
    if n <= spec.max_lag + spec.p1 + spec.p2 + 2 or n - start <= spec.p1 + spec.p2 + int(intercept):
        raise RegressionError(f"series of length {n} is too short for VAR{spec}")
    rows = np.arange(start, n)
    cols = [d[rows - j] for j in range(1, spec.p1 + 1)] + [s[rows - j] for j in range(1, spec.p2 + 1)]
    res = ols(d[rows], np.column_stack(cols), intercept=intercept, names=lag_names(spec))
    res.meta.update({"p1": spec.p1, "p2": spec.p2})
    return res


@dataclass
class VarScanEntry:
    spec: VarSpec
    result: RegressionResult
    significant: bool
    rank: int = 0


def var_scan(d, s, p1_max: int = 3, p2_max: int = 3, *, alpha: float = 0.1, intercept: bool = True) -> list[VarScanEntry]:
    """Fit every VAR(p1, p2) with p1 + p2 >= 1 on one common sample, ranked by BIC.

    A spec is flagged when at least one lag regressor has p < ``alpha``.
    """
    common = max(p1_max, p2_max)
    entries = []
    for p1 in range(p1_max + 1):
        for p2 in range(p2_max + 1):
            if p1 + p2 == 0:
                continue
            spec = VarSpec(p1, p2)
            res = var_fit(d, s, spec, intercept=intercept, start=common)
            lagp = [p for name, p in zip(res.names, res.pvalue) if name != "const"]
            entries.append(VarScanEntry(spec, res, any(p < alpha for p in lagp)))
    entries.sort(key=lambda e: (e.result.bic, e.spec.p1 + e.spec.p2, e.spec.p1))
    for i, e in enumerate(entries, start=1):
        e.rank = i
    return entries
