"""
Tick-data replay: realized returns, sliding-window dominance ratios,
empirical plug-in models and buy-and-hold gap curves.

Tick files are ``timestamp,price`` CSV with an optional header line. Timestamps are
seconds (fractions allowed) and must not decrease; prices must be positive.
Repeated prices are kept as zero returns.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from . import _rng
from .bounds import buyhold_gap_bounds, improved_gap_bounds
from .elg import DEFAULT_TOL, elg_from_outcomes, elg_mc, find_dominant, maximize_outcomes
from .model import (
    DEFAULT_BUDGET,
    BudgetExceeded,
    ModelError,
    ReturnModel,
    as_weights,
    compound_outcomes,
)

RISKY = 1


class TickFormatError(ValueError):
    """Unparseable tick file row."""


class TickDataError(ValueError):
    """Tick values violate positivity or ordering."""


@dataclass(frozen=True, eq=False)
class TickSeries:
    timestamps: np.ndarray
    prices: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.timestamps, dtype=float)
        p = np.asarray(self.prices, dtype=float)
        if t.shape != p.shape or t.ndim != 1:
            raise TickDataError("timestamps and prices must be equal-length vectors")
        if np.any(~(p > 0)):
            raise TickDataError(f"nonpositive price at tick {int(np.argmin(p > 0))}")
        if np.any(np.diff(t) < 0):
            raise TickDataError(f"decreasing timestamp at tick {int(np.argmax(np.diff(t) < 0)) + 1}")
        object.__setattr__(self, "timestamps", t)
        object.__setattr__(self, "prices", p)

    @property
    def tick_count(self) -> int:
        return self.prices.size


def _parse_row(row, lineno):
    if len(row) != 2:
        raise TickFormatError(f"line {lineno}: expected 2 fields, got {len(row)}")
    try:
        return float(row[0]), float(row[1])
    except ValueError:
        raise TickFormatError(f"line {lineno}: non-numeric field in {row!r}") from None


def load_ticks(path) -> TickSeries:
    """Read a ``timestamp,price`` file, keeping row order.

    The first line is skipped as a header when it is not numeric.
    """
    times, prices = [], []
    last_t = -math.inf
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not f.strip() for f in row):
                continue
            if lineno == 1:
                try:
                    float(row[0])
                except ValueError:
                    continue
            t, p = _parse_row(row, lineno)
            if not p > 0:
                raise TickDataError(f"line {lineno}: nonpositive price {p!r}")
            if not math.isfinite(t) or not math.isfinite(p):
                raise TickDataError(f"line {lineno}: non-finite value")
            if t < last_t:
                raise TickDataError(f"line {lineno}: timestamp {t!r} before {last_t!r}")
            last_t = t
            times.append(t)
            prices.append(p)
    return TickSeries(np.array(times), np.array(prices))


def write_ticks(ticks: TickSeries, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("timestamp,price\n")
        for t, p in zip(ticks.timestamps.tolist(), ticks.prices.tolist()):
            fh.write(f"{t:.17g},{p:.17g}\n")


def synthetic_ticks(n_ticks: int, log_mean: float = 1e-8, log_vol: float = 5e-5, seed: int = 0,
                    start_price: float = 100.0, dt: float = 0.1) -> TickSeries:
    """Geometric random walk whose per-tick log returns have sample mean
    ``log_mean`` and sample standard deviation ``log_vol`` exactly.

    Standardizing the draws pins the realized drift, so whether the stock
    dominates cash depends on ``log_mean`` against ``log_vol**2 / 2`` rather
    than on sampling luck.
    """
    if n_ticks < 2:
        raise ValueError("need at least 2 ticks")
    z = _rng.stream(seed, 0).standard_normal(n_ticks - 1)
    z = (z - z.mean()) / z.std()
    logret = log_mean + log_vol * z
    prices = start_price * np.exp(np.concatenate([[0.0], np.cumsum(logret)]))
    return TickSeries(dt * np.arange(n_ticks), prices)


def realized_returns(ticks: TickSeries) -> np.ndarray:
    """``x(k) = (s(k+1) - s(k)) / s(k)``."""
    if ticks.tick_count < 2:
        raise ValueError("need at least 2 ticks for a return")
    p = ticks.prices
    return (p[1:] - p[:-1]) / p[:-1]


def realized_compound(x, n: int) -> np.ndarray:
    """Compound returns over consecutive non-overlapping blocks of ``n``; a
    trailing partial block is dropped."""
    if int(n) != n or n < 1:
        raise ValueError(f"block length must be an integer >= 1, got {n}")
    x = np.asarray(x, dtype=float)
    if n == 1:
        return x.copy()
    blocks = x.size // n
    return np.prod(1.0 + x[: blocks * n].reshape(blocks, n), axis=1) - 1.0


@dataclass(frozen=True, eq=False)
class DominanceSeries:
    """Trailing-window dominance ratios for stock versus cash.

    ``asset_ratio[i]`` and ``cash_ratio[i]`` belong to return index
    ``k = start_index + i``.
    """

    window: int
    r: float
    asset_ratio: np.ndarray
    cash_ratio: np.ndarray
    start_index: int

    @property
    def index(self) -> np.ndarray:
        return np.arange(self.start_index, self.start_index + self.asset_ratio.size)

    @property
    def asset_dominant(self) -> np.ndarray:
        return self.asset_ratio <= 1.0

    @property
    def cash_dominant(self) -> np.ndarray:
        return self.cash_ratio <= 1.0

    def fractions(self) -> dict:
        a, c = self.asset_dominant, self.cash_dominant
        return {
            "asset": float(a.mean()),
            "cash": float(c.mean()),
            "neither": float((~a & ~c).mean()),
        }

    def rows(self) -> list[dict]:
        return [
            {"k": k, "asset_ratio": a, "cash_ratio": c,
             "asset_dominant": int(a <= 1.0), "cash_dominant": int(c <= 1.0)}
            for k, a, c in zip(self.index.tolist(), self.asset_ratio.tolist(), self.cash_ratio.tolist())
        ]


def sliding_dominance(x, r: float = 0.0, M: int = 1000) -> DominanceSeries:
    """Window means of ``(1+r)/(1+x)`` and ``(1+x)/(1+r)`` over the last ``M`` returns."""
    x = np.asarray(x, dtype=float)
    if int(M) != M or M < 1:
        raise ValueError(f"window must be an integer >= 1, got {M}")
    if x.size < M:
        raise ValueError(f"series of length {x.size} is shorter than window {M}")
    g = 1.0 + x
    asset = sliding_window_view((1.0 + r) / g, M).mean(axis=1)
    cash = sliding_window_view(g / (1.0 + r), M).mean(axis=1)
    return DominanceSeries(int(M), float(r), asset, cash, int(M) - 1)


def empirical_model(x, r: float = 0.0) -> ReturnModel:
    """Cash at rate ``r`` plus a stock whose atoms are the observed returns,
    each with probability ``1/len(x)``."""
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        raise ValueError("empty return series")
    return ReturnModel.cash_and_risky(x, np.full(x.size, 1.0 / x.size), r)


@dataclass(frozen=True)
class GapRow:
    n: int
    k2: float
    g1_star: float
    g_n: float
    gap: float
    method: str
    std_error: float
    baseline_lower: float | None
    baseline_upper: float | None
    improved_upper: float | None
    improved_method: str | None
    realized_gap: float | None

    COLUMNS = ("n", "k2", "g1_star", "g_n", "gap", "method", "std_error", "baseline_lower",
               "baseline_upper", "improved_upper", "improved_method", "realized_gap")

    def to_dict(self) -> dict:
        return {c: getattr(self, c) for c in self.COLUMNS}


def _realized_growth(x, r, K, n):
    chi = realized_compound(x, n)
    if chi.size == 0:
        return None
    wealth = K[0] * (1.0 + r) ** n + K[1] * (1.0 + chi)
    return float(np.mean(np.log(wealth))) / n


def empirical_gap_curve(x, r: float, K, n_grid, samples: int = 10**4, seed: int = 0,
                        budget: int = DEFAULT_BUDGET, tol: float = DEFAULT_TOL,
                        model: ReturnModel | None = None, g1_star: float | None = None) -> list[GapRow]:
    """Buy-and-hold shortfall ``g_1* - g_n(K)`` on the empirical model, per ``n``.

    ``g_n(K)`` is exact while ``len(x)**n <= budget`` and Monte Carlo
    (``samples``, ``seed``, weighted log returns as control variate) beyond. Bound columns are filled only when the
    stock is dominant at zero tolerance, using ``K_2`` as the dominant
    weight. ``realized_gap`` replays non-overlapping ``n``-blocks of the
    observed series instead of the model.

    ``model`` and ``g1_star`` may be passed to reuse work across weights.
    """
    x = np.asarray(x, dtype=float)
    K = as_weights(K, 2)
    k2 = K[RISKY]
    if not k2 > 0:
        raise ModelError("stock weight K_2 must be positive")
    n_grid = list(n_grid)
    if not n_grid:
        raise ValueError("empty n grid")
    if model is None:
        model = empirical_model(x, r)
    if g1_star is None:
        g1_star = maximize_outcomes(compound_outcomes(model, 1, budget), tol).value
    dominant = find_dominant(model).attractive_over(RISKY).all()

    rows = []
    for n in n_grid:
        try:
            est = elg_from_outcomes(compound_outcomes(model, n, budget), K)
        except BudgetExceeded:
            est = elg_mc(model, K, n, samples, seed, control=K.weights)
        lower = upper = improved = improved_method = None
        if dominant:
            base = buyhold_gap_bounds(k2, n)
            lower, upper = base.lower, base.upper
            imp = improved_gap_bounds(model, K, RISKY, n, budget, samples, seed)
            improved, improved_method = imp.upper, imp.method
        realized = _realized_growth(x, r, K.weights, n)
        rows.append(GapRow(
            n=int(n), k2=k2, g1_star=g1_star, g_n=est.value, gap=g1_star - est.value,
            method=est.method, std_error=est.std_error,
            baseline_lower=lower, baseline_upper=upper,
            improved_upper=improved, improved_method=improved_method,
            realized_gap=None if realized is None else g1_star - realized,
        ))
    return rows

