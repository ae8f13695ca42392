"""
Expected log growth of a buy-and-hold portfolio over rebalancing period n.

    g_n(K) = (1/n) E[log(K^T R_n)],   R_n,i = prod_{k<n} (1 + X_i(k))

evaluated exactly over the enumerated outcome set or by Monte Carlo, and
maximized over the unit simplex with an away-step Frank-Wolfe method whose
duality gap certifies the result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np
from scipy.optimize import brentq

from . import _rng
from .model import (
    DEFAULT_BUDGET,
    CompoundOutcomeSet,
    ModelError,
    ReturnModel,
    WeightVector,
    as_weights,
    compound_outcomes,
)

EXACT = "exact"
MONTE_CARLO = "monte_carlo"

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITERS = 10**5
MC_CHUNK = 1 << 15


@dataclass(frozen=True)
class ElgEstimate:
    value: float
    method: str
    horizon: int
    std_error: float = 0.0
    sample_count: int = 0
    seed: int | None = None

    def __post_init__(self):
        if self.method == EXACT:
            if self.std_error != 0 or self.sample_count != 0:
                raise ValueError("exact estimates carry no sampling error")
        elif self.method == MONTE_CARLO:
            if self.sample_count < 1 or not self.std_error >= 0:
                raise ValueError("Monte Carlo estimate needs samples and a std error")
        else:
            raise ValueError(f"unknown method {self.method!r}")


@dataclass(frozen=True, eq=False)
class DominanceReport:
    """Pairwise ratios ``E[(1+X_i)/(1+X_j)]`` and the dominant asset, if any."""

    ratio_matrix: np.ndarray
    dominant_index: int | None
    tolerance: float = 0.0

    def attractive_over(self, j: int) -> np.ndarray:
        """Boolean mask of assets ``i`` that ``j`` is at least as attractive as."""
        return self.ratio_matrix[:, j] <= 1.0 + self.tolerance


@dataclass(frozen=True, eq=False)
class OptimizationResult:
    weights: WeightVector
    value: float
    iterations: int
    gradient_gap: float
    horizon: int
    converged: bool = True
    tol: float = DEFAULT_TOL

    def to_dict(self) -> dict:
        return {
            "horizon": self.horizon,
            "weights": self.weights.tolist(),
            "value": self.value,
            "gradient_gap": self.gradient_gap,
            "iterations": self.iterations,
            "converged": self.converged,
            "tol": self.tol,
        }


# -- exact evaluation -------------------------------------------------------

def _log_growth(outcomes: CompoundOutcomeSet, K: np.ndarray) -> float:
    return float(outcomes.probabilities @ np.log(outcomes.totals @ K)) / outcomes.horizon


def elg_gradient(outcomes: CompoundOutcomeSet, K) -> np.ndarray:
    """Gradient of ``g_n`` at ``K``: ``(1/n) E[R_n / K^T R_n]``."""
    K = np.asarray(K, dtype=float)
    w = outcomes.totals @ K
    return (outcomes.probabilities / w) @ outcomes.totals / outcomes.horizon


def elg_from_outcomes(outcomes: CompoundOutcomeSet, K) -> ElgEstimate:
    """Exact ``g_n(K)`` over an already enumerated outcome set."""
    K = as_weights(K, outcomes.totals.shape[1])
    return ElgEstimate(_log_growth(outcomes, K.weights), EXACT, outcomes.horizon)


def elg_exact(model: ReturnModel, K, n: int = 1, budget: int = DEFAULT_BUDGET) -> ElgEstimate:
    """Exact ``g_n(K)`` by enumerating all ``s**n`` paths.

    Raises :class:`~elgfreq.model.BudgetExceeded` when ``s**n > budget``.
    """
    K = as_weights(K, model.m)
    return elg_from_outcomes(compound_outcomes(model, n, budget), K)


# -- Monte Carlo ------------------------------------------------------------

def sample_totals(model: ReturnModel, n: int, samples: int, seed: int) -> Iterator[np.ndarray]:
    """Yield total-return arrays for ``samples`` simulated ``n``-step paths.

    Samples are split into fixed chunks of ``MC_CHUNK``; chunk ``c`` is drawn
    from its own Philox stream keyed by ``(seed, c)`` so any chunk can be
    recomputed in isolation. Within a chunk, step ``t`` consumes one uniform
    per path.
    """
    if n < 1:
        raise ValueError(f"horizon must be >= 1, got {n}")
    cum = np.cumsum(model.probabilities)
    cum[-1] = 1.0
    gross = model.gross
    last = model.s - 1
    for c, start in enumerate(range(0, samples, MC_CHUNK)):
        count = min(MC_CHUNK, samples - start)
        rng = _rng.stream(seed, c)
        totals = np.ones((count, model.m))
        for _ in range(n):
            idx = np.searchsorted(cum, rng.random(count), side="right")
            np.minimum(idx, last, out=idx)
            totals *= gross[idx]
        yield totals


def mc_mean(values: np.ndarray) -> tuple[float, float]:
    """Sample mean and its standard error."""
    mean = float(values.mean())
    if values.size < 2:
        return mean, 0.0
    return mean, float(values.std(ddof=1) / math.sqrt(values.size))


def elg_mc(model: ReturnModel, K, n: int = 1, samples: int = 10**5, seed: int = 0,
           control=None) -> ElgEstimate:
    """Monte Carlo estimate of ``g_n(K)``; bit-reproducible for fixed inputs.

    ``control`` is an optional coefficient vector ``c`` (or an asset index,
    meaning a unit vector). Each sample then becomes
    ``(log K^T R - c . log R) / n`` plus the exact ``c . E[log(1 + X)]``,
    which keeps the estimator unbiased. ``control=K`` leaves only the gap
    between arithmetic and geometric weighted means, so the variance drops
    from order ``sigma**2`` to order ``sigma**4`` for small returns.
    """
    if samples < 2:
        raise ValueError(f"need at least 2 samples, got {samples}")
    K = as_weights(K, model.m).weights
    chunks = sample_totals(model, n, samples, seed)
    if control is None:
        values = np.concatenate([np.log(t @ K) for t in chunks]) / n
        mean, se = mc_mean(values)
    else:
        c = _control_vector(control, model.m)
        values = np.concatenate([np.log(t @ K) - np.log(t) @ c for t in chunks]) / n
        mean, se = mc_mean(values)
        mean += float(model.probabilities @ np.log(model.gross) @ c)
    return ElgEstimate(mean, MONTE_CARLO, n, se, samples, seed)


def _control_vector(control, m: int) -> np.ndarray:
    if isinstance(control, (int, np.integer)):
        if not 0 <= control < m:
            raise IndexError(f"control asset {control} out of range for {m} assets")
        c = np.zeros(m)
        c[control] = 1.0
        return c
    c = np.asarray(control, dtype=float)
    if c.shape != (m,):
        raise ValueError(f"control vector must have {m} entries")
    return c


# -- optimization -----------------------------------------------------------

def _line_search(probs, w, dw, gmax):
    """Maximize ``sum p log(w + gamma dw)`` over ``[0, gmax]``; concave in gamma."""

    def slope(gamma):
        return float(probs @ (dw / (w + gamma * dw)))

    if slope(gmax) >= 0:
        return gmax
    return brentq(slope, 0.0, gmax, xtol=1e-17, rtol=4 * np.finfo(float).eps, maxiter=200)


def maximize_outcomes(outcomes: CompoundOutcomeSet, tol: float = DEFAULT_TOL,
                      max_iters: int = DEFAULT_MAX_ITERS) -> OptimizationResult:
    """Away-step Frank-Wolfe over the simplex on an enumerated outcome set.

    Starts at the best vertex. Stops when the duality gap
    ``max_i grad_i - grad . K`` falls to ``tol``; for a concave objective the
    gap bounds ``g_n* - g_n(K)``. Linear-subproblem ties go to the lowest
    asset index.
    """
    probs, totals, n = outcomes.probabilities, outcomes.totals, outcomes.horizon
    m = totals.shape[1]
    vertex_values = probs @ np.log(totals)
    K = np.zeros(m)
    K[int(np.argmax(vertex_values))] = 1.0

    it = 0
    while True:
        w = totals @ K
        grad = (probs / w) @ totals
        s = int(np.argmax(grad))
        gk = float(grad @ K)
        gap = float(grad[s]) - gk
        if gap <= tol * n or it >= max_iters:
            break
        it += 1
        support = K > 0
        v = int(np.argmin(np.where(support, grad, np.inf)))
        away_gap = gk - float(grad[v])
        if gap >= away_gap:
            d = -K
            d[s] += 1.0
            gmax = 1.0
        else:
            d = K.copy()
            d[v] -= 1.0
            gmax = K[v] / (1.0 - K[v])
        gamma = _line_search(probs, w, totals @ d, gmax)
        K = K + gamma * d
        if gamma == gmax:
            if gap >= away_gap:
                K = np.zeros(m)
                K[s] = 1.0
            else:
                K[v] = 0.0
        np.maximum(K, 0.0, out=K)
        K /= K.sum()

    value = float(probs @ np.log(totals @ K)) / n
    gap = max(gap / n, 0.0)
    return OptimizationResult(WeightVector(K), value, it, gap, n, gap <= tol, tol)


def optimize_elg(model: ReturnModel, n: int = 1, tol: float = DEFAULT_TOL,
                 max_iters: int = DEFAULT_MAX_ITERS, budget: int = DEFAULT_BUDGET) -> OptimizationResult:
    """Certified maximizer of ``g_n`` over the unit simplex.

    The returned ``gradient_gap`` bounds ``g_n* - value``. When ``max_iters``
    runs out first the last (best) iterate is returned with
    ``converged=False``.
    """
    if tol <= 0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    return maximize_outcomes(compound_outcomes(model, n, budget), tol, max_iters)


# -- dominance --------------------------------------------------------------

def _check_index(model: ReturnModel, i: int) -> None:
    if not 0 <= i < model.m:
        raise IndexError(f"asset index {i} out of range for {model.m} assets")


def relative_attractiveness(model: ReturnModel, i: int, j: int) -> float:
    """``E[(1+X_i)/(1+X_j)]``; asset j is at least as attractive as i iff this is <= 1."""
    _check_index(model, i)
    _check_index(model, j)
    if i == j:
        return 1.0
    g = model.gross
    return float(model.probabilities @ (g[:, i] / g[:, j]))


def ratio_matrix(model: ReturnModel) -> np.ndarray:
    m = model.m
    out = np.ones((m, m))
    g, p = model.gross, model.probabilities
    for j in range(m):
        for i in range(m):
            if i != j:
                out[i, j] = p @ (g[:, i] / g[:, j])
    return out


def find_dominant(model: ReturnModel, tolerance: float = 0.0) -> DominanceReport:
    """Lowest-index asset relatively more attractive than every other, if one exists."""
    if tolerance < 0:
        raise ValueError(f"tolerance must be >= 0, got {tolerance}")
    R = ratio_matrix(model)
    R.setflags(write=False)
    dominant = None
    for j in range(model.m):
        if np.all(R[:, j] <= 1.0 + tolerance):
            dominant = j
            break
    return DominanceReport(R, dominant, tolerance)


# -- account dynamics -------------------------------------------------------

def account_value(V0: float, K, realized_returns: Sequence[Sequence[float]]) -> np.ndarray:
    """Buy-and-hold account value after each step, starting from ``V0``.

    ``trajectory[t] = V0 * (1 + K^T X_t)`` with ``X_t`` the compound return of
    the first ``t`` steps.
    """
    if not V0 > 0:
        raise ValueError(f"initial account value must be positive, got {V0}")
    x = np.asarray(realized_returns, dtype=float)
    K = as_weights(K).weights
    if x.size == 0:
        return np.array([float(V0)])
    x = np.atleast_2d(x)
    if x.shape[1] != K.size:
        raise ModelError(f"returns have {x.shape[1]} assets, weights {K.size}")
    if np.any(x <= -1.0):
        raise ModelError("return not > -1")
    totals = np.vstack([np.ones(K.size), np.cumprod(1.0 + x, axis=0)])
    return V0 * (totals @ K)
