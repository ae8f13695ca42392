"""
Buy-and-hold convergence bounds under a dominant asset.

With asset ``j`` dominant and weight ``K_j > 0`` on it, the shortfall of the
buy-and-hold growth rate against the best per-step rate,
``gap_n = g_1* - g_n(K)``, satisfies

    (1/n) (log(1/K_j) + 1 - 1/K_j)  <=  gap_n  <=  (1/n) log(1/K_j)

and, assuming high-frequency maximality,

    0  <=  gap_n  <=  (1/n) (log(1/K_j) - 1 + K_j E[R_n,j / K^T R_n]).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .elg import EXACT, MONTE_CARLO, mc_mean, sample_totals
from .model import DEFAULT_BUDGET, BudgetExceeded, ModelError, ReturnModel, as_weights, compound_outcomes

BASELINE = "baseline"
IMPROVED = "improved"
CLOSED_FORM = "closed_form"

# slack for the pointwise inequality K_j R_j <= K^T R after float rounding
_ROUNDING_SLACK = 1e-12


class NotDominantError(ValueError):
    """The asset passed as dominant fails the relative-attractiveness test."""


@dataclass(frozen=True)
class GapBounds:
    horizon: int
    k_j: float
    lower: float
    upper: float
    kind: str
    method: str = CLOSED_FORM
    std_error: float = 0.0

    @property
    def lower_tight(self) -> float:
        """Lower bound clipped at 0, which holds whenever asset j is dominant."""
        return max(self.lower, 0.0)

    def contains(self, gap: float, slack: float = 0.0) -> bool:
        return self.lower - slack <= gap <= self.upper + slack

    def to_dict(self) -> dict:
        return {
            "n": self.horizon,
            "k_j": self.k_j,
            "kind": self.kind,
            "lower": self.lower,
            "lower_tight": self.lower_tight,
            "upper": self.upper,
            "method": self.method,
            "std_error": self.std_error,
        }


@dataclass(frozen=True)
class RebalancePlan:
    epsilon: float
    k_j: float
    n_star: int

    def to_dict(self) -> dict:
        return {"epsilon": self.epsilon, "k_j": self.k_j, "n_star": self.n_star}


def _check_kj(k_j: float) -> float:
    k_j = float(k_j)
    if not 0.0 < k_j <= 1.0:
        raise ValueError(f"dominant-asset weight must lie in (0, 1], got {k_j}")
    return k_j


def _check_n(n: int) -> int:
    if int(n) != n or n < 1:
        raise ValueError(f"horizon must be an integer >= 1, got {n}")
    return int(n)


def buyhold_gap_bounds(k_j: float, n: int) -> GapBounds:
    """Closed-form sandwich on ``g_1* - g_n(K)`` for dominant-asset weight ``k_j``."""
    k_j = _check_kj(k_j)
    n = _check_n(n)
    if k_j == 1.0:
        return GapBounds(n, k_j, 0.0, 0.0, BASELINE)
    log_inv = math.log(1.0 / k_j)
    return GapBounds(n, k_j, (log_inv + 1.0 - 1.0 / k_j) / n, log_inv / n, BASELINE)


def bound_constant(k_j: float) -> float:
    """``C`` with ``|bound| <= C/n`` for both baseline bounds."""
    k_j = _check_kj(k_j)
    log_inv = math.log(1.0 / k_j)
    return max(log_inv, 1.0 / k_j - 1.0 - log_inv)


def market_portfolio(m: int, favored: int, epsilon: float) -> np.ndarray:
    """Weight ``1 - epsilon`` on ``favored``, the rest spread evenly over the others."""
    if m < 2:
        raise ValueError("a market portfolio needs at least 2 assets")
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    K = np.full(m, epsilon / (m - 1))
    K[favored] = 1.0 - epsilon
    return K


def is_dominant(model: ReturnModel, j: int, tolerance: float = 0.0) -> bool:
    g, p = model.gross, model.probabilities
    return all(i == j or p @ (g[:, i] / g[:, j]) <= 1.0 + tolerance for i in range(model.m))


def improved_gap_bounds(model: ReturnModel, K, j: int, n: int, budget: int = DEFAULT_BUDGET,
                        samples: int = 10**5, seed: int = 0) -> GapBounds:
    """Sharper bounds on ``g_1* - g_n(K)`` valid under high-frequency maximality.

    ``E[R_n,j / K^T R_n]`` is enumerated exactly when ``s**n <= budget`` and
    estimated by Monte Carlo (``samples``, ``seed``) otherwise; ``method``
    records which.

    Raises
    ------
    NotDominantError
        If asset ``j`` is not dominant at zero tolerance.
    """
    K = as_weights(K, model.m).weights
    n = _check_n(n)
    if not 0 <= j < model.m:
        raise IndexError(f"asset index {j} out of range for {model.m} assets")
    k_j = float(K[j])
    if k_j <= 0.0:
        raise ModelError(f"weight on dominant asset {j} must be positive")
    if not is_dominant(model, j):
        raise NotDominantError(f"asset {j} is not dominant")
    try:
        out = compound_outcomes(model, n, budget)
        ratio = float(out.probabilities @ (out.totals[:, j] / (out.totals @ K)))
        method, se = EXACT, 0.0
    except BudgetExceeded:
        vals = np.concatenate([t[:, j] / (t @ K) for t in sample_totals(model, n, samples, seed)])
        ratio, se = mc_mean(vals)
        method, se = MONTE_CARLO, k_j * se / n
    upper = (math.log(1.0 / k_j) - 1.0 + k_j * ratio) / n
    baseline = buyhold_gap_bounds(k_j, n).upper
    if upper > baseline + _ROUNDING_SLACK:
        raise ArithmeticError(f"improved upper {upper!r} exceeds baseline {baseline!r}")
    return GapBounds(n, k_j, 0.0, upper, IMPROVED, method, se)


def rebalance_horizon(k_j: float, epsilon: float) -> RebalancePlan:
    """Smallest certified ``n*`` with ``gap_n <= epsilon`` for every ``n >= n*``."""
    k_j = float(k_j)
    if not 0.0 < k_j < 1.0:
        raise ValueError(f"dominant-asset weight must lie in (0, 1), got {k_j}")
    log_inv = math.log(1.0 / k_j)
    if not 0.0 < epsilon < log_inv:
        raise ValueError(f"epsilon must lie in (0, log(1/k_j)) = (0, {log_inv!r}), got {epsilon}")
    return RebalancePlan(float(epsilon), k_j, max(1, math.ceil(log_inv / epsilon)))


def sublinear_ratio_sequence(k_j: float, n_max: int) -> list[float]:
    """Successive ratios ``x_{n+1}/x_n`` of the upper bound ``x_n = log(1/k_j)/n``."""
    k_j = _check_kj(k_j)
    if n_max < 2:
        raise ValueError(f"n_max must be >= 2, got {n_max}")
    if k_j == 1.0:
        raise ValueError("degenerate bound: identically zero for k_j = 1")
    c = math.log(1.0 / k_j)
    x = [c / n for n in range(1, n_max + 1)]
    return [x[i + 1] / x[i] for i in range(n_max - 1)]
