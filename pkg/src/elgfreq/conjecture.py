"""
Numerical probing of high-frequency maximality: ``g_n* <= g_1*`` for all n.

Every optimum is certified by the Frank-Wolfe duality gap, so a scan can only
report a violation larger than the combined certification error ``2 * tol``.
For i.i.d. steps the compound return over the first n steps is independent
of step n, the regime in which the inequality is proven, so these scans are
expected to come back clean.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import __version__, _rng
from .elg import DEFAULT_MAX_ITERS, DEFAULT_TOL, maximize_outcomes
from .model import DEFAULT_BUDGET, BudgetExceeded, ReturnModel, compound_outcomes

CONSISTENT = "consistent"
VIOLATION = "violation_candidate"


@dataclass
class MaximalityReport:
    horizons: list
    g_star: list
    g1_star: float
    max_violation: float
    certified_tol: float
    verdict: str
    weights: list = field(default_factory=list)
    unconverged: list = field(default_factory=list)
    model: ReturnModel | None = None
    provenance: dict = field(default_factory=dict)

    def to_dict(self, include_model: bool = True) -> dict:
        d = {
            "horizons": self.horizons,
            "g_star": self.g_star,
            "g1_star": self.g1_star,
            "max_violation": self.max_violation,
            "certified_tol": self.certified_tol,
            "verdict": self.verdict,
            "weights": self.weights,
            "unconverged": self.unconverged,
        }
        if self.provenance:
            d["provenance"] = self.provenance
        if include_model and self.model is not None:
            d["model"] = self.model.to_dict()
        return d


def maximality_scan(model: ReturnModel, n_max: int, tol: float = DEFAULT_TOL,
                    budget: int = DEFAULT_BUDGET, max_iters: int = DEFAULT_MAX_ITERS) -> MaximalityReport:
    """Certified ``g_n*`` for ``n = 1..n_max`` and the largest excess over ``g_1*``.

    Horizons where the optimizer ran out of iterations are listed in
    ``unconverged``; their values are uncertified.
    """
    if int(n_max) != n_max or n_max < 1:
        raise ValueError(f"n_max must be an integer >= 1, got {n_max}")
    if not tol > 0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    if model.s ** n_max > budget:
        raise BudgetExceeded(model.s ** n_max, budget)
    horizons = list(range(1, n_max + 1))
    g_star, weights, unconverged = [], [], []
    for n in horizons:
        res = maximize_outcomes(compound_outcomes(model, n, budget), tol, max_iters)
        g_star.append(res.value)
        weights.append(res.weights.tolist())
        if not res.converged:
            unconverged.append(n)
    g1 = g_star[0]
    max_violation = max(g - g1 for g in g_star)
    verdict = VIOLATION if max_violation > 2 * tol else CONSISTENT
    return MaximalityReport(horizons, g_star, g1, max_violation, tol, verdict,
                            weights, unconverged, model)


@dataclass(frozen=True)
class GeneratorSpec:
    """Random i.i.d. models: asset and atom counts drawn uniformly from the
    inclusive ranges, returns uniform on ``[-bound, bound]``, probabilities
    from a flat Dirichlet."""

    m_range: tuple = (2, 3)
    s_range: tuple = (2, 3)
    bound: float = 0.8

    def __post_init__(self):
        (m_lo, m_hi), (s_lo, s_hi) = self.m_range, self.s_range
        if not 2 <= m_lo <= m_hi:
            raise ValueError(f"invalid asset-count range {self.m_range}")
        if not 1 <= s_lo <= s_hi:
            raise ValueError(f"invalid atom-count range {self.s_range}")
        if not 0.0 < self.bound < 1.0:
            raise ValueError(f"return bound must lie in (0, 1), got {self.bound}")

    def draw(self, rng: np.random.Generator) -> ReturnModel:
        m = int(rng.integers(self.m_range[0], self.m_range[1] + 1))
        s = int(rng.integers(self.s_range[0], self.s_range[1] + 1))
        p = rng.dirichlet(np.ones(s))
        p /= p.sum()
        atoms = rng.uniform(-self.bound, self.bound, size=(s, m))
        return ReturnModel([f"asset{i}" for i in range(m)], atoms, p)

    def to_dict(self) -> dict:
        return {"m_range": list(self.m_range), "s_range": list(self.s_range), "bound": self.bound}


def trial_model(spec: GeneratorSpec, seed: int, trial: int) -> ReturnModel:
    """The model drawn for ``trial`` under master ``seed``."""
    return spec.draw(_rng.stream(seed, trial))


def counterexample_search(spec: GeneratorSpec, trials: int, n_max: int, seed: int = 0,
                          tol: float = DEFAULT_TOL, budget: int = DEFAULT_BUDGET,
                          top: int | None = None) -> list[MaximalityReport]:
    """Scan ``trials`` random models and rank them by ``max_violation``.

    Trial ``t`` draws its model from the stream ``(seed, t)``, so results do
    not depend on evaluation order. The ranking is a stable descending sort;
    ``top`` keeps only the worst instances.
    """
    if trials < 0:
        raise ValueError(f"trials must be >= 0, got {trials}")
    if spec.s_range[1] ** n_max > budget:
        raise ValueError(f"{spec.s_range[1]}**{n_max} outcomes exceeds budget {budget}")
    reports = []
    for t in range(trials):
        rep = maximality_scan(trial_model(spec, seed, t), n_max, tol, budget)
        rep.provenance = {"seed": seed, "trial": t, "tool_version": __version__}
        reports.append(rep)
    reports.sort(key=lambda r: -r.max_violation)
    return reports if top is None else reports[:top]
