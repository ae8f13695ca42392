"""
Return models, portfolio weights and n-step compound outcomes.

A :class:`ReturnModel` is a finite-support joint distribution of one-step
net returns over ``m`` assets: ``s`` atoms (rows), each a full return vector,
with one probability per atom. Steps are i.i.d. draws from this table, so
any cross-asset correlation is expressed inside the atoms.

Model file format (JSON)::

    {
      "assets": ["cash", "risky"],
      "atoms": [[0.0, 0.2], [0.0, -0.1]],
      "probs": [0.5, 0.5],
      "riskless": 0
    }
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

PROB_TOL = 1e-12
OUTCOME_PROB_TOL = 1e-9
DEFAULT_BUDGET = 10**7


class ModelError(ValueError):
    """A return model or weight vector violates its invariants."""


class ModelFormatError(ValueError):
    """A model file cannot be parsed."""


class BudgetExceeded(ValueError):
    """Exact enumeration would need more outcomes than allowed."""

    def __init__(self, count: int, budget: int):
        self.count = count
        self.budget = budget
        super().__init__(f"{count} outcomes exceeds budget {budget}; use Monte Carlo")


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ReturnModel:
    """Finite-support i.i.d. one-step return distribution.

    Parameters
    ----------
    asset_names : sequence of str
        One name per asset (``m >= 2``).
    atoms : array_like, shape (s, m)
        Net returns; row ``a`` is the joint return vector of atom ``a``.
    probabilities : array_like, shape (s,)
        Atom probabilities.
    riskless_index : int, optional
        Column holding a deterministic rate ``r >= 0``.
    """

    asset_names: tuple
    atoms: np.ndarray
    probabilities: np.ndarray
    riskless_index: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "asset_names", tuple(str(a) for a in self.asset_names))
        object.__setattr__(self, "atoms", _frozen(np.atleast_2d(self.atoms)))
        object.__setattr__(self, "probabilities", _frozen(np.atleast_1d(self.probabilities)))
        validate_model(self)

    @property
    def m(self) -> int:
        return self.atoms.shape[1]

    @property
    def s(self) -> int:
        return self.atoms.shape[0]

    @property
    def gross(self) -> np.ndarray:
        """Per-atom total returns ``1 + X``."""
        return 1.0 + self.atoms

    @property
    def x_min(self) -> np.ndarray:
        return self.atoms.min(axis=0)

    @property
    def x_max(self) -> np.ndarray:
        return self.atoms.max(axis=0)

    @property
    def riskless_rate(self) -> float | None:
        if self.riskless_index is None:
            return None
        return float(self.atoms[0, self.riskless_index])

    def mean_returns(self) -> np.ndarray:
        return self.probabilities @ self.atoms

    def to_dict(self) -> dict:
        d = {
            "assets": list(self.asset_names),
            "atoms": self.atoms.tolist(),
            "probs": self.probabilities.tolist(),
        }
        if self.riskless_index is not None:
            d["riskless"] = self.riskless_index
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ReturnModel":
        try:
            assets = d["assets"]
            atoms = d["atoms"]
            probs = d["probs"]
        except (KeyError, TypeError) as exc:
            raise ModelFormatError(f"missing model field: {exc}") from None
        riskless = d.get("riskless")
        if riskless is not None and not isinstance(riskless, int):
            raise ModelFormatError(f"riskless must be an integer index, got {riskless!r}")
        try:
            atoms = np.array(atoms, dtype=float)
            probs = np.array(probs, dtype=float)
        except (TypeError, ValueError) as exc:
            raise ModelFormatError(f"atoms/probs not numeric arrays: {exc}") from None
        if atoms.ndim != 2:
            raise ModelFormatError("atoms must be an array of equal-length rows")
        if probs.ndim != 1:
            raise ModelFormatError("probs must be a flat list")
        return cls(assets, atoms, probs, riskless)

    @classmethod
    def cash_and_risky(cls, risky_returns: Sequence[float], probabilities: Sequence[float],
                       r: float = 0.0) -> "ReturnModel":
        """Two-asset model: asset 0 earns ``r`` surely, asset 1 is risky."""
        x = np.asarray(risky_returns, dtype=float)
        atoms = np.column_stack([np.full(x.shape, float(r)), x])
        return cls(("cash", "risky"), atoms, probabilities, 0)


def validate_model(model: ReturnModel) -> None:
    """Raise :class:`ModelError` naming the first violated invariant."""
    atoms, probs = model.atoms, model.probabilities
    if atoms.ndim != 2:
        raise ModelError("atoms must be a 2-d array (s x m)")
    s, m = atoms.shape
    if m < 2:
        raise ModelError(f"need at least 2 assets, got {m}")
    if s < 1:
        raise ModelError("need at least one atom")
    if len(model.asset_names) != m:
        raise ModelError(f"{len(model.asset_names)} asset names for {m} atom columns")
    if probs.shape != (s,):
        raise ModelError(f"{probs.size} probabilities for {s} atoms")
    if not np.all(np.isfinite(probs)):
        raise ModelError("probability not finite")
    if np.any(probs < 0):
        raise ModelError(f"negative probability {probs.min()!r}")
    total = float(probs.sum())
    if abs(total - 1.0) > PROB_TOL:
        raise ModelError(f"probability sum {total!r} differs from 1")
    if not np.all(np.isfinite(atoms)):
        raise ModelError("return not finite")
    if np.any(atoms <= -1.0):
        raise ModelError(f"return not > -1 (min {atoms.min()!r})")
    j = model.riskless_index
    if j is not None:
        if not 0 <= j < m:
            raise ModelError(f"riskless index {j} out of range for {m} assets")
        col = atoms[:, j]
        if np.any(col != col[0]):
            raise ModelError(f"riskless column {j} is not constant")
        if col[0] < 0:
            raise ModelError(f"riskless rate {col[0]!r} is negative")


@dataclass(frozen=True, eq=False)
class WeightVector:
    """Long-only, fully invested portfolio weights (a point of the unit simplex)."""

    weights: np.ndarray

    def __post_init__(self):
        w = _frozen(np.atleast_1d(self.weights))
        if w.ndim != 1 or w.size < 1:
            raise ModelError("weights must be a non-empty vector")
        if not np.all(np.isfinite(w)):
            raise ModelError("weight not finite")
        if np.any(w < 0):
            raise ModelError(f"negative weight {w.min()!r}")
        if abs(float(w.sum()) - 1.0) > PROB_TOL:
            raise ModelError(f"weights sum to {float(w.sum())!r}, not 1")
        object.__setattr__(self, "weights", w)

    def __len__(self):
        return self.weights.size

    def __getitem__(self, i):
        return float(self.weights[i])

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.weights, dtype=dtype)

    def tolist(self) -> list:
        return self.weights.tolist()

    @classmethod
    def uniform(cls, m: int) -> "WeightVector":
        return cls(np.full(m, 1.0 / m))


def as_weights(K, m: int | None = None) -> WeightVector:
    """Coerce array-likes to :class:`WeightVector`, checking the dimension."""
    w = K if isinstance(K, WeightVector) else WeightVector(np.asarray(K, dtype=float))
    if m is not None and len(w) != m:
        raise ModelError(f"weight vector has {len(w)} entries for {m} assets")
    return w


def unit_weight(m: int, j: int) -> WeightVector:
    """All weight on asset ``j``."""
    if m < 1:
        raise ModelError(f"asset count must be positive, got {m}")
    if not 0 <= j < m:
        raise IndexError(f"asset index {j} out of range for {m} assets")
    w = np.zeros(m)
    w[j] = 1.0
    return WeightVector(w)


@dataclass(frozen=True)
class FrequencyConfig:
    """Rebalancing every ``n`` base intervals of ``delta_t`` seconds."""

    delta_t: float
    n: int = 1

    def __post_init__(self):
        if not (self.delta_t > 0 and math.isfinite(self.delta_t)):
            raise ValueError(f"delta_t must be positive, got {self.delta_t}")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"rebalancing period must be an integer >= 1, got {self.n}")

    @property
    def frequency(self) -> float:
        """Rebalances per second."""
        return 1.0 / (self.n * self.delta_t)

    @property
    def period_seconds(self) -> float:
        return self.n * self.delta_t


@dataclass(frozen=True, eq=False)
class CompoundOutcomeSet:
    """All ``s**n`` equally-long atom sequences with their total returns.

    ``probabilities[k]`` is the probability of sequence ``k`` and
    ``totals[k, i]`` its total return ``prod(1 + X_i)`` on asset ``i``.
    Sequences are in lexicographic order of atom indices, first step most
    significant.
    """

    horizon: int
    probabilities: np.ndarray
    totals: np.ndarray

    def __len__(self):
        return self.probabilities.size

    def __iter__(self) -> Iterator[tuple[float, np.ndarray]]:
        return zip(self.probabilities.tolist(), self.totals)

    @property
    def compound_returns(self) -> np.ndarray:
        return self.totals - 1.0


def outcome_count(model: ReturnModel, n: int) -> int:
    return model.s ** n


def compound_outcomes(model: ReturnModel, n: int, budget: int = DEFAULT_BUDGET) -> CompoundOutcomeSet:
    """Enumerate every ``n``-step path of ``model``.

    Raises
    ------
    BudgetExceeded
        If ``s**n > budget``; the caller should fall back to sampling.
    """
    if int(n) != n or n < 1:
        raise ValueError(f"horizon must be an integer >= 1, got {n}")
    count = outcome_count(model, n)
    if count > budget:
        raise BudgetExceeded(count, budget)
    p, gross = model.probabilities, model.gross
    probs, totals = p.copy(), gross.copy()
    for _ in range(n - 1):
        probs = (probs[:, None] * p[None, :]).ravel()
        totals = (totals[:, None, :] * gross[None, :, :]).reshape(-1, model.m)
    return CompoundOutcomeSet(n, _frozen(probs), _frozen(totals))


def load_model(path) -> ReturnModel:
    """Read a model file, raising ModelFormatError or ModelError."""
    text = Path(path).read_text()
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path}: line {exc.lineno}: {exc.msg}") from None
    if not isinstance(d, dict):
        raise ModelFormatError(f"{path}: top level must be an object")
    return ReturnModel.from_dict(d)


def dump_model(model: ReturnModel, path, extra: dict | None = None) -> None:
    d = model.to_dict()
    if extra:
        d.update(extra)
    Path(path).write_text(json.dumps(d, indent=2) + "\n")
