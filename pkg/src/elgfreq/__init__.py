"""Frequency-dependent expected-log-growth (ELG) portfolio analysis.

Exact and Monte Carlo evaluation of the per-step log growth of a
buy-and-hold portfolio rebalanced every ``n`` steps, Frank-Wolfe
maximization over the unit simplex, dominant-asset detection, buy-and-hold
convergence bounds, high-frequency maximality scans and a tick-data
replay pipeline.
"""

__version__ = "0.1.0"

from .model import (
    BudgetExceeded,
    CompoundOutcomeSet,
    FrequencyConfig,
    ModelError,
    ReturnModel,
    WeightVector,
    compound_outcomes,
    load_model,
    unit_weight,
    validate_model,
)
from .elg import (
    DominanceReport,
    ElgEstimate,
    OptimizationResult,
    account_value,
    elg_exact,
    elg_mc,
    find_dominant,
    optimize_elg,
    relative_attractiveness,
)
from .bounds import (
    GapBounds,
    NotDominantError,
    RebalancePlan,
    buyhold_gap_bounds,
    improved_gap_bounds,
    rebalance_horizon,
    sublinear_ratio_sequence,
)
from .conjecture import (
    GeneratorSpec,
    MaximalityReport,
    counterexample_search,
    maximality_scan,
)
from .ingest import (
    DominanceSeries,
    TickSeries,
    empirical_gap_curve,
    empirical_model,
    load_ticks,
    realized_compound,
    realized_returns,
    sliding_dominance,
)

__all__ = [name for name in dir() if not name.startswith("_")]
