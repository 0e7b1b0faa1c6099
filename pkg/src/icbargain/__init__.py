"""Nash bargaining and competitive equilibria for the 2x2 Gaussian
interference channel under frequency-division multiplexing."""

from .bargaining import (
    BargainingOutcome,
    FeasibilityReport,
    check_even_split,
    fdm_feasible,
    fdm_rates,
    invert_share,
    nash_product,
    region_boundary,
    region_membership,
    solve_nbs,
    threshold_share,
)
from .channel import (
    GeneralChannel,
    RatePair,
    ReferenceBounds,
    StandardChannel,
    db_to_linear,
    linear_to_db,
    normalize_channel,
    reference_bounds,
)
from .competitive import (
    DiscreteGame,
    EquilibriumResult,
    competitive_rates,
    game_payoff,
    iterate_waterfilling,
    waterfill_best_response,
)
from .sweep import SweepRecord, SweepSpec, deltas, run_sweep

__version__ = "0.1.0"
