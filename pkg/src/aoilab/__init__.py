"""Distributed age-vs-cost transmission game: simulator, learner, solvers."""

__version__ = "0.1.0"

from .channel import (
    age_sequence,
    age_stationary_pmf,
    expected_age,
    expected_cost,
    simulate_frame,
)
from .game import (
    EquilibriumResult,
    best_response,
    best_response_map,
    contraction_bound,
    solve_ne,
    utility,
    utility_gradient,
)
from .learning import (
    ChurnEvent,
    GameConfig,
    Schedule,
    expected_drift,
    learning_update,
    run_learning,
    subgradient,
)
from .model import (
    FrameObservation,
    NodeParams,
    Trajectory,
    b_factor,
    derive_params,
    success_probability,
)
from .roundrobin import rr_expected_age, rr_expected_cost, simulate_rr
from .welfare import (
    WelfareResult,
    optimize_system,
    price_of_anarchy,
    system_gradient,
    system_utility,
)

__all__ = [
    "__version__",
    "age_sequence",
    "age_stationary_pmf",
    "expected_age",
    "expected_cost",
    "simulate_frame",
    "EquilibriumResult",
    "best_response",
    "best_response_map",
    "contraction_bound",
    "solve_ne",
    "utility",
    "utility_gradient",
    "ChurnEvent",
    "GameConfig",
    "Schedule",
    "expected_drift",
    "learning_update",
    "run_learning",
    "subgradient",
    "FrameObservation",
    "NodeParams",
    "Trajectory",
    "b_factor",
    "derive_params",
    "success_probability",
    "rr_expected_age",
    "rr_expected_cost",
    "simulate_rr",
    "WelfareResult",
    "optimize_system",
    "price_of_anarchy",
    "system_gradient",
    "system_utility",
]
