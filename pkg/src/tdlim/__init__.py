"""Deterministic-limit temporal-difference learning dynamics on stochastic games."""

from .errors import (
    BoundaryError,
    DimensionError,
    GameFormatError,
    NonErgodicError,
    NumericError,
    ParameterError,
    PartialSpectrumError,
)
from .game import (
    Game,
    avg_reward_state,
    avg_reward_state_action,
    conditioned_transition_matrix,
    effective_transition_matrix,
    performance,
    state_action_values,
    state_values,
    stationary_distribution,
    uniform_profile,
    validate_profile,
)
from .learners import (
    LearnerKind,
    LearnerParams,
    max_next_q,
    next_q,
    next_v,
    step,
    td_error,
    truncated_td_error,
    update_step,
)
from .dynamics import (
    JacobianTensor,
    ScanBlock,
    SpectrumResult,
    Trajectory,
    bifurcation_scan,
    count_distinct_profiles,
    iterate,
    jacobian,
    lyapunov_spectrum,
    orbit_is_periodic,
)
from .sampler import BatchEstimate, deviation_from_limit, sample_batch_td
from .environments import (
    builtin_game,
    load_game,
    random_game,
    resolve_game,
    save_game,
    two_state_matching_pennies,
    two_state_prisoners_dilemma,
)

__all__ = [
    "BatchEstimate",
    "BoundaryError",
    "DimensionError",
    "Game",
    "GameFormatError",
    "JacobianTensor",
    "LearnerKind",
    "LearnerParams",
    "NonErgodicError",
    "NumericError",
    "ParameterError",
    "PartialSpectrumError",
    "ScanBlock",
    "SpectrumResult",
    "Trajectory",
    "avg_reward_state",
    "avg_reward_state_action",
    "bifurcation_scan",
    "builtin_game",
    "conditioned_transition_matrix",
    "count_distinct_profiles",
    "deviation_from_limit",
    "effective_transition_matrix",
    "iterate",
    "jacobian",
    "load_game",
    "lyapunov_spectrum",
    "max_next_q",
    "next_q",
    "next_v",
    "orbit_is_periodic",
    "performance",
    "random_game",
    "resolve_game",
    "sample_batch_td",
    "save_game",
    "state_action_values",
    "state_values",
    "stationary_distribution",
    "step",
    "td_error",
    "truncated_td_error",
    "two_state_matching_pennies",
    "two_state_prisoners_dilemma",
    "uniform_profile",
    "update_step",
    "validate_profile",
]

__version__ = "0.1.0"
