"""Infinite-batch temporal-difference errors and the multiplicative-weights
behavior update.

Three learner variants are supported. All share the expected one-step reward
term; they differ in how the next state is valued and whether a forgetting
term -log(X)/beta (the inverted softmax of the current estimate) appears:

  Q      values the next state by the best state-action value,
  SARSA  values it by the profile-weighted state-action value,
  AC     values it by the state value and carries no forgetting term.

The update map multiplies each action probability by exp(alpha * beta * TD)
and renormalizes per (agent, state). It is invariant under adding any
per-(agent, state) constant to the TD table, and exact zeros in the profile
are absorbing.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .errors import BoundaryError, DimensionError, NumericError, ParameterError
from .game import (
    Game,
    _check_profile_shape,
    avg_reward_state_action,
    conditioned_transition_matrix,
    per_agent,
    state_action_values,
    state_values,
)

INTERIOR_FLOOR = 1e-300


class LearnerKind(str, Enum):
    Q = "q"
    SARSA = "sarsa"
    AC = "ac"


@dataclass(frozen=True)
class LearnerParams:
    """Per-agent learning parameters for one of the three TD variants."""

    kind: LearnerKind
    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray

    def __post_init__(self):
        kind = LearnerKind(self.kind)
        alpha = np.atleast_1d(np.asarray(self.alpha, dtype=float))
        beta = np.atleast_1d(np.asarray(self.beta, dtype=float))
        gamma = np.atleast_1d(np.asarray(self.gamma, dtype=float))
        n = max(alpha.shape[0], beta.shape[0], gamma.shape[0])
        alpha = per_agent(alpha if alpha.shape[0] > 1 else alpha[0], n, "alpha")
        beta = per_agent(beta if beta.shape[0] > 1 else beta[0], n, "beta")
        gamma = per_agent(gamma if gamma.shape[0] > 1 else gamma[0], n, "gamma")
        if np.any(alpha <= 0.0) or np.any(alpha >= 1.0):
            raise ParameterError(f"alpha must lie in (0, 1), got {alpha.tolist()}")
        if np.any(beta <= 0.0):
            raise ParameterError(f"beta must be positive, got {beta.tolist()}")
        if np.any(gamma < 0.0) or np.any(gamma >= 1.0):
            raise ParameterError(f"gamma must lie in [0, 1), got {gamma.tolist()}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "gamma", gamma)

    @classmethod
    def homogeneous(cls, kind, n_agents: int, alpha: float, beta: float, gamma: float):
        return cls(
            kind=LearnerKind(kind),
            alpha=np.full(n_agents, float(alpha)),
            beta=np.full(n_agents, float(beta)),
            gamma=np.full(n_agents, float(gamma)),
        )

    @property
    def n_agents(self) -> int:
        return self.alpha.shape[0]

    def with_kind(self, kind) -> "LearnerParams":
        return replace(self, kind=LearnerKind(kind))


def max_next_q(game: Game, x: np.ndarray, gammas, agent: int) -> np.ndarray:
    """(Z, M) best-next-value estimate: own action fixed, others averaged."""
    q = state_action_values(game, x, gammas)[agent]
    t_cond = conditioned_transition_matrix(game, x, agent)
    return t_cond @ q.max(axis=1)


def next_q(game: Game, x: np.ndarray, gammas, agent: int) -> np.ndarray:
    """(Z, M) profile-weighted next state-action value."""
    q = state_action_values(game, x, gammas)[agent]
    weighted = (x[agent] * q).sum(axis=1)
    t_cond = conditioned_transition_matrix(game, x, agent)
    return t_cond @ weighted


def next_v(game: Game, x: np.ndarray, gammas, agent: int) -> np.ndarray:
    """(Z, M) average next-state value; equals next_q identically."""
    v = state_values(game, x, gammas)[agent]
    t_cond = conditioned_transition_matrix(game, x, agent)
    return t_cond @ v


def _require_interior(x: np.ndarray, kind: LearnerKind) -> None:
    if np.all(x >= INTERIOR_FLOOR):
        return
    i, s, a = np.unravel_index(int(np.argmin(x)), x.shape)
    raise BoundaryError(
        f"behavior probability X[{i},{s},{a}] = {x[i, s, a]!r} is on the simplex "
        f"boundary; the {kind.value} learner's forgetting term is undefined there",
        indices=(int(i), int(s), int(a)),
    )


def truncated_td_error(game: Game, x: np.ndarray, params: LearnerParams) -> np.ndarray:
    """(N, Z, M) TD error without the current-state estimate term.

    This is the reward-plus-discounted-next-value part shared by the update
    map, the analytic Jacobian, and the Monte-Carlo batch validation.
    """
    x = _check_profile_shape(game, x)
    kind = params.kind
    gam = params.gamma
    values = state_values(game, x, gam)
    q = None
    if kind is not LearnerKind.AC:
        q = state_action_values(game, x, gam)
    out = np.empty((game.n_agents, game.n_states, game.n_actions))
    for i in range(game.n_agents):
        if kind is LearnerKind.Q:
            estimate = q[i].max(axis=1)
        elif kind is LearnerKind.SARSA:
            estimate = (x[i] * q[i]).sum(axis=1)
        else:
            estimate = values[i]
        t_cond = conditioned_transition_matrix(game, x, i)
        out[i] = (1.0 - gam[i]) * avg_reward_state_action(game, x, i) + gam[i] * (
            t_cond @ estimate
        )
    return out


def td_error(game: Game, x: np.ndarray, params: LearnerParams) -> np.ndarray:
    """(N, Z, M) full TD error table for the given learner kind."""
    x = _check_profile_shape(game, x)
    td = truncated_td_error(game, x, params)
    if params.kind is LearnerKind.AC:
        return td
    _require_interior(x, params.kind)
    return td - np.log(x) / params.beta[:, None, None]


def update_step(x: np.ndarray, td: np.ndarray, params: LearnerParams) -> np.ndarray:
    """Apply the multiplicative-weights update to a behavior profile.

    The drive term is max-subtracted per (agent, state) over the support
    before exponentiation, so large beta * TD values cannot overflow, exact
    zeros in `x` stay exactly zero, and a row-constant TD leaves the profile
    untouched.
    """
    x = np.asarray(x, dtype=float)
    td = np.asarray(td, dtype=float)
    if td.shape != x.shape:
        raise DimensionError(f"TD table has shape {td.shape}, expected {x.shape}")
    support = x > 0.0
    if not np.all(np.isfinite(td[support])):
        raise NumericError("non-finite TD error on the support of the behavior profile")
    scale = (params.alpha * params.beta)[:, None, None]
    drive = scale * td
    drive_max = np.where(support, drive, -np.inf).max(axis=2, keepdims=True)
    drive = np.where(support, drive - drive_max, -np.inf)
    weights = x * np.exp(drive)
    return weights / weights.sum(axis=2, keepdims=True)


def step(game: Game, x: np.ndarray, params: LearnerParams) -> np.ndarray:
    """One iteration of the learning map: TD evaluation plus profile update."""
    return update_step(x, td_error(game, x, params), params)
