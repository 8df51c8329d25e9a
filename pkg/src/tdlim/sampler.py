"""Monte-Carlo validation of the infinite-batch limit.

Simulates finite batches of environment interaction under a frozen behavior
profile and accumulates per-(state, action) sample averages of the
reward-plus-discounted-next-estimate term. As the batch size grows these
averages converge (at the usual K^(-1/2) rate) to the deterministic tensor
contractions used by the learning map.

Sampling uses the counter-based Philox generator, so identical seeds give
bitwise-identical estimates on any platform.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .game import (
    Game,
    effective_transition_matrix,
    state_action_values,
    state_values,
    stationary_distribution,
    validate_profile,
)
from .learners import LearnerKind, LearnerParams, truncated_td_error


@dataclass
class BatchEstimate:
    """Sample averages from one finite interaction batch.

    `sampled_td[i,s,a]` is the mean sampled drive term over the visits of
    (s, a) by agent i, and 0 where the pair was never visited (see `visited`).
    `sampled_sq` keeps the mean of squares for standard-error estimates.
    """

    sampled_td: np.ndarray
    visits: np.ndarray
    batch_size: int
    seed: int
    sampled_sq: np.ndarray
    state_counts: np.ndarray

    @property
    def visited(self) -> np.ndarray:
        return self.visits > 0

    @property
    def state_frequencies(self) -> np.ndarray:
        return self.state_counts / self.batch_size

    def standard_error(self) -> np.ndarray:
        """Per-(agent, state, action) standard error of the sampled mean."""
        denom = np.maximum(self.visits, 1)
        variance = np.maximum(self.sampled_sq - self.sampled_td**2, 0.0)
        return np.sqrt(variance / denom)


def _next_state_estimates(game: Game, x: np.ndarray, params: LearnerParams) -> np.ndarray:
    """(N, Z) frozen-profile value of landing in each state, per learner kind."""
    if params.kind is LearnerKind.Q:
        return state_action_values(game, x, params.gamma).max(axis=2)
    if params.kind is LearnerKind.SARSA:
        q = state_action_values(game, x, params.gamma)
        return (x * q).sum(axis=2)
    return state_values(game, x, params.gamma)


def sample_batch_td(
    game: Game,
    x: np.ndarray,
    params: LearnerParams,
    batch_size: int,
    seed: int,
) -> BatchEstimate:
    """Simulate one batch of `batch_size` steps under the frozen profile.

    The initial state is drawn from the stationary distribution; each step
    draws a joint action from the profile and a successor from the transition
    tensor, then credits every agent's visited (state, action) pair with
    (1 - gamma) * reward + gamma * next-state estimate.
    """
    x = validate_profile(game, x)
    if batch_size < 1:
        raise ParameterError(f"batch size must be >= 1, got {batch_size}")
    n, z, m = game.n_agents, game.n_states, game.n_actions
    gamma = params.gamma
    estimates = _next_state_estimates(game, x, params)

    rng = np.random.Generator(np.random.Philox(int(seed)))
    sigma = stationary_distribution(effective_transition_matrix(game, x))
    u_init = rng.random()
    u_actions = rng.random((batch_size, n))
    u_next = rng.random(batch_size)

    s0 = min(int(np.searchsorted(np.cumsum(sigma), u_init, side="right")), z - 1)

    # Presample actions and successors for every hypothetical current state;
    # the realized chain then reduces to a table walk.
    cum_x = np.cumsum(x, axis=2)
    actions = np.empty((n, z, batch_size), dtype=np.int64)
    for i in range(n):
        for s in range(z):
            actions[i, s] = np.minimum(
                np.searchsorted(cum_x[i, s], u_actions[:, i], side="right"), m - 1
            )
    strides = m ** (n - 1 - np.arange(n))
    joint_by_state = np.einsum("nzk,n->zk", actions, strides)

    cum_t = np.cumsum(game.flat_transitions, axis=2)
    successor = np.empty((batch_size, z), dtype=np.int64)
    for s in range(z):
        rows = cum_t[s][joint_by_state[s]]  # (batch_size, Z)
        successor[:, s] = np.minimum((rows < u_next[:, None]).sum(axis=1), z - 1)

    flat_next = successor.ravel().tolist()
    states = [0] * (batch_size + 1)
    s = s0
    states[0] = s
    base = 0
    for k in range(batch_size):
        s = flat_next[base + s]
        base += z
        states[k + 1] = s
    states = np.asarray(states, dtype=np.int64)
    current, nxt = states[:-1], states[1:]

    steps_idx = np.arange(batch_size)
    joint_real = joint_by_state[current, steps_idx]
    sums = np.zeros((n, z, m))
    sums_sq = np.zeros((n, z, m))
    counts = np.zeros((n, z, m), dtype=np.int64)
    for i in range(n):
        a_real = actions[i, current, steps_idx]
        rewards = game.flat_rewards[i, current, joint_real, nxt]
        samples = (1.0 - gamma[i]) * rewards + gamma[i] * estimates[i][nxt]
        np.add.at(sums[i], (current, a_real), samples)
        np.add.at(sums_sq[i], (current, a_real), samples**2)
        np.add.at(counts[i], (current, a_real), 1)

    denom = np.maximum(counts, 1)
    return BatchEstimate(
        sampled_td=sums / denom,
        visits=counts,
        batch_size=batch_size,
        seed=int(seed),
        sampled_sq=sums_sq / denom,
        state_counts=np.bincount(current, minlength=z),
    )


def deviation_from_limit(game: Game, x: np.ndarray, params: LearnerParams, estimate: BatchEstimate) -> float:
    """Max-abs deviation of the sampled averages from the exact contraction,
    taken over the visited (agent, state, action) entries."""
    exact = truncated_td_error(game, x, params)
    diff = np.abs(estimate.sampled_td - exact)
    return float(diff[estimate.visited].max())
