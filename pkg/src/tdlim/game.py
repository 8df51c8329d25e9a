"""Stochastic-game data model, behavior/environment averaging, and exact values.

A game couples a transition tensor with shape (Z, M, ..., M, Z) — one action
axis per agent — and a reward tensor with a leading agent axis. Joint actions
are enumerated row-major over (a^1, ..., a^N): the last agent's action varies
fastest. That ordering governs every flattened tensor and every file format in
the package.

All operations here are pure functions of their inputs and safe to call from
multiple threads; game tensors are frozen read-only at construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import (
    DimensionError,
    GameFormatError,
    NonErgodicError,
    ParameterError,
)

ROW_SUM_TOL = 1e-12
STATIONARY_EIG_TOL = 1e-9
STATIONARY_CLAMP = 1e-15
POWER_ITER_TOL = 1e-12
POWER_ITER_MAX = 10**6


def _frozen(arr) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Game:
    """A finite stochastic game: N agents, Z states, M actions per agent."""

    n_agents: int
    n_states: int
    n_actions: int
    transitions: np.ndarray
    rewards: np.ndarray

    def __post_init__(self):
        n, z, m = self.n_agents, self.n_states, self.n_actions
        for name, value in (("n_agents", n), ("n_states", z), ("n_actions", m)):
            if not isinstance(value, (int, np.integer)) or value < 1:
                raise GameFormatError(f"{name} must be a positive integer, got {value!r}")
        t_shape = (z,) + (m,) * n + (z,)
        r_shape = (n,) + t_shape
        t = _frozen(self.transitions)
        r = _frozen(self.rewards)
        if t.shape != t_shape:
            raise GameFormatError(f"transition tensor has shape {t.shape}, expected {t_shape}")
        if r.shape != r_shape:
            raise GameFormatError(f"reward tensor has shape {r.shape}, expected {r_shape}")
        if np.any(t < 0.0) or np.any(t > 1.0):
            bad = np.unravel_index(int(np.argmax((t < 0.0) | (t > 1.0))), t.shape)
            bad = tuple(int(k) for k in bad)
            raise GameFormatError(f"transition probability out of [0, 1] at index {bad}")
        row_sums = t.sum(axis=-1)
        if np.any(np.abs(row_sums - 1.0) > ROW_SUM_TOL):
            bad = np.unravel_index(int(np.argmax(np.abs(row_sums - 1.0))), row_sums.shape)
            s, joint = int(bad[0]), tuple(int(a) for a in bad[1:])
            raise GameFormatError(
                f"transition row (state={s}, joint_action={joint}) sums to "
                f"{float(row_sums[bad])!r}, expected 1"
            )
        object.__setattr__(self, "transitions", t)
        object.__setattr__(self, "rewards", r)
        self._check_state_connectivity()

    def _check_state_connectivity(self):
        # Structural ergodicity: under any strictly interior profile every
        # transition with positive probability for some joint action is an
        # edge; the state graph must be a single strongly connected component.
        z = self.n_states
        reach = self.flat_transitions.max(axis=1) > 0.0
        n_comp, _ = connected_components(csr_matrix(reach), directed=True, connection="strong")
        if n_comp != 1:
            raise NonErgodicError(
                f"state graph has {n_comp} strongly connected components under "
                "uniform behavior; the game must be ergodic"
            )

    # -- derived layouts (computed once, shared by every operation) ----------

    @cached_property
    def n_joint_actions(self) -> int:
        return self.n_actions**self.n_agents

    @cached_property
    def flat_transitions(self) -> np.ndarray:
        """Transitions as (Z, M^N, Z) over row-major joint-action indices."""
        out = self.transitions.reshape(self.n_states, self.n_joint_actions, self.n_states)
        out.setflags(write=False)
        return out

    @cached_property
    def flat_rewards(self) -> np.ndarray:
        """Rewards as (N, Z, M^N, Z)."""
        out = self.rewards.reshape(
            self.n_agents, self.n_states, self.n_joint_actions, self.n_states
        )
        out.setflags(write=False)
        return out

    @cached_property
    def expected_reward_by_joint_action(self) -> np.ndarray:
        """Next-state average of rewards: (N, Z, M^N), entry = sum_s' T * R."""
        out = np.einsum("zaw,nzaw->nza", self.flat_transitions, self.flat_rewards)
        out.setflags(write=False)
        return out

    @cached_property
    def agent_action_of_joint(self) -> np.ndarray:
        """(N, M^N) int array: agent i's action in each joint-action index."""
        n, m = self.n_agents, self.n_actions
        joint = np.arange(self.n_joint_actions)
        out = np.stack([(joint // m ** (n - 1 - i)) % m for i in range(n)])
        out.setflags(write=False)
        return out

    @cached_property
    def reward_range(self) -> tuple[float, float]:
        return float(self.rewards.min()), float(self.rewards.max())


def uniform_profile(game: Game) -> np.ndarray:
    """The behavior profile assigning equal probability to every action."""
    shape = (game.n_agents, game.n_states, game.n_actions)
    return np.full(shape, 1.0 / game.n_actions)


def validate_profile(game: Game, x: np.ndarray) -> np.ndarray:
    """Check shape, non-negativity, and per-(agent, state) normalization."""
    x = np.asarray(x, dtype=float)
    shape = (game.n_agents, game.n_states, game.n_actions)
    if x.shape != shape:
        raise DimensionError(f"behavior profile has shape {x.shape}, expected {shape}")
    if np.any(x < 0.0):
        i, s, a = (int(k) for k in np.unravel_index(int(np.argmin(x)), shape))
        raise GameFormatError(
            f"behavior probability X[{i},{s},{a}] = {float(x[i, s, a])!r} is negative"
        )
    sums = x.sum(axis=2)
    if np.any(np.abs(sums - 1.0) > ROW_SUM_TOL):
        i, s = (int(k) for k in np.unravel_index(int(np.argmax(np.abs(sums - 1.0))), sums.shape))
        raise GameFormatError(
            f"behavior row (agent={i}, state={s}) sums to {float(sums[i, s])!r}, expected 1"
        )
    return x


def _check_profile_shape(game: Game, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    shape = (game.n_agents, game.n_states, game.n_actions)
    if x.shape != shape:
        raise DimensionError(f"behavior profile has shape {x.shape}, expected {shape}")
    return x


def per_agent(value, n_agents: int, name: str = "parameter") -> np.ndarray:
    """Broadcast a scalar to all agents, or validate a length-N vector."""
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        arr = np.full(n_agents, float(arr))
    if arr.shape != (n_agents,):
        raise ParameterError(f"{name} must be a scalar or length-{n_agents} vector, got shape {arr.shape}")
    return arr


def _validated_gammas(game: Game, gammas) -> np.ndarray:
    g = per_agent(gammas, game.n_agents, "gamma")
    if np.any(g < 0.0) or np.any(g >= 1.0):
        raise ParameterError(f"discount factors must lie in [0, 1), got {g.tolist()}")
    return g


def joint_action_probs(game: Game, x: np.ndarray) -> np.ndarray:
    """(Z, M^N) probabilities of each joint action: prod_i X[i, s, a^i]."""
    x = _check_profile_shape(game, x)
    idx = game.agent_action_of_joint
    out = x[0][:, idx[0]]
    for i in range(1, game.n_agents):
        out = out * x[i][:, idx[i]]
    return out


def joint_action_probs_excluding(game: Game, x: np.ndarray, agent: int) -> np.ndarray:
    """(Z, M^N) product of the other agents' action probabilities."""
    x = _check_profile_shape(game, x)
    if not 0 <= agent < game.n_agents:
        raise DimensionError(f"agent index {agent} out of range for {game.n_agents} agents")
    idx = game.agent_action_of_joint
    out = np.ones((game.n_states, game.n_joint_actions))
    for i in range(game.n_agents):
        if i != agent:
            out = out * x[i][:, idx[i]]
    return out


def _sum_other_action_axes(flat: np.ndarray, game: Game, agent: int) -> np.ndarray:
    """Collapse a (..., M^N, ...) joint-action axis to agent's own (M,) axis.

    `flat` must have the joint-action axis at position 1 (after a state axis);
    trailing axes are preserved.
    """
    n, m = game.n_agents, game.n_actions
    shaped = flat.reshape(flat.shape[:1] + (m,) * n + flat.shape[2:])
    axes = tuple(1 + k for k in range(n) if k != agent)
    return shaped.sum(axis=axes)


def effective_transition_matrix(game: Game, x: np.ndarray) -> np.ndarray:
    """State-to-state transition matrix under the profile: (Z, Z)."""
    probs = joint_action_probs(game, x)
    return np.einsum("za,zaw->zw", probs, game.flat_transitions)


def conditioned_transition_matrix(game: Game, x: np.ndarray, agent: int) -> np.ndarray:
    """(Z, M, Z) transitions with the agent's own action held fixed.

    Entry (s, a, s') averages T over the other agents' behavior only.
    """
    excl = joint_action_probs_excluding(game, x, agent)
    flat = excl[:, :, None] * game.flat_transitions
    return _sum_other_action_axes(flat, game, agent)


def avg_reward_state(game: Game, x: np.ndarray) -> np.ndarray:
    """(N, Z) expected one-step reward per agent from each state."""
    probs = joint_action_probs(game, x)
    return np.einsum("za,nza->nz", probs, game.expected_reward_by_joint_action)


def avg_reward_state_action(game: Game, x: np.ndarray, agent: int) -> np.ndarray:
    """(Z, M) expected reward with the agent's own action held fixed."""
    excl = joint_action_probs_excluding(game, x, agent)
    flat = excl * game.expected_reward_by_joint_action[agent]
    return _sum_other_action_axes(flat, game, agent)


def stationary_distribution(markov: np.ndarray, tol: float = STATIONARY_EIG_TOL) -> np.ndarray:
    """Stationary distribution of a row-stochastic ergodic matrix.

    Uses the left eigenvector for the eigenvalue nearest 1; falls back to
    damped power iteration on numerical failure. Raises NonErgodicError when
    the eigenvalue 1 is not unique within `tol`.
    """
    p = np.asarray(markov, dtype=float)
    if p.ndim != 2 or p.shape[0] != p.shape[1]:
        raise DimensionError(f"markov matrix must be square, got shape {p.shape}")
    eigvals, eigvecs = np.linalg.eig(p.T)
    near_one = np.abs(eigvals - 1.0) < tol
    if int(near_one.sum()) > 1:
        raise NonErgodicError(
            f"{int(near_one.sum())} eigenvalues within {tol} of 1; "
            "stationary distribution is not unique"
        )
    k = int(np.argmin(np.abs(eigvals - 1.0)))
    if abs(eigvals[k] - 1.0) < tol:
        sigma = np.real(eigvecs[:, k])
        total = sigma.sum()
        if abs(total) > 0.0:
            sigma = sigma / total
            sigma = np.where(sigma < STATIONARY_CLAMP, 0.0, sigma)
            total = sigma.sum()
            if total > 0.0:
                sigma = sigma / total
                if np.max(np.abs(sigma @ p - sigma)) < 1e-10:
                    return sigma
    return _stationary_power_iteration(p)


def _stationary_power_iteration(p: np.ndarray) -> np.ndarray:
    # Damped (lazy) chain keeps the same stationary vector but is aperiodic.
    z = p.shape[0]
    lazy = 0.5 * (p + np.eye(z))
    v = np.full(z, 1.0 / z)
    for _ in range(POWER_ITER_MAX):
        nxt = v @ lazy
        nxt = nxt / nxt.sum()
        if np.max(np.abs(nxt - v)) < POWER_ITER_TOL:
            v = nxt
            break
        v = nxt
    if np.max(np.abs(v @ p - v)) > 1e-9:
        raise NonErgodicError("power iteration failed to find a stationary distribution")
    v = np.where(v < STATIONARY_CLAMP, 0.0, v)
    return v / v.sum()


def state_values(game: Game, x: np.ndarray, gammas) -> np.ndarray:
    """(N, Z) discounted state values, normalized to reward units.

    Solves the per-agent linear system (I - gamma * T_eff) V = (1 - gamma) * Ravg
    by factorization rather than explicit inversion.
    """
    gam = _validated_gammas(game, gammas)
    t_eff = effective_transition_matrix(game, x)
    r_avg = avg_reward_state(game, x)
    eye = np.eye(game.n_states)
    values = np.empty_like(r_avg)
    for i in range(game.n_agents):
        values[i] = np.linalg.solve(eye - gam[i] * t_eff, (1.0 - gam[i]) * r_avg[i])
    return values


def state_action_values(game: Game, x: np.ndarray, gammas) -> np.ndarray:
    """(N, Z, M) state-action values.

    Entry (i, s, a) combines the expected reward with the agent's own action
    held fixed and the discounted next-state value under the full profile
    average, so that the profile-weighted action values recover the state
    values exactly.
    """
    gam = _validated_gammas(game, gammas)
    t_eff = effective_transition_matrix(game, x)
    values = state_values(game, x, gammas)
    out = np.empty((game.n_agents, game.n_states, game.n_actions))
    for i in range(game.n_agents):
        out[i] = (1.0 - gam[i]) * avg_reward_state_action(game, x, i) + gam[i] * (
            t_eff @ values[i]
        )[:, None]
    return out


def performance(game: Game, x: np.ndarray, gammas=None) -> np.ndarray:
    """(N,) stationary-weighted average reward per time step.

    Independent of the discount factors: it equals the dot product of the
    stationary distribution with the per-state average reward (and with the
    state values, for any discount).
    """
    sigma = stationary_distribution(effective_transition_matrix(game, x))
    return avg_reward_state(game, x) @ sigma
