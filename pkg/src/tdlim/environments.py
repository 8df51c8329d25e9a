"""Built-in benchmark games and the JSON game-definition loader."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import GameFormatError
from .game import Game

BUILTIN_NAMES = ("matching_pennies", "prisoners_dilemma")


def two_state_matching_pennies() -> Game:
    """Two-agent, two-state, two-action zero-sum coordination game.

    Agent 1 alone controls the state: playing action 0 in state 0 moves the
    play to state 1, playing action 1 in state 1 moves it back. The roles of
    matcher and mismatcher swap between the states.
    """
    n, z, m = 2, 2, 2
    payoff = np.array(
        [
            [[[1, 0], [0, 1]], [[0, 1], [1, 0]]],  # state 0: (a1, a2) -> (r1, r2)
            [[[0, 1], [1, 0]], [[1, 0], [0, 1]]],  # state 1: roles swapped
        ],
        dtype=float,
    )
    rewards = np.empty((n, z, m, m, z))
    for i in range(n):
        for s in range(z):
            for s_next in range(z):
                rewards[i, s, :, :, s_next] = payoff[s, :, :, i]
    transitions = np.zeros((z, m, m, z))
    # switch probability depends only on agent 1's action
    transitions[0, 0, :, 1] = 1.0
    transitions[0, 1, :, 0] = 1.0
    transitions[1, 0, :, 1] = 1.0
    transitions[1, 1, :, 0] = 1.0
    return Game(n, z, m, transitions, rewards)


def two_state_prisoners_dilemma() -> Game:
    """Two-agent, two-state social-dilemma game with stochastic transitions.

    Action 0 is cooperate, action 1 defect. Matching joint actions switch the
    state with probability 0.1, opposing ones with probability 0.9; the same
    transition matrix applies in both states.
    """
    n, z, m = 2, 2, 2
    payoff = np.array(
        [
            [[[3, 3], [0, 10]], [[10, 0], [2, 2]]],
            [[[4, 4], [0, 10]], [[10, 0], [1, 1]]],
        ],
        dtype=float,
    )
    rewards = np.empty((n, z, m, m, z))
    for i in range(n):
        for s in range(z):
            for s_next in range(z):
                rewards[i, s, :, :, s_next] = payoff[s, :, :, i]
    transitions = np.empty((z, m, m, z))
    for s in range(z):
        for a1 in range(m):
            for a2 in range(m):
                switch = 0.1 if a1 == a2 else 0.9
                transitions[s, a1, a2, 1 - s] = switch
                transitions[s, a1, a2, s] = 1.0 - switch
    return Game(n, z, m, transitions, rewards)


_BUILTINS = {
    "matching_pennies": two_state_matching_pennies,
    "prisoners_dilemma": two_state_prisoners_dilemma,
}


def builtin_game(name: str) -> Game:
    try:
        return _BUILTINS[name]()
    except KeyError:
        raise GameFormatError(
            f"unknown builtin game {name!r}; available: {', '.join(BUILTIN_NAMES)}"
        ) from None


def load_game(path) -> Game:
    """Load a game from its JSON definition file.

    The file carries `n_agents`, `n_states`, `n_actions`, `transitions`
    (nested lists: state, then one action index per agent, then next state)
    and `rewards` (agent, then as transitions). All Game invariants are
    enforced on load.
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise GameFormatError(f"could not parse game file {path}: {exc}") from exc
    try:
        n_agents = int(raw["n_agents"])
        n_states = int(raw["n_states"])
        n_actions = int(raw["n_actions"])
        transitions = np.asarray(raw["transitions"], dtype=float)
        rewards = np.asarray(raw["rewards"], dtype=float)
    except KeyError as exc:
        raise GameFormatError(f"game file {path} is missing field {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise GameFormatError(f"game file {path} has malformed tensors: {exc}") from exc
    return Game(n_agents, n_states, n_actions, transitions, rewards)


def save_game(game: Game, path) -> None:
    """Write a game to the JSON definition format (round-trips bitwise)."""
    payload = {
        "n_agents": game.n_agents,
        "n_states": game.n_states,
        "n_actions": game.n_actions,
        "transitions": game.transitions.tolist(),
        "rewards": game.rewards.tolist(),
    }
    Path(path).write_text(json.dumps(payload) + "\n")


def resolve_game(spec: str) -> Game:
    """Interpret a CLI-style game reference: a builtin name or a file path."""
    if spec in _BUILTINS:
        return _BUILTINS[spec]()
    return load_game(spec)


def random_game(
    n_agents: int,
    n_states: int,
    n_actions: int,
    rng: np.random.Generator,
    reward_low: float = -1.0,
    reward_high: float = 1.0,
) -> Game:
    """A random fully-mixed game; strictly positive transitions keep it ergodic."""
    t_shape = (n_states,) + (n_actions,) * n_agents + (n_states,)
    transitions = rng.uniform(0.05, 1.0, size=t_shape)
    transitions = transitions / transitions.sum(axis=-1, keepdims=True)
    rewards = rng.uniform(reward_low, reward_high, size=(n_agents,) + t_shape)
    return Game(n_agents, n_states, n_actions, transitions, rewards)
