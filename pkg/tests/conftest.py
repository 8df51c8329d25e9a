import numpy as np
import pytest

from tdlim import (
    random_game,
    two_state_matching_pennies,
    two_state_prisoners_dilemma,
)

# Paper-style tuple order (X1_11, X2_11, X1_21, X2_21) for the standard
# initial condition (0.01, 0.99, 0.3, 0.4), expanded to the full profile.
FIG2_X0 = np.array(
    [
        [[0.01, 0.99], [0.30, 0.70]],
        [[0.99, 0.01], [0.40, 0.60]],
    ]
)


@pytest.fixture(scope="session")
def mp():
    return two_state_matching_pennies()


@pytest.fixture(scope="session")
def pd():
    return two_state_prisoners_dilemma()


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_interior_profile(game, rng, low=0.05):
    x = rng.uniform(low, 1.0, (game.n_agents, game.n_states, game.n_actions))
    return x / x.sum(axis=2, keepdims=True)


def random_suite(rng, count, max_agents=3, max_states=4, max_actions=3):
    """Random valid games with interior profiles, shared by several tests."""
    for _ in range(count):
        n = int(rng.integers(1, max_agents + 1))
        z = int(rng.integers(1, max_states + 1))
        m = int(rng.integers(1, max_actions + 1))
        game = random_game(n, z, m, rng)
        yield game, random_interior_profile(game, rng)
