import json

import numpy as np
import pytest

from tdlim import (
    GameFormatError,
    load_game,
    performance,
    random_game,
    resolve_game,
    save_game,
    two_state_matching_pennies,
    two_state_prisoners_dilemma,
    uniform_profile,
)


def test_mp_transition_entries(mp):
    # jump to state 2 happens exactly when agent 1 plays action 1 in state 1
    for a1 in range(2):
        for a2 in range(2):
            assert mp.transitions[0, a1, a2, 1] == (1.0 if a1 == 0 else 0.0)
            assert mp.transitions[1, a1, a2, 0] == (1.0 if a1 == 1 else 0.0)


def test_mp_agent2_cannot_influence_transitions(mp):
    assert np.array_equal(mp.transitions[:, :, 0, :], mp.transitions[:, :, 1, :])


def test_mp_rewards_zero_sum(mp):
    assert np.array_equal(mp.rewards.sum(axis=0), np.ones((2, 2, 2, 2)))


def test_mp_uniform_performance(mp):
    assert np.allclose(performance(mp, uniform_profile(mp)), [0.5, 0.5])


def test_mp_row_sums_exact(mp, pd):
    for game in (mp, pd):
        assert np.array_equal(game.transitions.sum(axis=-1), np.ones((2, 2, 2)))


def test_pd_transition_entries(pd):
    for s in range(2):
        for a in range(2):
            assert pd.transitions[s, a, a, 1 - s] == 0.1
            assert pd.transitions[s, a, 1 - a, 1 - s] == 0.9


def test_pd_payoff_entries(pd):
    # state-1 cell (cooperate, defect) pays (0, 10); all-defect pays (2, 2) / (1, 1)
    assert pd.rewards[0, 0, 0, 1, 0] == 0.0 and pd.rewards[1, 0, 0, 1, 0] == 10.0
    assert pd.rewards[0, 0, 1, 1, 1] == 2.0 and pd.rewards[1, 0, 1, 1, 0] == 2.0
    assert pd.rewards[0, 1, 1, 1, 0] == 1.0 and pd.rewards[1, 1, 1, 1, 1] == 1.0
    assert pd.rewards[0, 1, 0, 0, 0] == 4.0


def test_save_load_round_trip(tmp_path, mp):
    path = tmp_path / "mp.json"
    save_game(mp, path)
    loaded = load_game(path)
    assert np.array_equal(loaded.transitions, mp.transitions)
    assert np.array_equal(loaded.rewards, mp.rewards)
    assert (loaded.n_agents, loaded.n_states, loaded.n_actions) == (2, 2, 2)


def test_load_rejects_bad_row_sum(tmp_path, mp):
    payload = {
        "n_agents": 2,
        "n_states": 2,
        "n_actions": 2,
        "transitions": mp.transitions.tolist(),
        "rewards": mp.rewards.tolist(),
    }
    payload["transitions"][0][1][0] = [0.4, 0.5]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(payload))
    with pytest.raises(GameFormatError, match=r"state=0.*joint_action=\(1, 0\)"):
        load_game(path)


def test_load_rejects_missing_field(tmp_path):
    path = tmp_path / "missing.json"
    path.write_text(json.dumps({"n_agents": 2}))
    with pytest.raises(GameFormatError, match="missing"):
        load_game(path)


def test_load_rejects_unparseable(tmp_path):
    path = tmp_path / "garbage.json"
    path.write_text("not json {")
    with pytest.raises(GameFormatError, match="parse"):
        load_game(path)


def test_three_agent_random_game_round_trip(tmp_path, rng):
    game = random_game(3, 2, 2, rng)
    path = tmp_path / "random.json"
    save_game(game, path)
    loaded = load_game(path)
    assert np.array_equal(loaded.transitions, game.transitions)
    assert np.array_equal(loaded.rewards, game.rewards)


def test_resolve_builtin_names():
    assert resolve_game("matching_pennies").n_states == 2
    assert resolve_game("prisoners_dilemma").rewards.max() == 10.0


def test_builtins_equal_constructors(mp, pd):
    assert np.array_equal(two_state_matching_pennies().rewards, mp.rewards)
    assert np.array_equal(two_state_prisoners_dilemma().transitions, pd.transitions)
