"""Reward functions: unit values, deltas, telescoping, rank statistics."""
import pytest

from conftest import SCORE_GAMES
from tabletop_rl import games
from tabletop_rl.engine import ranks_from_scores, reset
from tabletop_rl.rewards import (
    RewardAccumulator,
    RewardError,
    RewardMode,
    leader_value,
    mode_value,
    ordinal_value,
    parse_mode,
    score_value,
    step_reward,
    terminal_reward,
)
from tabletop_rl.rng import RandomStream


def finished_tictactoe(win=True):
    for seed in range(64):
        s = reset("tictactoe", 2, seed)
        if s.current_player() == 0:
            break
    if win:
        for a in (0, 3, 1, 4):
            s.apply(a)
        return s, s.apply(2)
    for a in (0, 1, 2, 4, 3, 5, 7, 6, 8):
        result = s.apply(a)
    return s, result


def test_terminal_reward_values():
    _, result = finished_tictactoe(win=True)
    assert terminal_reward(result, 0) == 1.0
    assert terminal_reward(result, 1) == -1.0
    _, draw = finished_tictactoe(win=False)
    assert terminal_reward(draw, 0) == 0.5
    assert terminal_reward(draw, 1) == 0.5


def test_score_value_examples():
    s = reset("dotsandboxes", 2, 0)
    s.box_scores = [3, 1]
    assert score_value(s, 0) == 3.0
    assert score_value(s, 1) == 1.0
    d = reset("diamant", 2, 0)
    assert score_value(d, 0) == 0.0
    ll = reset("loveletter", 2, 0)
    ll.tokens = [2, 0]
    assert score_value(ll, 0) == 2.0


def test_score_mode_requires_score():
    s = reset("tictactoe", 2, 0)
    with pytest.raises(RewardError):
        score_value(s, 0)
    with pytest.raises(RewardError):
        leader_value(s, 0)
    # ordinal is available for every game
    assert ordinal_value(s, 0) == 1.0


def test_leader_value_examples():
    s = reset("dotsandboxes", 2, 0)
    s.box_scores = [5, 3]
    assert leader_value(s, 0) == 0.0
    assert leader_value(s, 1) == -2.0
    s.box_scores = [4, 4]
    assert leader_value(s, 0) == 0.0
    assert leader_value(s, 1) == 0.0


def test_leader_zero_exactly_for_maximal_players():
    rng = RandomStream(3)
    s = reset("dotsandboxes", 4, 0)
    for _ in range(200):
        s.box_scores = [rng.randrange(10) for _ in range(4)]
        top = max(s.box_scores)
        for p in range(4):
            assert (leader_value(s, p) == 0.0) == (s.box_scores[p] == top)


def test_ordinal_value_examples():
    s = reset("dotsandboxes", 4, 0)
    s.box_scores = [9, 5, 3, 1]
    assert ordinal_value(s, 0) == 1.0
    assert ordinal_value(s, 3) == 0.0
    s.box_scores = [7, 7, 1, 0]
    assert ordinal_value(s, 0) == 1.0
    assert ordinal_value(s, 1) == 1.0


def test_ordinal_is_a_rank_statistic():
    rng = RandomStream(9)
    s = reset("dotsandboxes", 3, 0)
    for _ in range(100):
        scores = [rng.randrange(20) for _ in range(3)]
        s.box_scores = scores
        base = [ordinal_value(s, p) for p in range(3)]
        s.box_scores = [3 * x * x + 1 for x in scores]  # strictly increasing map
        assert [ordinal_value(s, p) for p in range(3)] == base


def test_step_reward_delta_semantics():
    s = reset("dotsandboxes", 2, 0)
    acc = RewardAccumulator(RewardMode.SCORE, s)
    s.box_scores = [3, 0]
    assert step_reward(RewardMode.SCORE, acc, s, 0) == 3.0
    s.box_scores = [7, 0]
    assert step_reward(RewardMode.SCORE, acc, s, 0) == 4.0
    # nothing lost, nothing double-counted
    assert step_reward(RewardMode.SCORE, acc, s, 0) == 0.0


def test_terminal_mode_sparse():
    s = reset("tictactoe", 2, 0)
    acc = RewardAccumulator(RewardMode.TERMINAL, s)
    assert step_reward(RewardMode.TERMINAL, acc, s, 0) == 0.0
    while not s.is_terminal():
        s.apply(s.legal_action_ids()[0])
    r0 = step_reward(RewardMode.TERMINAL, acc, s, 0)
    r1 = step_reward(RewardMode.TERMINAL, acc, s, 1)
    assert {r0, r1} <= {1.0, -1.0, 0.5}
    assert r0 == terminal_reward(s.result(), 0)


def test_mode_mismatch_rejected():
    s = reset("tictactoe", 2, 0)
    acc = RewardAccumulator(RewardMode.TERMINAL, s)
    with pytest.raises(RewardError):
        step_reward(RewardMode.ORDINAL, acc, s, 0)


def test_parse_mode():
    assert parse_mode("score") is RewardMode.SCORE
    assert parse_mode("TERMINAL") is RewardMode.TERMINAL
    with pytest.raises(RewardError):
        parse_mode("bogus")


@pytest.mark.parametrize("game_id", SCORE_GAMES)
def test_telescoping_score_deltas_sum_to_final_score(game_id):
    """Per player and episode: sum of SCORE deltas equals the final score."""
    spec = games.game_spec(game_id)
    for seed in range(8):
        n = spec.min_players if seed % 2 == 0 else spec.max_players
        state = reset(game_id, n, seed)
        acc = RewardAccumulator(RewardMode.SCORE, state)
        totals = [0.0] * n
        rng = RandomStream(seed)
        steps = 0
        while not state.is_terminal():
            p = state.current_player()
            totals[p] += acc.on_decision(state, p)
            legal = state.legal_action_ids()
            state.apply(legal[rng.randrange(len(legal))])
            steps += 1
            assert steps < 5000
        for p in range(n):
            totals[p] += acc.on_terminal(state, p)
        final = state.scores()
        for p in range(n):
            assert totals[p] == pytest.approx(final[p], abs=1e-9)


@pytest.mark.parametrize("mode", [RewardMode.LEADER, RewardMode.ORDINAL])
def test_telescoping_other_modes(mode):
    for seed in range(4):
        state = reset("dotsandboxes", 2, seed)
        acc = RewardAccumulator(mode, state)
        initial = [mode_value(mode, state, p) for p in range(2)]
        totals = [0.0] * 2
        rng = RandomStream(seed)
        while not state.is_terminal():
            p = state.current_player()
            totals[p] += acc.on_decision(state, p)
            legal = state.legal_action_ids()
            state.apply(legal[rng.randrange(len(legal))])
        for p in range(2):
            totals[p] += acc.on_terminal(state, p)
            expected = mode_value(mode, state, p) - initial[p]
            assert totals[p] == pytest.approx(expected, abs=1e-9)


def test_ranks_from_scores_shared_best():
    assert ranks_from_scores([5, 5, 1]) == (1, 1, 3)
    assert ranks_from_scores([1, 2, 3]) == (3, 2, 1)
    assert ranks_from_scores([2, 2, 2]) == (1, 1, 1)
