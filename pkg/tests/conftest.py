import pytest

from tabletop_rl import games
from tabletop_rl.engine import reset
from tabletop_rl.rng import RandomStream

ALL_GAMES = tuple(games.game_ids())
HIDDEN_GAMES = tuple(
    g for g in ALL_GAMES if not games.game_spec(g).perfect_info
)
SCORE_GAMES = tuple(g for g in ALL_GAMES if games.game_spec(g).has_score)


def random_playout(game_id, num_players, seed, on_step=None, max_steps=5000):
    """Drive one episode with uniformly random legal actions."""
    state = reset(game_id, num_players, seed)
    rng = RandomStream(seed ^ 0x5EED)
    steps = 0
    while not state.is_terminal():
        legal = state.legal_action_ids()
        if on_step is not None:
            on_step(state, legal)
        state.apply(legal[rng.randrange(len(legal))])
        steps += 1
        if steps > max_steps:
            pytest.fail(f"{game_id} exceeded {max_steps} steps")
    return state


def mid_game_state(game_id, num_players, seed, plies):
    """A running state reached by a fixed number of random plies."""
    state = reset(game_id, num_players, seed)
    rng = RandomStream(seed ^ 0x31D)
    for _ in range(plies):
        if state.is_terminal():
            break
        legal = state.legal_action_ids()
        state.apply(legal[rng.randrange(len(legal))])
    return state
