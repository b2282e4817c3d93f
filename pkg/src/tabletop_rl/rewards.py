"""Game-agnostic reward functions with deferred delivery.

Rewards accrue between a player's decision points: each mode defines a
progress value over states, and the reward attached to a transition is
the change in that value between the player's consecutive decision points
(or the terminal step). Summed over an episode the deltas telescope to
final minus initial value, so using the score as reward yields exactly
the final score as the undiscounted return.
"""
from __future__ import annotations

from enum import Enum

from .engine import GameResult, GameState, Outcome


class RewardError(Exception):
    """Reward mode unsupported for the game, or misuse of the accumulator."""


class RewardMode(str, Enum):
    TERMINAL = "terminal"
    SCORE = "score"
    LEADER = "leader"
    ORDINAL = "ordinal"


def parse_mode(name: str) -> RewardMode:
    try:
        return RewardMode(name.lower())
    except ValueError:
        raise RewardError(f"unknown reward mode {name!r}") from None


def check_mode_supported(mode: RewardMode, has_score: bool) -> None:
    if mode in (RewardMode.SCORE, RewardMode.LEADER) and not has_score:
        raise RewardError(f"reward mode {mode.value} requires a game with a score")


def terminal_reward(result: GameResult, player: int) -> float:
    if result is None:
        raise RewardError("terminal reward requested on a running state")
    outcome = result.outcomes[player]
    if outcome == Outcome.WIN:
        return 1.0
    if outcome == Outcome.LOSS:
        return -1.0
    return 0.5  # draw


def score_value(state: GameState, player: int) -> float:
    check_mode_supported(RewardMode.SCORE, state.spec.has_score)
    return state.scores()[player]


def leader_value(state: GameState, player: int) -> float:
    """Own score minus the leader's: 0 iff leading or tied for the lead."""
    check_mode_supported(RewardMode.LEADER, state.spec.has_score)
    scores = state.scores()
    return scores[player] - max(scores)


def ordinal_value(state: GameState, player: int) -> float:
    """Rank position scaled to [0, 1]; rank 1 maps to 1, last to 0."""
    n = state.num_players
    rank = state.current_ranks()[player]
    return (n - rank) / (n - 1)


def mode_value(mode: RewardMode, state: GameState, player: int) -> float:
    """The progress value whose deltas form the step rewards.

    TERMINAL is 0 on running states and the terminal reward at the end, so
    its deltas reproduce the sparse win/loss/draw signal.
    """
    if mode == RewardMode.TERMINAL:
        result = state.result()
        return terminal_reward(result, player) if result is not None else 0.0
    if mode == RewardMode.SCORE:
        return score_value(state, player)
    if mode == RewardMode.LEADER:
        return leader_value(state, player)
    return ordinal_value(state, player)


class RewardAccumulator:
    """Per-player deferred reward bookkeeping for one episode.

    ``on_decision(p)`` must be called exactly when player p is about to
    act; ``on_terminal(p)`` once per player at the end. Each returns the
    reward earned since p's previous decision point. Every accrued delta
    is delivered exactly once.
    """

    def __init__(self, mode: RewardMode, state: GameState):
        check_mode_supported(mode, state.spec.has_score)
        self.mode = mode
        self._last = [mode_value(mode, state, p) for p in range(state.num_players)]

    def _step(self, state: GameState, player: int) -> float:
        now = mode_value(self.mode, state, player)
        delta = now - self._last[player]
        self._last[player] = now
        return delta

    def on_decision(self, state: GameState, player: int) -> float:
        return self._step(state, player)

    def on_terminal(self, state: GameState, player: int) -> float:
        if not state.is_terminal():
            raise RewardError("on_terminal called on a running state")
        return self._step(state, player)

    def flush_to_now(self, state: GameState, player: int) -> float:
        """Consume the pending delta mid-window (used at buffer flushes)."""
        return self._step(state, player)


def step_reward(
    mode: RewardMode, acc: RewardAccumulator, state: GameState, player: int
) -> float:
    """Reward delivered to ``player`` at its decision point (or terminal)."""
    if acc.mode != mode:
        raise RewardError("accumulator was built for a different mode")
    if state.is_terminal():
        return acc.on_terminal(state, player)
    return acc.on_decision(state, player)
