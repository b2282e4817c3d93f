"""Tic Tac Toe on a 3x3 grid.

Actions 0..8 pick the cell (row-major). Observation is the flattened
board from the observer's point of view: +1 own mark, -1 opponent, 0 empty.
"""
from __future__ import annotations

import numpy as np

from ..engine import GameResult, GameSpec, GameState, Outcome, register
from ..rng import RandomStream

LINES = (
    (0, 1, 2), (3, 4, 5), (6, 7, 8),
    (0, 3, 6), (1, 4, 7), (2, 5, 8),
    (0, 4, 8), (2, 4, 6),
)


def layout(num_players: int) -> list[tuple[str, int]]:
    return [("board", 9)]


@register
class TicTacToeState(GameState):
    __slots__ = ("board",)

    spec = GameSpec(
        game_id="tictactoe",
        min_players=2,
        max_players=2,
        action_count=9,
        obs_len=lambda n: 9,
        perfect_info=True,
        simultaneous=False,
        has_score=False,
    )

    def __init__(self, num_players: int, seed: int):
        super().__init__(num_players, seed)
        self.board = [-1] * 9  # -1 empty, else owning player
        self.to_act = self.rng.randrange(2)

    def _legal_action_ids(self) -> list[int]:
        board = self.board
        return [c for c in range(9) if board[c] == -1]

    def _apply(self, action: int) -> None:
        me = self.to_act
        board = self.board
        board[action] = me
        for a, b, c in LINES:
            if board[a] == me and board[b] == me and board[c] == me:
                outcomes = [Outcome.LOSS, Outcome.LOSS]
                outcomes[me] = Outcome.WIN
                ranks = [2, 2]
                ranks[me] = 1
                self._result = GameResult(tuple(outcomes), (0.0, 0.0), tuple(ranks))
                return
        if -1 not in board:
            self._result = GameResult(
                (Outcome.DRAW, Outcome.DRAW), (0.0, 0.0), (1, 1)
            )
            return
        self.to_act = 1 - me

    def _observe_into(self, buf: np.ndarray, player: int) -> None:
        for c, owner in enumerate(self.board):
            if owner != -1:
                buf[c] = 1.0 if owner == player else -1.0

    def _clone_into(self, new: "TicTacToeState") -> None:
        new.board = self.board.copy()

    def _redeterminize(self, observer: int, resample: RandomStream) -> None:
        pass  # perfect information

    def _payload(self) -> list[int]:
        return self.board
