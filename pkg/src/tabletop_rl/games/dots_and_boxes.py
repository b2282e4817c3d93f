"""Dots and Boxes on a 7x5 box grid (82 edges, 35 boxes).

Actions 0..81 draw an edge: ids 0..41 are horizontal edges (row-major over
6 rows of 7), ids 42..81 vertical (row-major over 5 rows of 8). Completing
a box scores a point and grants another turn. Observation is the 82 edges:
+1 drawn by the observer, -1 drawn by anyone else, 0 undrawn.
"""
from __future__ import annotations

import numpy as np

from ..engine import GameSpec, GameState, register, result_from_scores
from ..rng import RandomStream

COLS, ROWS = 7, 5
N_H = (ROWS + 1) * COLS  # 42
N_EDGES = N_H + ROWS * (COLS + 1)  # 82
N_BOXES = COLS * ROWS  # 35


def _h(r: int, c: int) -> int:
    return r * COLS + c


def _v(r: int, c: int) -> int:
    return N_H + r * (COLS + 1) + c


# box index -> its 4 edge ids, and edge id -> adjacent box indices
BOX_EDGES: list[tuple[int, int, int, int]] = []
EDGE_BOXES: list[list[int]] = [[] for _ in range(N_EDGES)]
for _r in range(ROWS):
    for _c in range(COLS):
        box = _r * COLS + _c
        edges = (_h(_r, _c), _h(_r + 1, _c), _v(_r, _c), _v(_r, _c + 1))
        BOX_EDGES.append(edges)
        for e in edges:
            EDGE_BOXES[e].append(box)


def layout(num_players: int) -> list[tuple[str, int]]:
    return [("edges", N_EDGES)]


@register
class DotsAndBoxesState(GameState):
    __slots__ = ("edge_owner", "box_owner", "box_scores", "edges_left")

    spec = GameSpec(
        game_id="dotsandboxes",
        min_players=2,
        max_players=4,
        action_count=N_EDGES,
        obs_len=lambda n: N_EDGES,
        perfect_info=True,
        simultaneous=False,
        has_score=True,
        max_score_hint=float(N_BOXES),
    )

    def __init__(self, num_players: int, seed: int):
        super().__init__(num_players, seed)
        self.edge_owner = [-1] * N_EDGES
        self.box_owner = [-1] * N_BOXES
        self.box_scores = [0] * num_players
        self.edges_left = N_EDGES
        self.to_act = self.rng.randrange(num_players)

    def _legal_action_ids(self) -> list[int]:
        owner = self.edge_owner
        return [e for e in range(N_EDGES) if owner[e] == -1]

    def _apply(self, action: int) -> None:
        me = self.to_act
        self.edge_owner[action] = me
        self.edges_left -= 1
        completed = 0
        for box in EDGE_BOXES[action]:
            a, b, c, d = BOX_EDGES[box]
            eo = self.edge_owner
            if eo[a] != -1 and eo[b] != -1 and eo[c] != -1 and eo[d] != -1:
                self.box_owner[box] = me
                completed += 1
        if completed:
            self.box_scores[me] += completed
        if self.edges_left == 0:
            self._result = result_from_scores(self.box_scores)
            return
        if not completed:
            self.to_act = (me + 1) % self.num_players

    def _observe_into(self, buf: np.ndarray, player: int) -> None:
        for e, owner in enumerate(self.edge_owner):
            if owner != -1:
                buf[e] = 1.0 if owner == player else -1.0

    def scores(self) -> tuple[float, ...]:
        return tuple(float(s) for s in self.box_scores)

    def _clone_into(self, new: "DotsAndBoxesState") -> None:
        new.edge_owner = self.edge_owner.copy()
        new.box_owner = self.box_owner.copy()
        new.box_scores = self.box_scores.copy()
        new.edges_left = self.edges_left

    def _redeterminize(self, observer: int, resample: RandomStream) -> None:
        pass  # perfect information

    def _payload(self) -> list[int]:
        return self.edge_owner + self.box_owner + self.box_scores
