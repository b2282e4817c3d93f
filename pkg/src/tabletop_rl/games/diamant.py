"""Diamant: push-your-luck cave exploration for 2-5 players.

Five cave rounds over a 30-card deck: 15 treasure cards and 5 hazard
types x 3 copies. A round ends when a second copy of the same hazard is
revealed (everyone still in the cave loses their pocket gems, one copy of
that hazard leaves the game) or when every player has retreated. Players
decide simultaneously each flip; decisions are sequentialized as a hidden
commitment phase in seat order. Players already at camp commit the dummy
action (2) with no effect.

Actions: 0 stay in the cave, 1 retreat to camp, 2 dummy (camp only).
"""
from __future__ import annotations

import numpy as np

from ..engine import GameSpec, GameState, register, result_from_scores
from ..rng import RandomStream

TREASURE_VALUES = (1, 2, 3, 4, 5, 5, 7, 7, 9, 11, 11, 13, 14, 15, 17)
N_TREASURE = len(TREASURE_VALUES)  # card ids 0..14
N_HAZARD_TYPES = 5  # card ids 15..19
HAZARD_COPIES = 3
N_ROUNDS = 5

STAY, LEAVE, DUMMY = 0, 1, 2


def _full_deck() -> list[int]:
    deck = list(range(N_TREASURE))
    for h in range(N_HAZARD_TYPES):
        deck.extend([N_TREASURE + h] * HAZARD_COPIES)
    return deck


def layout(num_players: int) -> list[tuple[str, int]]:
    spans = [
        ("treasure_tiles", 1),
        ("hazard_tiles", N_HAZARD_TYPES),
        ("last_tile_gems", 1),
        ("path_gems", 1),
    ]
    for k in range(num_players):
        who = "self" if k == 0 else f"opp{k}"
        spans += [(f"{who}_banked", 1), (f"{who}_pocket", 1), (f"{who}_in_cave", 1)]
    return spans


@register
class DiamantState(GameState):
    __slots__ = (
        "start_player", "round_no", "deck", "path", "tile_gems",
        "in_cave", "banked", "pocket", "commits", "removed",
    )

    spec = GameSpec(
        game_id="diamant",
        min_players=2,
        max_players=5,
        action_count=3,
        obs_len=lambda n: 8 + 3 * n,
        perfect_info=False,
        simultaneous=True,
        has_score=True,
        max_score_hint=float(sum(TREASURE_VALUES)),
    )

    def __init__(self, num_players: int, seed: int):
        super().__init__(num_players, seed)
        n = num_players
        self.start_player = self.rng.randrange(n)
        self.round_no = 0
        self.deck: list[int] = []
        self.path: list[int] = []
        self.tile_gems: list[int] = []
        self.in_cave = [True] * n
        self.banked = [0] * n
        self.pocket = [0] * n
        self.commits = [-1] * n
        self.removed: list[int] = []
        self._start_round()

    # -- round machinery ------------------------------------------------

    def _start_round(self) -> None:
        deck = _full_deck()
        for card in self.removed:
            deck.remove(card)
        self.rng.shuffle(deck)
        self.deck = deck
        self.path = []
        self.tile_gems = []
        self.in_cave = [True] * self.num_players
        self.pocket = [0] * self.num_players
        self._reveal()

    def _reveal(self) -> None:
        """Flip the next card; may end the round (bust or exhausted deck)."""
        if not self.deck:
            # Deck exhausted: remaining explorers return safely.
            for p in range(self.num_players):
                if self.in_cave[p]:
                    self.banked[p] += self.pocket[p]
                    self.pocket[p] = 0
                    self.in_cave[p] = False
            self._end_round()
            return
        card = self.deck.pop()
        self.path.append(card)
        if card < N_TREASURE:
            value = TREASURE_VALUES[card]
            explorers = self.in_cave.count(True)
            share = value // explorers
            for p in range(self.num_players):
                if self.in_cave[p]:
                    self.pocket[p] += share
            self.tile_gems.append(value - share * explorers)
            self._open_phase()
        else:
            self.tile_gems.append(0)
            if self.path.count(card) >= 2:
                # Bust: pockets are lost, one copy of the hazard leaves the game.
                for p in range(self.num_players):
                    if self.in_cave[p]:
                        self.pocket[p] = 0
                        self.in_cave[p] = False
                self.removed.append(card)
                self._end_round()
            else:
                self._open_phase()

    def _open_phase(self) -> None:
        self.commits = [-1] * self.num_players
        self.to_act = self._next_committer()

    def _next_committer(self) -> int:
        n = self.num_players
        for i in range(n):
            p = (self.start_player + i) % n
            if self.commits[p] == -1:
                return p
        return -1

    def _end_round(self) -> None:
        self.round_no += 1
        if self.round_no >= N_ROUNDS:
            self._result = result_from_scores(self.banked)
        else:
            self._start_round()

    # -- engine hooks ----------------------------------------------------

    def _legal_action_ids(self) -> list[int]:
        if self.in_cave[self.to_act]:
            return [STAY, LEAVE]
        return [DUMMY]

    def _apply(self, action: int) -> None:
        self.commits[self.to_act] = action
        nxt = self._next_committer()
        if nxt != -1:
            self.to_act = nxt
            return
        # Phase complete: resolve retreats, then flip for the stayers.
        leavers = [
            p for p in range(self.num_players)
            if self.in_cave[p] and self.commits[p] == LEAVE
        ]
        if leavers:
            loot = sum(self.tile_gems)
            share = loot // len(leavers)
            for p in leavers:
                self.banked[p] += self.pocket[p] + share
                self.pocket[p] = 0
                self.in_cave[p] = False
            if loot:
                remainder = loot - share * len(leavers)
                self.tile_gems = [0] * len(self.tile_gems)
                if self.tile_gems:
                    self.tile_gems[-1] = remainder
        if self.in_cave.count(True) == 0:
            self._end_round()
        else:
            self._reveal()

    def _observe_into(self, buf: np.ndarray, player: int) -> None:
        haz = [0] * N_HAZARD_TYPES
        treasure = 0
        for card in self.path:
            if card < N_TREASURE:
                treasure += 1
            else:
                haz[card - N_TREASURE] += 1
        buf[0] = treasure
        buf[1:6] = haz
        buf[6] = self.tile_gems[-1] if self.tile_gems else 0
        buf[7] = sum(self.tile_gems)
        n = self.num_players
        for k in range(n):
            p = (player + k) % n
            buf[8 + 3 * k] = self.banked[p]
            buf[8 + 3 * k + 1] = self.pocket[p]
            buf[8 + 3 * k + 2] = 1.0 if self.in_cave[p] else 0.0

    def scores(self) -> tuple[float, ...]:
        return tuple(float(b) for b in self.banked)

    def _clone_into(self, new: "DiamantState") -> None:
        new.start_player = self.start_player
        new.round_no = self.round_no
        new.deck = self.deck.copy()
        new.path = self.path.copy()
        new.tile_gems = self.tile_gems.copy()
        new.in_cave = self.in_cave.copy()
        new.banked = self.banked.copy()
        new.pocket = self.pocket.copy()
        new.commits = self.commits.copy()
        new.removed = self.removed.copy()

    def _redeterminize(self, observer: int, resample: RandomStream) -> None:
        self.deck.sort()
        resample.shuffle(self.deck)
        for p in range(self.num_players):
            if p != observer and self.commits[p] != -1:
                if self.in_cave[p]:
                    self.commits[p] = resample.randrange(2)
                else:
                    self.commits[p] = DUMMY

    def _payload(self) -> list[int]:
        out = [self.start_player, self.round_no, len(self.deck)]
        out += self.deck
        out.append(len(self.path))
        out += self.path
        out += self.tile_gems
        out += [1 if c else 0 for c in self.in_cave]
        out += self.banked
        out += self.pocket
        out += self.commits
        out.append(len(self.removed))
        out += self.removed
        return out
