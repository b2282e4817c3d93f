"""Love Letter with the classic 16-card deck, for 2-4 players.

Ranks and copies: Guard 1 x5, Priest 2 x2, Baron 3 x2, Handmaid 4 x2,
Prince 5 x2, King 6 x1, Countess 7 x1, Princess 8 x1. Each round one card
is burned face down, each player holds one card, and the player to act
draws a second and plays one of the two. Favour-token targets: 7 tokens
with 2 players, 5 with 3, 4 with 4.

Action table (68 entries, frozen; see docs/games/loveletter.md):
    0..7    play rank r = idx+1 with no target (untargeted cards, or a
            targeted card discarded for no effect when no legal target)
    8..39   play rank r at seat t:  8 + (r-1)*4 + t
    40..67  Guard at seat t guessing g in 2..8:  40 + t*7 + (g-2)
Seats beyond num_players are always masked out.
"""
from __future__ import annotations

import numpy as np

from ..engine import GameSpec, GameState, register, result_from_scores
from ..rng import RandomStream

GUARD, PRIEST, BARON, HANDMAID, PRINCE, KING, COUNTESS, PRINCESS = range(1, 9)
CARD_COUNTS = (5, 2, 2, 2, 2, 1, 1, 1)  # by rank 1..8
TOKEN_TARGET = {2: 7, 3: 5, 4: 4}
MAX_SEATS = 4

ACTION_COUNT = 68


def untargeted_action(rank: int) -> int:
    return rank - 1


def targeted_action(rank: int, seat: int) -> int:
    return 8 + (rank - 1) * 4 + seat


def guard_action(seat: int, guess: int) -> int:
    return 40 + seat * 7 + (guess - 2)


def decode_action(action: int) -> tuple[int, int, int]:
    """Return (rank, target_seat, guess); -1 where not applicable."""
    if action < 8:
        return action + 1, -1, -1
    if action < 40:
        rank, seat = divmod(action - 8, 4)
        return rank + 1, seat, -1
    seat, g = divmod(action - 40, 7)
    return GUARD, seat, g + 2


def layout(num_players: int) -> list[tuple[str, int]]:
    spans = [("own_hand_onehot", 8), ("discard_counts", 8)]
    for k in range(num_players):
        who = "self" if k == 0 else f"opp{k}"
        spans.append((f"{who}_tokens", 1))
    return spans


def _fresh_deck() -> list[int]:
    deck = []
    for rank, count in enumerate(CARD_COUNTS, start=1):
        deck.extend([rank] * count)
    return deck


@register
class LoveLetterState(GameState):
    __slots__ = (
        "tokens", "hands", "deck", "burned", "discards",
        "alive", "protected", "round_starter",
    )

    spec = GameSpec(
        game_id="loveletter",
        min_players=2,
        max_players=4,
        action_count=ACTION_COUNT,
        obs_len=lambda n: 16 + n,
        perfect_info=False,
        simultaneous=False,
        has_score=True,
        max_score_hint=7.0,
    )

    def __init__(self, num_players: int, seed: int):
        super().__init__(num_players, seed)
        n = num_players
        self.tokens = [0] * n
        self.round_starter = self.rng.randrange(n)
        self.hands: list[list[int]] = [[] for _ in range(n)]
        self.deck: list[int] = []
        self.burned = -1
        self.discards: list[list[int]] = [[] for _ in range(n)]
        self.alive = [True] * n
        self.protected = [False] * n
        self._start_round(self.round_starter)

    # -- round machinery ------------------------------------------------

    def _start_round(self, starter: int) -> None:
        n = self.num_players
        deck = _fresh_deck()
        self.rng.shuffle(deck)
        self.burned = deck.pop()
        self.hands = [[deck.pop()] for _ in range(n)]
        self.deck = deck
        self.discards = [[] for _ in range(n)]
        self.alive = [True] * n
        self.protected = [False] * n
        self.round_starter = starter
        self._begin_turn(starter)

    def _begin_turn(self, p: int) -> None:
        self.protected[p] = False
        self.hands[p].append(self.deck.pop())
        self.to_act = p

    def _eliminate(self, p: int) -> None:
        self.alive[p] = False
        self.discards[p].extend(self.hands[p])
        self.hands[p] = []

    def _advance(self) -> None:
        alive_players = [p for p in range(self.num_players) if self.alive[p]]
        if len(alive_players) == 1:
            self._win_round([alive_players[0]])
            return
        if not self.deck:
            self._showdown(alive_players)
            return
        p = self.to_act
        while True:
            p = (p + 1) % self.num_players
            if self.alive[p]:
                break
        self._begin_turn(p)

    def _showdown(self, alive_players: list[int]) -> None:
        best_rank = max(self.hands[p][0] if self.hands[p] else 0 for p in alive_players)
        contenders = [
            p for p in alive_players
            if (self.hands[p][0] if self.hands[p] else 0) == best_rank
        ]
        if len(contenders) > 1:
            best_sum = max(sum(self.discards[p]) for p in contenders)
            contenders = [p for p in contenders if sum(self.discards[p]) == best_sum]
        self._win_round(contenders)

    def _win_round(self, winners: list[int]) -> None:
        for p in winners:
            self.tokens[p] += 1
        target = TOKEN_TARGET[self.num_players]
        if max(self.tokens) >= target:
            self._result = result_from_scores(self.tokens)
            return
        for i in range(self.num_players):
            p = (self.round_starter + i) % self.num_players
            if p in winners:
                self._start_round(p)
                return

    # -- engine hooks ----------------------------------------------------

    def _targets(self, me: int, include_self: bool) -> list[int]:
        out = [
            t for t in range(self.num_players)
            if t != me and self.alive[t] and not self.protected[t]
        ]
        if include_self:
            out.append(me)
        return out

    def _legal_action_ids(self) -> list[int]:
        me = self.to_act
        hand = self.hands[me]
        if COUNTESS in hand and (KING in hand or PRINCE in hand):
            return [untargeted_action(COUNTESS)]
        actions: list[int] = []
        for rank in sorted(set(hand)):
            if rank in (HANDMAID, COUNTESS, PRINCESS):
                actions.append(untargeted_action(rank))
            elif rank == GUARD:
                targets = self._targets(me, include_self=False)
                if targets:
                    for t in targets:
                        actions.extend(guard_action(t, g) for g in range(2, 9))
                else:
                    actions.append(untargeted_action(GUARD))
            elif rank == PRINCE:
                for t in sorted(self._targets(me, include_self=True)):
                    actions.append(targeted_action(PRINCE, t))
            else:  # priest, baron, king
                targets = self._targets(me, include_self=False)
                if targets:
                    actions.extend(targeted_action(rank, t) for t in targets)
                else:
                    actions.append(untargeted_action(rank))
        return sorted(actions)

    def _apply(self, action: int) -> None:
        me = self.to_act
        rank, target, guess = decode_action(action)
        self.hands[me].remove(rank)
        self.discards[me].append(rank)
        if target != -1:
            if rank == GUARD:
                if self.hands[target][0] == guess:
                    self._eliminate(target)
            elif rank == PRIEST:
                pass  # peek: no tracked state changes
            elif rank == BARON:
                mine, theirs = self.hands[me][0], self.hands[target][0]
                if mine > theirs:
                    self._eliminate(target)
                elif theirs > mine:
                    self._eliminate(me)
            elif rank == PRINCE:
                dropped = self.hands[target].pop()
                self.discards[target].append(dropped)
                if dropped == PRINCESS:
                    self._eliminate(target)
                elif self.deck:
                    self.hands[target].append(self.deck.pop())
                elif self.burned != -1:
                    self.hands[target].append(self.burned)
                    self.burned = -1
            elif rank == KING:
                self.hands[me], self.hands[target] = self.hands[target], self.hands[me]
        elif rank == HANDMAID:
            self.protected[me] = True
        elif rank == PRINCESS:
            self._eliminate(me)
        # guard/priest/baron/king with no valid target, countess: no effect
        if self._result is None:
            self._advance()

    def _observe_into(self, buf: np.ndarray, player: int) -> None:
        for rank in self.hands[player]:
            buf[rank - 1] = 1.0
        for pile in self.discards:
            for rank in pile:
                buf[8 + rank - 1] += 1.0
        n = self.num_players
        for k in range(n):
            buf[16 + k] = self.tokens[(player + k) % n]

    def scores(self) -> tuple[float, ...]:
        return tuple(float(t) for t in self.tokens)

    def _clone_into(self, new: "LoveLetterState") -> None:
        new.tokens = self.tokens.copy()
        new.hands = [h.copy() for h in self.hands]
        new.deck = self.deck.copy()
        new.burned = self.burned
        new.discards = [d.copy() for d in self.discards]
        new.alive = self.alive.copy()
        new.protected = self.protected.copy()
        new.round_starter = self.round_starter

    def _redeterminize(self, observer: int, resample: RandomStream) -> None:
        pool: list[int] = list(self.deck)
        if self.burned != -1:
            pool.append(self.burned)
        sizes = {}
        for p in range(self.num_players):
            if p != observer:
                pool.extend(self.hands[p])
                sizes[p] = len(self.hands[p])
        pool.sort()
        resample.shuffle(pool)
        for p in range(self.num_players):
            if p != observer:
                self.hands[p] = [pool.pop() for _ in range(sizes[p])]
        if self.burned != -1:
            self.burned = pool.pop()
        self.deck = pool

    def _payload(self) -> list[int]:
        out = list(self.tokens)
        out += [1 if a else 0 for a in self.alive]
        out += [1 if pr else 0 for pr in self.protected]
        out.append(self.round_starter)
        out.append(self.burned)
        for h in self.hands:
            out.append(len(h))
            out += h
        out.append(len(self.deck))
        out += self.deck
        for d in self.discards:
            out.append(len(d))
            out += d
        return out
