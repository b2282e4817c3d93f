"""Exploding Kittens (base set, no imploding variants) for 2-5 players.

Deck: Attack x4, Skip x4, Favor x4, Shuffle x4, See-the-Future x5, Nope x5,
five cat types x4, Defuse x6 and n-1 Exploding Kittens. Setup deals every
player 7 cards plus one Defuse; 2 extra Defuses are shuffled into the deck
(all remaining ones with 4-5 players).

A turn is any number of card plays followed by a draw. Drawing a kitten
eliminates the player unless they hold a Defuse, in which case they must
play it and choose where the kitten goes back into the deck. Nopeable
plays open a reaction window: every other player holding a Nope is asked
in seat order; each Nope re-opens the window against the Nope itself.

Action table (43 entries, frozen; see docs/games/explodingkittens.md):
    0       draw (ends one turn)
    1..4    play Skip / Attack / Shuffle / See-the-Future
    5..8    play Favor at relative seat 1..4
    9..28   play a cat pair: type c in 0..4 at relative seat 1..4,
            id = 9 + c*4 + (slot-1)
    29      Nope (reaction window only)
    30      pass (decline to Nope)
    31..42  Defuse placement: depth-from-top slots 0..9 (clamped to the
            deck size), 41 bottom, 42 uniformly random position
"""
from __future__ import annotations

import numpy as np

from ..engine import GameResult, GameSpec, GameState, Outcome, register
from ..rng import RandomStream

KITTEN, DEFUSE, ATTACK, SKIP, FAVOR, SHUFFLE, SEEFUTURE, NOPE = range(8)
CAT0 = 8
N_TYPES = 13

A_DRAW = 0
A_SKIP, A_ATTACK, A_SHUFFLE, A_SEEFUTURE = 1, 2, 3, 4
A_FAVOR = 5          # ..8
A_CAT = 9            # ..28
A_NOPE = 29
A_PASS = 30
A_PLACE = 31         # ..42
ACTION_COUNT = 43

PHASE_MAIN, PHASE_REACT, PHASE_PLACE = 0, 1, 2

_COMMONS = [ATTACK] * 4 + [SKIP] * 4 + [FAVOR] * 4 + [SHUFFLE] * 4 \
    + [SEEFUTURE] * 5 + [NOPE] * 5 + sum(([CAT0 + c] * 4 for c in range(5)), [])


def inserted_defuses(num_players: int) -> int:
    return 2 if num_players <= 3 else 6 - num_players


def initial_composition(num_players: int) -> list[int]:
    """Card counts per type across all zones right after setup."""
    counts = [0] * N_TYPES
    for card in _COMMONS:
        counts[card] += 1
    counts[DEFUSE] = num_players + inserted_defuses(num_players)
    counts[KITTEN] = num_players - 1
    return counts


def layout(num_players: int) -> list[tuple[str, int]]:
    spans = [("own_hand_counts", N_TYPES)]
    for k in range(1, num_players):
        spans.append((f"opp{k}_hand_size", 1))
    spans += [("draw_pile_size", 1), ("phase_onehot", 3)]
    return spans


@register
class ExplodingKittensState(GameState):
    __slots__ = (
        "hands", "deck", "discard", "alive", "eliminated_order",
        "turns_owed", "phase", "pending_actor", "pending_action",
        "nope_level", "react_queue",
    )

    spec = GameSpec(
        game_id="explodingkittens",
        min_players=2,
        max_players=5,
        action_count=ACTION_COUNT,
        obs_len=lambda n: N_TYPES + (n - 1) + 1 + 3,
        perfect_info=False,
        simultaneous=False,
        has_score=False,
    )

    def __init__(self, num_players: int, seed: int):
        super().__init__(num_players, seed)
        n = num_players
        commons = sorted(_COMMONS)
        self.rng.shuffle(commons)
        self.hands = [[0] * N_TYPES for _ in range(n)]
        for p in range(n):
            for _ in range(7):
                self.hands[p][commons.pop()] += 1
            self.hands[p][DEFUSE] += 1
        deck = commons
        deck.extend([DEFUSE] * inserted_defuses(n))
        deck.extend([KITTEN] * (n - 1))
        self.rng.shuffle(deck)
        self.deck = deck
        self.discard: list[int] = []
        self.alive = [True] * n
        self.eliminated_order: list[int] = []
        self.turns_owed = 1
        self.phase = PHASE_MAIN
        self.pending_actor = -1
        self.pending_action = -1
        self.nope_level = 0
        self.react_queue: list[int] = []
        self.to_act = self.rng.randrange(n)

    # -- helpers ----------------------------------------------------------

    def _hand_size(self, p: int) -> int:
        return sum(self.hands[p])

    def _next_alive(self, p: int) -> int:
        while True:
            p = (p + 1) % self.num_players
            if self.alive[p]:
                return p

    def _rel_target(self, me: int, slot: int) -> int:
        return (me + slot) % self.num_players

    def _end_one_turn(self, p: int) -> None:
        self.phase = PHASE_MAIN
        self.turns_owed -= 1
        if self.turns_owed >= 1:
            self.to_act = p
        else:
            self.to_act = self._next_alive(p)
            self.turns_owed = 1

    def _eliminate(self, p: int) -> None:
        for card, count in enumerate(self.hands[p]):
            self.discard.extend([card] * count)
        self.hands[p] = [0] * N_TYPES
        self.alive[p] = False
        self.eliminated_order.append(p)
        if self.alive.count(True) == 1:
            winner = self.alive.index(True)
            n = self.num_players
            ranks = [0] * n
            ranks[winner] = 1
            for i, q in enumerate(self.eliminated_order):
                ranks[q] = n - i
            outcomes = [Outcome.WIN if q == winner else Outcome.LOSS for q in range(n)]
            self._result = GameResult(tuple(outcomes), (0.0,) * n, tuple(ranks))
        else:
            self.to_act = self._next_alive(p)
            self.turns_owed = 1
            self.phase = PHASE_MAIN

    def _steal_random(self, victim: int, thief: int) -> None:
        size = self._hand_size(victim)
        if size == 0:
            return
        pick = self.rng.randrange(size)
        for card, count in enumerate(self.hands[victim]):
            if pick < count:
                self.hands[victim][card] -= 1
                self.hands[thief][card] += 1
                return
            pick -= count

    def _build_react_queue(self, after: int) -> list[int]:
        n = self.num_players
        return [
            (after + i) % n for i in range(1, n)
            if self.alive[(after + i) % n] and self.hands[(after + i) % n][NOPE] > 0
        ]

    def _open_reaction(self, actor: int, action: int) -> None:
        self.pending_actor = actor
        self.pending_action = action
        self.nope_level = 0
        self.react_queue = self._build_react_queue(actor)
        if self.react_queue:
            self.phase = PHASE_REACT
            self.to_act = self.react_queue[0]
        else:
            self._resolve_pending()

    def _resolve_pending(self) -> None:
        actor, action = self.pending_actor, self.pending_action
        cancelled = self.nope_level % 2 == 1
        self.pending_actor = -1
        self.pending_action = -1
        self.react_queue = []
        self.phase = PHASE_MAIN
        self.to_act = actor
        if cancelled:
            return
        if action == A_SKIP:
            self._end_one_turn(actor)
        elif action == A_ATTACK:
            owed = 2 if self.turns_owed == 1 else self.turns_owed + 2
            self.to_act = self._next_alive(actor)
            self.turns_owed = owed
        elif action == A_SHUFFLE:
            self.rng.shuffle(self.deck)
        elif action == A_SEEFUTURE:
            pass  # the peek itself is not tracked
        elif A_FAVOR <= action < A_CAT:
            victim = self._rel_target(actor, action - A_FAVOR + 1)
            self._steal_random(victim, actor)
        else:  # cat pair
            slot = (action - A_CAT) % 4 + 1
            victim = self._rel_target(actor, slot)
            self._steal_random(victim, actor)

    def _resolve_draw(self, me: int) -> None:
        card = self.deck.pop()
        if card == KITTEN:
            if self.hands[me][DEFUSE] > 0:
                self.hands[me][DEFUSE] -= 1
                self.discard.append(DEFUSE)
                self.hands[me][KITTEN] += 1  # held until placed
                self.phase = PHASE_PLACE
            else:
                self.discard.append(KITTEN)
                self._eliminate(me)
        else:
            self.hands[me][card] += 1
            self._end_one_turn(me)

    # -- engine hooks -------------------------------------------------------

    def _legal_action_ids(self) -> list[int]:
        me = self.to_act
        if self.phase == PHASE_REACT:
            return [A_NOPE, A_PASS]
        if self.phase == PHASE_PLACE:
            return list(range(A_PLACE, A_PLACE + 12))
        hand = self.hands[me]
        actions = [A_DRAW]
        if hand[SKIP]:
            actions.append(A_SKIP)
        if hand[ATTACK]:
            actions.append(A_ATTACK)
        if hand[SHUFFLE]:
            actions.append(A_SHUFFLE)
        if hand[SEEFUTURE]:
            actions.append(A_SEEFUTURE)
        n = self.num_players
        for slot in range(1, n):
            t = self._rel_target(me, slot)
            if self.alive[t] and self._hand_size(t) > 0:
                if hand[FAVOR]:
                    actions.append(A_FAVOR + slot - 1)
                for c in range(5):
                    if hand[CAT0 + c] >= 2:
                        actions.append(A_CAT + c * 4 + slot - 1)
        return sorted(actions)

    def _apply(self, action: int) -> None:
        me = self.to_act
        if self.phase == PHASE_REACT:
            if action == A_NOPE:
                self.hands[me][NOPE] -= 1
                self.discard.append(NOPE)
                self.nope_level += 1
                # everyone else (original actor included) may nope the nope
                self.react_queue = self._build_react_queue(me)
                if self.react_queue:
                    self.to_act = self.react_queue[0]
                else:
                    self._resolve_pending()
            else:  # pass
                self.react_queue.pop(0)
                if self.react_queue:
                    self.to_act = self.react_queue[0]
                else:
                    self._resolve_pending()
            return
        if self.phase == PHASE_PLACE:
            slot = action - A_PLACE
            self.hands[me][KITTEN] -= 1
            if slot <= 9:
                depth = min(slot, len(self.deck))
                self.deck.insert(len(self.deck) - depth, KITTEN)
            elif slot == 10:
                self.deck.insert(0, KITTEN)
            else:
                self.deck.insert(self.rng.randrange(len(self.deck) + 1), KITTEN)
            self._end_one_turn(me)
            return
        # main phase
        if action == A_DRAW:
            self._resolve_draw(me)
            return
        if action == A_SKIP:
            self.hands[me][SKIP] -= 1
            self.discard.append(SKIP)
        elif action == A_ATTACK:
            self.hands[me][ATTACK] -= 1
            self.discard.append(ATTACK)
        elif action == A_SHUFFLE:
            self.hands[me][SHUFFLE] -= 1
            self.discard.append(SHUFFLE)
        elif action == A_SEEFUTURE:
            self.hands[me][SEEFUTURE] -= 1
            self.discard.append(SEEFUTURE)
        elif A_FAVOR <= action < A_CAT:
            self.hands[me][FAVOR] -= 1
            self.discard.append(FAVOR)
        else:
            c = (action - A_CAT) // 4
            self.hands[me][CAT0 + c] -= 2
            self.discard.extend([CAT0 + c] * 2)
        self._open_reaction(me, action)

    def _observe_into(self, buf: np.ndarray, player: int) -> None:
        buf[0:N_TYPES] = self.hands[player]
        n = self.num_players
        for k in range(1, n):
            buf[N_TYPES + k - 1] = self._hand_size((player + k) % n)
        buf[N_TYPES + n - 1] = len(self.deck)
        buf[N_TYPES + n + self.phase] = 1.0

    def current_ranks(self) -> tuple[int, ...]:
        if self._result is not None:
            return self._result.ranks
        n = self.num_players
        ranks = [1] * n
        for i, q in enumerate(self.eliminated_order):
            ranks[q] = n - i
        return tuple(ranks)

    def _clone_into(self, new: "ExplodingKittensState") -> None:
        new.hands = [h.copy() for h in self.hands]
        new.deck = self.deck.copy()
        new.discard = self.discard.copy()
        new.alive = self.alive.copy()
        new.eliminated_order = self.eliminated_order.copy()
        new.turns_owed = self.turns_owed
        new.phase = self.phase
        new.pending_actor = self.pending_actor
        new.pending_action = self.pending_action
        new.nope_level = self.nope_level
        new.react_queue = self.react_queue.copy()

    def _redeterminize(self, observer: int, resample: RandomStream) -> None:
        pool: list[int] = list(self.deck)
        sizes: dict[int, int] = {}
        reserve_kitten = set()
        reserve_nope = set(q for q in self.react_queue if q != observer)
        for p in range(self.num_players):
            if p == observer:
                continue
            hand = self.hands[p]
            if hand[KITTEN]:  # public: a defused kitten awaiting placement
                reserve_kitten.add(p)
                hand[KITTEN] -= 1
            sizes[p] = sum(hand)
            for card, count in enumerate(hand):
                pool.extend([card] * count)
            self.hands[p] = [0] * N_TYPES
        # kittens are public deck residents: hands are dealt kitten-free
        kittens = sum(1 for c in pool if c == KITTEN)
        pool = [c for c in pool if c != KITTEN]
        pool.sort()
        resample.shuffle(pool)
        # reserve all publicly-known nope holdings before random refills
        for p in sorted(reserve_nope):
            if p in sizes:
                pool.remove(NOPE)
                self.hands[p][NOPE] += 1
                sizes[p] -= 1
        for p in sorted(sizes):
            for _ in range(sizes[p]):
                self.hands[p][pool.pop()] += 1
            if p in reserve_kitten:
                self.hands[p][KITTEN] += 1
        pool.extend([KITTEN] * kittens)
        resample.shuffle(pool)
        self.deck = pool

    def _payload(self) -> list[int]:
        out: list[int] = []
        for h in self.hands:
            out += h
        out.append(len(self.deck))
        out += self.deck
        out.append(len(self.discard))
        out += self.discard
        out += [1 if a else 0 for a in self.alive]
        out.append(len(self.eliminated_order))
        out += self.eliminated_order
        out += [self.turns_owed, self.phase, self.pending_actor,
                self.pending_action, self.nope_level]
        out.append(len(self.react_queue))
        out += self.react_queue
        return out
