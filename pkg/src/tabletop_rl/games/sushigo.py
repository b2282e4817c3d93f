"""Sushi Go! card drafting for 2-5 players over 3 rounds.

Standard 108-card deck; hand sizes 10/9/8/7 for 2/3/4/5 players. Each
turn all players simultaneously pick a card from their hand (sequentialized
as a hidden commitment phase in seat order), reveal together, then pass
their hands clockwise. A played Chopsticks card may be spent to pick two
cards in one turn (the Chopsticks returns to the hand before passing).

Scoring per round: Tempura pairs 5, Sashimi triples 10, Dumplings
1/3/6/10/15, Nigiri 1/2/3 (tripled by a previously played Wasabi), Maki
majority 6/3 split among ties (no second place if the first is tied).
Puddings score at game end: most +6, fewest -6 (no penalty with 2
players), each split among ties; skipped if everyone is tied.

Action table (20 entries, frozen; see docs/games/sushigo.md):
    0..9    commit the card at hand position i
    10..19  spend Chopsticks: commit hand position i, then a second
            position is committed through actions 0..9
"""
from __future__ import annotations

import numpy as np

from ..engine import GameSpec, GameState, register, result_from_scores
from ..rng import RandomStream

(TEMPURA, SASHIMI, DUMPLING, MAKI1, MAKI2, MAKI3,
 EGG, SALMON, SQUID, PUDDING, WASABI, CHOPSTICKS) = range(12)
N_TYPES = 12
CARD_COUNTS = (14, 14, 14, 6, 12, 8, 5, 10, 5, 10, 6, 4)  # 108 total
DEAL = {2: 10, 3: 9, 4: 8, 5: 7}
N_ROUNDS = 3
MAX_HAND = 10
ACTION_COUNT = 20

NIGIRI_VALUE = {EGG: 1, SALMON: 2, SQUID: 3}
MAKI_ICONS = {MAKI1: 1, MAKI2: 2, MAKI3: 3}
DUMPLING_SCORE = (0, 1, 3, 6, 10, 15)


def layout(num_players: int) -> list[tuple[str, int]]:
    spans = [("own_hand_counts", N_TYPES)]
    for k in range(num_players):
        who = "self" if k == 0 else f"opp{k}"
        spans.append((f"{who}_played_counts", N_TYPES))
    for k in range(num_players):
        who = "self" if k == 0 else f"opp{k}"
        spans.append((f"{who}_score", 1))
    for k in range(num_players):
        who = "self" if k == 0 else f"opp{k}"
        spans.append((f"{who}_puddings", 1))
    return spans


def score_round(played: list[list[int]]) -> list[int]:
    """Score one round's tableaus (maki interaction included, puddings not)."""
    n = len(played)
    scores = [0] * n
    icons = [0] * n
    for p, cards in enumerate(played):
        counts = [0] * N_TYPES
        wasabi_pending = 0
        for card in cards:
            counts[card] += 1
            if card == WASABI:
                wasabi_pending += 1
            elif card in NIGIRI_VALUE:
                value = NIGIRI_VALUE[card]
                if wasabi_pending:
                    wasabi_pending -= 1
                    value *= 3
                scores[p] += value
        scores[p] += (counts[TEMPURA] // 2) * 5
        scores[p] += (counts[SASHIMI] // 3) * 10
        scores[p] += DUMPLING_SCORE[min(counts[DUMPLING], 5)]
        icons[p] = counts[MAKI1] + 2 * counts[MAKI2] + 3 * counts[MAKI3]
    best = max(icons)
    if best > 0:
        winners = [p for p in range(n) if icons[p] == best]
        for p in winners:
            scores[p] += 6 // len(winners)
        if len(winners) == 1:
            second = max((icons[p] for p in range(n) if icons[p] != best), default=0)
            if second > 0:
                runners = [p for p in range(n) if icons[p] == second]
                for p in runners:
                    scores[p] += 3 // len(runners)
    return scores


def score_puddings(puddings: list[int], num_players: int) -> list[int]:
    """End-of-game pudding bonus/penalty."""
    n = len(puddings)
    adjust = [0] * n
    most, least = max(puddings), min(puddings)
    if most == least:
        return adjust
    winners = [p for p in range(n) if puddings[p] == most]
    for p in winners:
        adjust[p] += 6 // len(winners)
    if num_players > 2:
        losers = [p for p in range(n) if puddings[p] == least]
        for p in losers:
            adjust[p] -= 6 // len(losers)
    return adjust


def _full_deck() -> list[int]:
    deck = []
    for card, count in enumerate(CARD_COUNTS):
        deck.extend([card] * count)
    return deck


@register
class SushiGoState(GameState):
    __slots__ = (
        "start_player", "round_no", "draw_pile", "discard", "hands",
        "played", "puddings", "total_scores",
        "commit_first", "commit_chop", "commit_second",
    )

    spec = GameSpec(
        game_id="sushigo",
        min_players=2,
        max_players=5,
        action_count=ACTION_COUNT,
        obs_len=lambda n: N_TYPES + N_TYPES * n + 2 * n,
        perfect_info=False,
        simultaneous=True,
        has_score=True,
        max_score_hint=150.0,
    )

    def __init__(self, num_players: int, seed: int):
        super().__init__(num_players, seed)
        n = num_players
        self.start_player = self.rng.randrange(n)
        self.round_no = 0
        deck = _full_deck()
        self.rng.shuffle(deck)
        self.draw_pile = deck
        self.discard: list[int] = []
        self.hands: list[list[int]] = [[] for _ in range(n)]
        self.played: list[list[int]] = [[] for _ in range(n)]
        self.puddings = [0] * n
        self.total_scores = [0] * n
        self.commit_first = [-1] * n
        self.commit_chop = [0] * n
        self.commit_second = [-1] * n
        self._deal()

    # -- round machinery --------------------------------------------------

    def _deal(self) -> None:
        n = self.num_players
        per = DEAL[n]
        for p in range(n):
            self.hands[p] = [self.draw_pile.pop() for _ in range(per)]
        self._open_phase()

    def _open_phase(self) -> None:
        n = self.num_players
        self.commit_first = [-1] * n
        self.commit_chop = [0] * n
        self.commit_second = [-1] * n
        self.to_act = self._next_committer()

    def _commit_done(self, p: int) -> bool:
        if self.commit_first[p] == -1:
            return False
        if self.commit_chop[p] and self.commit_second[p] == -1:
            return False
        return True

    def _next_committer(self) -> int:
        n = self.num_players
        for i in range(n):
            p = (self.start_player + i) % n
            if not self._commit_done(p):
                return p
        return -1

    def _resolve_phase(self) -> None:
        n = self.num_players
        for p in range(n):
            hand = self.hands[p]
            picks = [self.commit_first[p]]
            if self.commit_chop[p]:
                picks.append(self.commit_second[p])
            for pos in picks:
                self.played[p].append(hand[pos])
            for pos in sorted(picks, reverse=True):
                hand.pop(pos)
            if self.commit_chop[p]:
                self.played[p].remove(CHOPSTICKS)
                hand.append(CHOPSTICKS)
        # pass hands clockwise: p's hand goes to p+1
        self.hands = [self.hands[(p - 1) % n] for p in range(n)]
        if all(len(h) == 0 for h in self.hands):
            self._end_round()
        else:
            self._open_phase()

    def _end_round(self) -> None:
        n = self.num_players
        round_scores = score_round(self.played)
        for p in range(n):
            self.total_scores[p] += round_scores[p]
            for card in self.played[p]:
                if card == PUDDING:
                    self.puddings[p] += 1
                else:
                    self.discard.append(card)
            self.played[p] = []
        self.round_no += 1
        if self.round_no >= N_ROUNDS:
            final = list(self.total_scores)
            for p, adj in enumerate(score_puddings(self.puddings, n)):
                final[p] += adj
            self.total_scores = final
            self._result = result_from_scores(final)
        else:
            self._deal()

    # -- engine hooks -------------------------------------------------------

    def _legal_action_ids(self) -> list[int]:
        me = self.to_act
        hand = self.hands[me]
        if self.commit_first[me] != -1:  # second pick of a chopsticks turn
            return [j for j in range(len(hand)) if j != self.commit_first[me]]
        actions = list(range(len(hand)))
        if CHOPSTICKS in self.played[me] and len(hand) >= 2:
            actions.extend(range(10, 10 + len(hand)))
        return actions

    def _apply(self, action: int) -> None:
        me = self.to_act
        if self.commit_first[me] != -1:
            self.commit_second[me] = action
        elif action >= 10:
            self.commit_first[me] = action - 10
            self.commit_chop[me] = 1
            return  # same player immediately commits the second pick
        else:
            self.commit_first[me] = action
        nxt = self._next_committer()
        if nxt == -1:
            self._resolve_phase()
        else:
            self.to_act = nxt

    def _observe_into(self, buf: np.ndarray, player: int) -> None:
        n = self.num_players
        for card in self.hands[player]:
            buf[card] += 1.0
        for k in range(n):
            p = (player + k) % n
            base = N_TYPES + N_TYPES * k
            for card in self.played[p]:
                buf[base + card] += 1.0
        base = N_TYPES + N_TYPES * n
        for k in range(n):
            p = (player + k) % n
            buf[base + k] = self.total_scores[p]
            buf[base + n + k] = self.puddings[p] + self.played[p].count(PUDDING)

    def scores(self) -> tuple[float, ...]:
        return tuple(float(s) for s in self.total_scores)

    def _clone_into(self, new: "SushiGoState") -> None:
        new.start_player = self.start_player
        new.round_no = self.round_no
        new.draw_pile = self.draw_pile.copy()
        new.discard = self.discard.copy()
        new.hands = [h.copy() for h in self.hands]
        new.played = [t.copy() for t in self.played]
        new.puddings = self.puddings.copy()
        new.total_scores = self.total_scores.copy()
        new.commit_first = self.commit_first.copy()
        new.commit_chop = self.commit_chop.copy()
        new.commit_second = self.commit_second.copy()

    def _redeterminize(self, observer: int, resample: RandomStream) -> None:
        n = self.num_players
        pool: list[int] = list(self.draw_pile)
        sizes: dict[int, int] = {}
        for p in range(n):
            if p != observer:
                pool.extend(self.hands[p])
                sizes[p] = len(self.hands[p])
        pool.sort()
        resample.shuffle(pool)
        for p in sorted(sizes):
            self.hands[p] = [pool.pop() for _ in range(sizes[p])]
        self.draw_pile = pool
        # Re-sample hidden pick positions. Whether a player spent chopsticks
        # is public (they were queried twice), so commit_chop is preserved.
        for p in range(n):
            if p == observer or self.commit_first[p] == -1:
                continue
            size = len(self.hands[p])
            self.commit_first[p] = resample.randrange(size)
            if self.commit_chop[p] and self.commit_second[p] != -1:
                second = resample.randrange(size - 1)
                if second >= self.commit_first[p]:
                    second += 1
                self.commit_second[p] = second

    def _payload(self) -> list[int]:
        out = [self.start_player, self.round_no]
        out.append(len(self.draw_pile))
        out += self.draw_pile
        out.append(len(self.discard))
        out += self.discard
        for h in self.hands:
            out.append(len(h))
            out += h
        for t in self.played:
            out.append(len(t))
            out += t
        out += self.puddings
        out += self.total_scores
        out += self.commit_first
        out += self.commit_chop
        out += self.commit_second
        return out
