"""Sushi Go!: drafting flow, chopsticks, rotation, scoring oracle."""
from conftest import random_playout
from tabletop_rl.engine import reset
from tabletop_rl.games.sushigo import (
    CARD_COUNTS,
    CHOPSTICKS,
    DEAL,
    DUMPLING,
    EGG,
    MAKI1,
    MAKI2,
    MAKI3,
    N_TYPES,
    PUDDING,
    SALMON,
    SASHIMI,
    SQUID,
    TEMPURA,
    WASABI,
    score_puddings,
    score_round,
)
from tabletop_rl.rng import RandomStream


def rescore_reference(played):
    """Independent round re-scorer (counts-first, explicit maki logic)."""
    n = len(played)
    out = [0] * n
    # nigiri with wasabi: scan order, wasabi multiplies the next nigiri
    values = {EGG: 1, SALMON: 2, SQUID: 3}
    for p, cards in enumerate(played):
        pending = 0
        for c in cards:
            if c == WASABI:
                pending += 1
            elif c in values:
                if pending > 0:
                    out[p] += values[c] * 3
                    pending -= 1
                else:
                    out[p] += values[c]
        counts = {}
        for c in cards:
            counts[c] = counts.get(c, 0) + 1
        out[p] += 5 * (counts.get(TEMPURA, 0) // 2)
        out[p] += 10 * (counts.get(SASHIMI, 0) // 3)
        d = min(counts.get(DUMPLING, 0), 5)
        out[p] += [0, 1, 3, 6, 10, 15][d]
    icons = [
        sum(cards.count(m) * k for m, k in ((MAKI1, 1), (MAKI2, 2), (MAKI3, 3)))
        for cards in played
    ]
    ordered = sorted(set(icons), reverse=True)
    if ordered and ordered[0] > 0:
        first = [p for p in range(n) if icons[p] == ordered[0]]
        for p in first:
            out[p] += 6 // len(first)
        if len(first) == 1 and len(ordered) > 1 and ordered[1] > 0:
            second = [p for p in range(n) if icons[p] == ordered[1]]
            for p in second:
                out[p] += 3 // len(second)
    return out


def test_deck_composition():
    assert sum(CARD_COUNTS) == 108


def test_deal_sizes():
    for n, per in DEAL.items():
        s = reset("sushigo", n, 0)
        assert all(len(h) == per for h in s.hands)


def test_scoring_matches_reference_on_random_tableaus():
    rng = RandomStream(42)
    for trial in range(300):
        n = 2 + rng.randrange(4)
        played = [
            [rng.randrange(N_TYPES) for _ in range(rng.randrange(12))]
            for _ in range(n)
        ]
        assert score_round(played) == rescore_reference(played)


def test_scoring_known_cases():
    assert score_round([[TEMPURA, TEMPURA], []]) == [5, 0]
    assert score_round([[SASHIMI] * 3, []]) == [10, 0]
    assert score_round([[DUMPLING] * 7, []]) == [15, 0]
    assert score_round([[WASABI, SQUID], [SQUID]]) == [9, 3]
    assert score_round([[SQUID, WASABI], [EGG]]) == [3, 1]  # wasabi after nigiri
    # maki: most gets 6, second 3; tie for most splits 6, no second
    assert score_round([[MAKI3], [MAKI2], [MAKI1]]) == [6, 3, 0]
    assert score_round([[MAKI2], [MAKI2], [MAKI1]]) == [3, 3, 0]
    assert score_round([[], []]) == [0, 0]


def test_pudding_scores():
    assert score_puddings([3, 1], 2) == [6, 0]        # no penalty with 2 players
    assert score_puddings([3, 1, 0], 3) == [6, 0, -6]
    assert score_puddings([2, 2, 0], 3) == [3, 3, -6]
    assert score_puddings([1, 1, 1], 3) == [0, 0, 0]  # everyone tied


def test_hands_rotate_clockwise():
    s = reset("sushigo", 3, 1)
    hands_before = [h.copy() for h in s.hands]
    picks = {}
    for _ in range(3):
        p = s.current_player()
        picks[p] = s.hands[p][0]
        s.apply(0)
    for p in range(3):
        source = (p - 1) % 3
        expected = hands_before[source][1:]  # source played their position 0
        assert s.hands[p] == expected


def test_chopsticks_plays_two_and_returns_to_hand():
    s = reset("sushigo", 2, 0)
    me = s.current_player()
    s.played[me] = [CHOPSTICKS]
    s._legal_cache = None
    legal = s.legal_action_ids()
    hand_size = len(s.hands[me])
    assert list(range(10, 10 + hand_size)) == [a for a in legal if a >= 10]
    first_card = s.hands[me][2]
    second_card = s.hands[me][5]
    s.apply(12)  # chopsticks, first pick position 2
    assert s.current_player() == me  # second pick immediately
    second_legal = s.legal_action_ids()
    assert 2 not in second_legal
    s.apply(5)
    # other player commits; then the phase resolves
    other = s.current_player()
    s.apply(0)
    assert first_card in s.played[me] and second_card in s.played[me]
    assert CHOPSTICKS not in s.played[me]
    # chopsticks went back into the hand that got passed on
    receiver = (me + 1) % 2
    assert CHOPSTICKS in s.hands[receiver]


def test_no_chopsticks_actions_without_played_chopsticks():
    s = reset("sushigo", 2, 0)
    me = s.current_player()
    assert CHOPSTICKS not in s.played[me]
    assert all(a < 10 for a in s.legal_action_ids())


def test_three_rounds_then_terminal_with_pudding_bonus():
    for seed in range(5):
        s = random_playout("sushigo", 2, seed)
        assert s.is_terminal()
        assert s.round_no == 3
        result = s.result()
        assert result.scores == tuple(float(x) for x in s.total_scores)


def test_card_conservation_with_pudding_zone():
    def check(state, legal):
        total = (
            len(state.draw_pile)
            + sum(len(h) for h in state.hands)
            + sum(len(t) for t in state.played)
            + len(state.discard)
            + sum(state.puddings)
        )
        assert total == 108

    for seed in range(5):
        for n in (2, 4):
            random_playout("sushigo", n, seed, on_step=check)


def test_observation_counts():
    s = reset("sushigo", 2, 3)
    me = s.current_player()
    obs = s.observe(me)
    assert obs.shape == (40,)
    for c in range(N_TYPES):
        assert obs[c] == s.hands[me].count(c)
