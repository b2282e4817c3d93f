"""Love Letter: card effects, the 68-action table, tokens, conservation."""
from conftest import random_playout
from tabletop_rl.engine import reset
from tabletop_rl.games.loveletter import (
    BARON,
    CARD_COUNTS,
    COUNTESS,
    GUARD,
    HANDMAID,
    KING,
    PRIEST,
    PRINCE,
    PRINCESS,
    TOKEN_TARGET,
    decode_action,
    guard_action,
    targeted_action,
    untargeted_action,
)


def rig(state, me_hand, opp_hands, deck=None):
    """Give the current player a known hand (white-box test helper)."""
    me = state.current_player()
    cards = list(me_hand)
    state.hands[me] = cards
    opp = [p for p in range(state.num_players) if p != me]
    for p, hand in zip(opp, opp_hands):
        state.hands[p] = list(hand)
    if deck is not None:
        state.deck = list(deck)
    state._legal_cache = None
    return me, opp


def test_action_table_is_68_and_decodes():
    seen = set()
    for a in range(68):
        rank, target, guess = decode_action(a)
        assert 1 <= rank <= 8
        seen.add((rank, target, guess))
        if a < 8:
            assert target == -1 and guess == -1
            assert untargeted_action(rank) == a
        elif a < 40:
            assert 0 <= target < 4 and guess == -1
            assert targeted_action(rank, target) == a
        else:
            assert rank == GUARD and 2 <= guess <= 8
            assert guard_action(target, guess) == a
    assert len(seen) == 68


def test_guard_correct_guess_eliminates():
    s = reset("loveletter", 2, 0)
    me, (opp,) = rig(s, [GUARD, BARON], [[PRINCE]])
    s.apply(guard_action(opp, PRINCE))
    assert not s.alive[opp] or s.tokens[me] == 1  # elimination ends the round
    assert s.tokens[me] == 1


def test_guard_wrong_guess_no_effect():
    s = reset("loveletter", 2, 0)
    me, (opp,) = rig(s, [GUARD, BARON], [[PRINCE]])
    s.apply(guard_action(opp, KING))
    assert s.tokens == [0, 0]


def test_guard_cannot_guess_guard():
    s = reset("loveletter", 2, 0)
    me, (opp,) = rig(s, [GUARD, BARON], [[GUARD]])
    legal = s.legal_action_ids()
    for g in range(2, 9):
        assert guard_action(opp, g) in legal
    # no action id encodes a guard guess of rank 1 (see decode test)
    assert all(decode_action(a)[2] != 1 for a in range(68))


def test_baron_comparison():
    s = reset("loveletter", 2, 0)
    me, (opp,) = rig(s, [BARON, PRINCESS], [[GUARD]])
    s.apply(targeted_action(BARON, opp))
    # princess (8) beats guard (1): opponent eliminated, round won
    assert s.tokens[me] == 1


def test_baron_tie_no_elimination():
    s = reset("loveletter", 2, 0)
    me, (opp,) = rig(s, [BARON, GUARD], [[GUARD]], deck=[PRIEST, PRIEST])
    s.apply(targeted_action(BARON, opp))
    assert s.tokens == [0, 0]
    assert s.current_player() == opp


def test_handmaid_blocks_targeting():
    s = reset("loveletter", 2, 0)
    me, (opp,) = rig(s, [HANDMAID, GUARD], [[BARON]], deck=[PRIEST, KING, PRIEST])
    s.apply(untargeted_action(HANDMAID))
    assert s.protected[me]
    # opponent now holds baron + drawn card; every targeted action is illegal
    legal = s.legal_action_ids()
    for a in legal:
        rank, target, _ = decode_action(a)
        assert target == -1 or target == s.current_player()


def test_prince_forces_discard_and_redraw():
    s = reset("loveletter", 2, 0)
    me, (opp,) = rig(s, [PRINCE, GUARD], [[BARON]], deck=[KING, PRIEST])
    s.apply(targeted_action(PRINCE, opp))
    # forced discard drew PRIEST (deck top), then opp drew KING at turn start
    assert BARON in s.discards[opp]
    assert sorted(s.hands[opp]) == sorted([PRIEST, KING])


def test_prince_discarding_princess_eliminates():
    s = reset("loveletter", 2, 0)
    me, (opp,) = rig(s, [PRINCE, GUARD], [[PRINCESS]])
    s.apply(targeted_action(PRINCE, opp))
    assert s.tokens[me] == 1  # opponent eliminated, round over


def test_king_swaps_hands():
    s = reset("loveletter", 2, 0)
    me, (opp,) = rig(s, [KING, GUARD], [[PRINCESS]], deck=[PRIEST, BARON])
    s.apply(targeted_action(KING, opp))
    # swap gave opp my guard; they then drew from the deck at turn start
    assert GUARD in s.hands[opp] and len(s.hands[opp]) == 2
    assert s.hands[me] == [PRINCESS]


def test_countess_forced_with_king_or_prince():
    s = reset("loveletter", 2, 0)
    rig(s, [COUNTESS, KING], [[GUARD]])
    assert s.legal_action_ids() == [untargeted_action(COUNTESS)]
    s2 = reset("loveletter", 2, 0)
    rig(s2, [COUNTESS, PRINCE], [[GUARD]])
    assert s2.legal_action_ids() == [untargeted_action(COUNTESS)]
    s3 = reset("loveletter", 2, 0)
    rig(s3, [COUNTESS, GUARD], [[GUARD]])
    assert len(s3.legal_action_ids()) > 1


def test_princess_play_self_eliminates():
    s = reset("loveletter", 2, 0)
    me, (opp,) = rig(s, [PRINCESS, GUARD], [[BARON]])
    s.apply(untargeted_action(PRINCESS))
    assert s.tokens[opp] == 1


def test_round_win_at_token_target_ends_game():
    s = reset("loveletter", 2, 0)
    me, (opp,) = rig(s, [BARON, PRINCESS], [[GUARD]])
    s.tokens[me] = TOKEN_TARGET[2] - 1
    result = s.apply(targeted_action(BARON, opp))
    assert result is not None
    assert result.scores[me] == float(TOKEN_TARGET[2])
    assert result.ranks[me] == 1


def test_showdown_highest_card_wins():
    s = reset("loveletter", 2, 0)
    me, (opp,) = rig(s, [PRIEST, KING], [[PRINCESS]], deck=[])
    # playing priest leaves me with king (6) vs princess (8): opponent wins
    s.apply(targeted_action(PRIEST, opp))
    assert s.tokens[opp] == 1


def test_card_conservation_every_step():
    full = sorted(
        rank for rank, count in enumerate(CARD_COUNTS, start=1) for _ in range(count)
    )

    def check(state, legal):
        held = sorted(
            [c for h in state.hands for c in h]
            + [c for d in state.discards for c in d]
            + state.deck
            + ([state.burned] if state.burned != -1 else [])
        )
        assert held == full

    for seed in range(8):
        for n in (2, 3, 4):
            random_playout("loveletter", n, seed, on_step=check)


def test_seat_slots_beyond_num_players_masked():
    s = reset("loveletter", 2, 0)
    for a in s.legal_action_ids():
        _, target, _ = decode_action(a)
        assert target < 2
