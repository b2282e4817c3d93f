"""Game-agnostic engine core.

A game is a mutable :class:`GameState` subclass driven by a forward model:
``apply`` advances the state by exactly one action of the current player,
the turn-order function decides who that player is, and ``legal_action_ids``
enumerates the legal subset of the game's fixed action space. Hidden
information is handled by ``observe`` (per-player view) and
``redeterminize`` (resample everything the observer cannot see).
"""
from __future__ import annotations

import struct
import zlib
from dataclasses import dataclass
from enum import IntEnum
from typing import Callable, Sequence

import numpy as np

from .rng import RandomStream, derive_seed


class EngineError(Exception):
    """Base class for engine errors."""


class ConfigurationError(EngineError):
    """Unsupported game id, player count, or option."""


class LifecycleError(EngineError):
    """Operation incompatible with the state's lifecycle phase."""


class MaskedActionError(EngineError):
    """Action applied while its mask bit is 0."""


class Outcome(IntEnum):
    LOSS = -1
    DRAW = 0
    WIN = 1


@dataclass(frozen=True)
class GameResult:
    """Terminal outcome: per-player outcome, final score and rank (1 = best)."""

    outcomes: tuple[Outcome, ...]
    scores: tuple[float, ...]
    ranks: tuple[int, ...]


@dataclass(frozen=True)
class GameSpec:
    """Normative constants of one game configuration family."""

    game_id: str
    min_players: int
    max_players: int
    action_count: int
    obs_len: Callable[[int], int]
    perfect_info: bool
    simultaneous: bool
    has_score: bool
    # Upper bound on a single player's final score, used to normalize
    # planner heuristics. 1.0 for games without a score.
    max_score_hint: float = 1.0


def ranks_from_scores(scores: Sequence[float]) -> tuple[int, ...]:
    """Competition ranking, higher score is better; ties share the best rank."""
    order = sorted(range(len(scores)), key=lambda i: -scores[i])
    ranks = [0] * len(scores)
    for pos, i in enumerate(order):
        if pos > 0 and scores[i] == scores[order[pos - 1]]:
            ranks[i] = ranks[order[pos - 1]]
        else:
            ranks[i] = pos + 1
    return tuple(ranks)


def result_from_scores(scores: Sequence[float]) -> GameResult:
    """Terminal result where the highest score wins; tied leaders draw."""
    ranks = ranks_from_scores(scores)
    n_top = ranks.count(1)
    outcomes = []
    for r in ranks:
        if r != 1:
            outcomes.append(Outcome.LOSS)
        elif n_top > 1:
            outcomes.append(Outcome.DRAW)
        else:
            outcomes.append(Outcome.WIN)
    return GameResult(tuple(outcomes), tuple(float(s) for s in scores), ranks)


SERIAL_MAGIC = b"TGST"
SERIAL_VERSION = 1


class GameState:
    """Base class for all game states.

    Subclasses implement the ``_``-prefixed hooks; the public methods add
    lifecycle checks and mask bookkeeping shared by every game.
    """

    __slots__ = ("num_players", "rng", "to_act", "_result", "_legal_cache")

    spec: GameSpec  # class attribute, set by each game

    def __init__(self, num_players: int, seed: int):
        spec = self.spec
        if not spec.min_players <= num_players <= spec.max_players:
            raise ConfigurationError(
                f"{spec.game_id} supports {spec.min_players}-{spec.max_players} "
                f"players, got {num_players}"
            )
        self.num_players = num_players
        # crc32 of the game id keeps the derivation stable across processes.
        self.rng = RandomStream(derive_seed(seed, zlib.crc32(spec.game_id.encode()), num_players))
        self.to_act = 0
        self._result: GameResult | None = None
        self._legal_cache: list[int] | None = None

    # -- lifecycle ----------------------------------------------------

    def is_terminal(self) -> bool:
        return self._result is not None

    def result(self) -> GameResult | None:
        return self._result

    def current_player(self) -> int:
        if self._result is not None:
            raise LifecycleError("terminal state has no current player")
        return self.to_act

    def legal_action_ids(self) -> list[int]:
        if self._result is not None:
            raise LifecycleError("terminal state has no legal actions")
        if self._legal_cache is None:
            self._legal_cache = self._legal_action_ids()
        return self._legal_cache

    def legal_mask(self) -> np.ndarray:
        mask = np.zeros(self.spec.action_count, dtype=np.int8)
        mask[self.legal_action_ids()] = 1
        return mask

    def apply(self, action: int) -> GameResult | None:
        """Advance by one action (mutates). Returns the result when terminal."""
        action = int(action)
        if self._result is not None:
            raise LifecycleError("cannot apply an action to a terminal state")
        if action not in self.legal_action_ids():
            raise MaskedActionError(
                f"action {action} is masked out in {self.spec.game_id}"
            )
        self._legal_cache = None
        self._apply(action)
        return self._result

    def observe(self, player: int) -> np.ndarray:
        buf = np.zeros(self.spec.obs_len(self.num_players), dtype=np.float32)
        self._observe_into(buf, player)
        return buf

    def scores(self) -> tuple[float, ...]:
        """Current per-player score; all zeros for games without one."""
        return (0.0,) * self.num_players

    def current_ranks(self) -> tuple[int, ...]:
        """Ranking of the current standings (ties share the best rank)."""
        if self._result is not None:
            return self._result.ranks
        return ranks_from_scores(self.scores())

    def clone(self) -> "GameState":
        new = object.__new__(type(self))
        new.num_players = self.num_players
        new.rng = self.rng.clone()
        new.to_act = self.to_act
        new._result = self._result
        new._legal_cache = None
        self._clone_into(new)
        return new

    def redeterminize(self, observer: int, seed: int) -> "GameState":
        """Clone with everything hidden from ``observer`` resampled.

        The resample is a pure function of the observer's information set
        and ``seed``; the clone's own chance stream is reseeded from
        ``seed`` as well.
        """
        new = self.clone()
        resample = RandomStream(derive_seed(seed, 0x7EDE))
        new._redeterminize(observer, resample)
        new.rng = RandomStream(derive_seed(seed, 0xC0DE), 0)
        new._legal_cache = None
        return new

    def serialize(self) -> bytes:
        """Versioned binary snapshot, used by determinism and clone tests."""
        gid = self.spec.game_id.encode()
        head = SERIAL_MAGIC + struct.pack(
            "<HB", SERIAL_VERSION, len(gid)
        ) + gid + struct.pack(
            "<BQQqB",
            self.num_players,
            self.rng.seed,
            self.rng.counter,
            self.to_act,
            1 if self._result is not None else 0,
        )
        return head + pack_ints(self._payload())

    # -- game hooks ---------------------------------------------------

    def _legal_action_ids(self) -> list[int]:
        raise NotImplementedError

    def _apply(self, action: int) -> None:
        raise NotImplementedError

    def _observe_into(self, buf: np.ndarray, player: int) -> None:
        raise NotImplementedError

    def _clone_into(self, new: "GameState") -> None:
        raise NotImplementedError

    def _redeterminize(self, observer: int, resample: RandomStream) -> None:
        """Resample hidden components in place. Perfect-info games: no-op."""
        raise NotImplementedError

    def _payload(self) -> list[int]:
        """Flat integer encoding of all game-specific fields."""
        raise NotImplementedError


def pack_ints(values: Sequence[int]) -> bytes:
    return struct.pack(f"<I{len(values)}i", len(values), *values)


# -- registry ----------------------------------------------------------

_REGISTRY: dict[str, type[GameState]] = {}


def register(cls: type[GameState]) -> type[GameState]:
    _REGISTRY[cls.spec.game_id] = cls
    return cls


def game_ids() -> list[str]:
    return sorted(_REGISTRY)


def game_spec(game_id: str) -> GameSpec:
    try:
        return _REGISTRY[game_id].spec
    except KeyError:
        raise ConfigurationError(f"unknown game {game_id!r}") from None


def reset(game_id: str, num_players: int, seed: int) -> GameState:
    """Fresh running state. Identical (game, n, seed) gives identical states."""
    if game_id not in _REGISTRY:
        raise ConfigurationError(f"unknown game {game_id!r}")
    return _REGISTRY[game_id](num_players, seed)


# Functional mirrors of the state methods, for callers that prefer them.

def current_player(state: GameState) -> int:
    return state.current_player()


def legal_actions(state: GameState) -> np.ndarray:
    return state.legal_mask()


def apply(state: GameState, action: int) -> GameResult | None:
    return state.apply(action)


def observe(state: GameState, player: int) -> np.ndarray:
    return state.observe(player)


def redeterminize(state: GameState, observer: int, seed: int) -> GameState:
    return state.redeterminize(observer, seed)
