"""Concrete game implementations.

Importing this package registers every game with the engine registry.
Action-enumeration and observation-layout tables for each game live in
``docs/games/`` and are normative for external bindings.
"""
from __future__ import annotations

from ..engine import ConfigurationError, game_ids, game_spec, reset
from . import (  # noqa: F401  (import for registration side effect)
    diamant,
    dots_and_boxes,
    exploding_kittens,
    loveletter,
    sushigo,
    tictactoe,
)


def action_space_size(game_id: str, num_players: int) -> int:
    """Total enumerated action count for one game configuration."""
    spec = game_spec(game_id)
    if not spec.min_players <= num_players <= spec.max_players:
        raise ConfigurationError(
            f"{game_id} supports {spec.min_players}-{spec.max_players} players"
        )
    return spec.action_count


def observation_layout(game_id: str, num_players: int) -> list[tuple[str, int]]:
    """Ordered (span name, length) descriptors over the observation vector."""
    spec = game_spec(game_id)
    if not spec.min_players <= num_players <= spec.max_players:
        raise ConfigurationError(
            f"{game_id} supports {spec.min_players}-{spec.max_players} players"
        )
    mod = {
        "tictactoe": tictactoe,
        "dotsandboxes": dots_and_boxes,
        "diamant": diamant,
        "loveletter": loveletter,
        "explodingkittens": exploding_kittens,
        "sushigo": sushigo,
    }[game_id]
    layout = mod.layout(num_players)
    assert sum(n for _, n in layout) == spec.obs_len(num_players)
    return layout


__all__ = [
    "action_space_size",
    "observation_layout",
    "game_ids",
    "game_spec",
    "reset",
]
