"""Single-environment step/reset session with deferred rewards.

This is the surface the language bindings talk to (via the ``serve``
stdio protocol) and the ``rollout`` command records. Reward semantics:
``step`` returns the pending reward of the player whose observation is
returned: the next decision-maker while the game runs, the acting player
at the terminal step. ``info`` carries everyone's terminal rewards.
"""
from __future__ import annotations

import numpy as np

from .engine import GameState, LifecycleError, game_spec, reset
from .rewards import RewardAccumulator, parse_mode
from .rng import _GOLDEN, _MASK, derive_seed, mix64


class EnvSession:
    def __init__(self, game: str, num_players: int, reward_mode: str = "terminal"):
        self.game = game
        self.num_players = num_players
        self.mode = parse_mode(reward_mode)
        self.spec = game_spec(game)
        # surface configuration errors early (player count, mode support)
        probe = reset(game, num_players, 0)
        RewardAccumulator(self.mode, probe)
        self.state: GameState | None = None
        self.acc: RewardAccumulator | None = None
        self.closed = False

    def _check_open(self) -> None:
        if self.closed:
            raise LifecycleError("environment is closed")

    def reset(self, seed: int) -> dict:
        self._check_open()
        self.state = reset(self.game, self.num_players, seed)
        self.acc = RewardAccumulator(self.mode, self.state)
        player = self.state.current_player()
        return {
            "obs": self.state.observe(player),
            "mask": self.state.legal_mask(),
            "current_player": player,
        }

    def step(self, action: int) -> dict:
        self._check_open()
        if self.state is None:
            raise LifecycleError("step before reset")
        actor = self.state.current_player()
        result = self.state.apply(action)
        if result is not None:
            rewards = [
                self.acc.on_terminal(self.state, p) for p in range(self.num_players)
            ]
            return {
                "obs": self.state.observe(actor),
                "mask": np.zeros(self.spec.action_count, dtype=np.int8),
                "reward": rewards[actor],
                "done": True,
                "current_player": -1,
                "info": {
                    "outcomes": [int(o) for o in result.outcomes],
                    "scores": list(result.scores),
                    "ranks": list(result.ranks),
                    "rewards": rewards,
                },
            }
        player = self.state.current_player()
        return {
            "obs": self.state.observe(player),
            "mask": self.state.legal_mask(),
            "reward": self.acc.on_decision(self.state, player),
            "done": False,
            "current_player": player,
            "info": {},
        }

    def close(self) -> None:
        self.closed = True
        self.state = None
        self.acc = None


def scripted_action(episode_base: int, t: int, legal: list[int]) -> int:
    """Deterministic action script shared with the bindings test suite."""
    draw = mix64((episode_base + (t + 1) * _GOLDEN) & _MASK)
    return legal[draw % len(legal)]


def scripted_rollout_rows(
    game: str, num_players: int, reward_mode: str, episodes: int, seed: int
):
    """Yield the canonical trajectory rows for the parity contract."""
    session = EnvSession(game, num_players, reward_mode)
    for ep in range(episodes):
        first = session.reset(derive_seed(seed, 0xE5, ep))
        yield {
            "episode": ep, "t": -1, "player": first["current_player"],
            "obs": [float(x) for x in first["obs"]],
            "mask": [int(x) for x in first["mask"]],
            "reward": 0.0, "done": False,
        }
        base = derive_seed(seed, 0x5C, ep)
        t = 0
        done = False
        while not done:
            legal = session.state.legal_action_ids()
            action = scripted_action(base, t, legal)
            out = session.step(action)
            done = out["done"]
            yield {
                "episode": ep, "t": t, "player": out["current_player"],
                "action": action,
                "obs": [float(x) for x in out["obs"]],
                "mask": [int(x) for x in out["mask"]],
                "reward": float(out["reward"]), "done": done,
            }
            t += 1
