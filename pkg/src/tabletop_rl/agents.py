"""Baseline opponents: Random, one-step look-ahead, and UCT search.

OSLA and MCTS plan on a redeterminized clone of the real state, so they
can never read hidden information; the forward model they roll out is the
clone's own. Rollout opponents play uniformly at random. Node statistics
are kept per acting player (max^n style) to support up to 5 players.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .engine import GameState
from .rewards import terminal_reward
from .rng import RandomStream


@dataclass
class AgentBudget:
    mcts_iterations: int = 128
    rollout_depth_cap: int = 100
    exploration_constant: float = math.sqrt(2.0)

    def __post_init__(self):
        if self.mcts_iterations < 1:
            raise ValueError("mcts_iterations must be >= 1")
        if self.rollout_depth_cap < 0:
            raise ValueError("rollout_depth_cap must be >= 0")


def heuristic_values(state: GameState) -> list[float]:
    """Per-player evaluation: terminal reward at the end, else normalized score."""
    result = state.result()
    if result is not None:
        return [terminal_reward(result, p) for p in range(state.num_players)]
    if state.spec.has_score:
        hint = state.spec.max_score_hint
        return [min(s / hint, 1.0) for s in state.scores()]
    return [0.0] * state.num_players


def random_act(mask: np.ndarray, rng: RandomStream) -> int:
    legal = np.flatnonzero(mask)
    if len(legal) == 0:
        raise ValueError("empty action mask")
    return int(legal[rng.randrange(len(legal))])


def osla_act(state: GameState, player: int, rng: RandomStream) -> int:
    """Try every legal action on a redeterminized clone, keep the best."""
    det = state.redeterminize(player, rng.next_u64())
    best_value = -math.inf
    best: list[int] = []
    for action in det.legal_action_ids():
        child = det.clone()
        child.apply(action)
        value = heuristic_values(child)[player]
        if value > best_value:
            best_value = value
            best = [action]
        elif value == best_value:
            best.append(action)
    return best[rng.randrange(len(best))]


class SearchNode:
    __slots__ = ("state", "actor", "untried", "children", "edge_n", "edge_w", "visits")

    def __init__(self, state: GameState):
        self.state = state
        self.visits = 0
        self.children: dict[int, SearchNode] = {}
        self.edge_n: dict[int, int] = {}
        self.edge_w: dict[int, list[float]] = {}
        if state.is_terminal():
            self.actor = -1
            self.untried: list[int] = []
        else:
            self.actor = state.current_player()
            self.untried = list(state.legal_action_ids())


def _rollout(state: GameState, depth_cap: int, rng: RandomStream) -> list[float]:
    sim = state.clone()
    depth = 0
    while not sim.is_terminal() and depth < depth_cap:
        legal = sim.legal_action_ids()
        sim.apply(legal[rng.randrange(len(legal))])
        depth += 1
    return heuristic_values(sim)


def mcts_act(state: GameState, player: int, budget: AgentBudget, rng: RandomStream) -> int:
    """UCT over a single redeterminization; returns the most-visited root action."""
    root = SearchNode(state.redeterminize(player, rng.next_u64()))
    c = budget.exploration_constant
    for _ in range(budget.mcts_iterations):
        node = root
        path: list[tuple[SearchNode, int]] = []
        # select
        while node.actor != -1 and not node.untried:
            log_n = math.log(node.visits)
            best_score = -math.inf
            best_action = -1
            for action, child_n in node.edge_n.items():
                w = node.edge_w[action][node.actor]
                score = w / child_n + c * math.sqrt(log_n / child_n)
                if score > best_score:
                    best_score = score
                    best_action = action
            path.append((node, best_action))
            node = node.children[best_action]
        # expand + evaluate
        if node.actor == -1:
            values = heuristic_values(node.state)
        else:
            action = node.untried.pop(rng.randrange(len(node.untried)))
            child_state = node.state.clone()
            child_state.apply(action)
            child = SearchNode(child_state)
            node.children[action] = child
            node.edge_n[action] = 0
            node.edge_w[action] = [0.0] * state.num_players
            path.append((node, action))
            node = child
            values = _rollout(child_state, budget.rollout_depth_cap, rng)
        # backpropagate
        node.visits += 1
        for parent, action in path:
            parent.visits += 1
            parent.edge_n[action] += 1
            w = parent.edge_w[action]
            for p in range(state.num_players):
                w[p] += values[p]
    best_n = max(root.edge_n.values())
    best = [a for a, n in root.edge_n.items() if n == best_n]
    return best[rng.randrange(len(best))]


# -- agent objects for match play and evaluation -------------------------

class Agent:
    """One decision-maker bound to its own deterministic random stream."""

    name = "agent"

    def __init__(self, seed: int):
        self.rng = RandomStream(seed)

    def reseed(self, seed: int) -> None:
        self.rng = RandomStream(seed)

    def act(self, state: GameState) -> int:
        raise NotImplementedError


class RandomAgent(Agent):
    name = "random"

    def act(self, state: GameState) -> int:
        legal = state.legal_action_ids()
        return legal[self.rng.randrange(len(legal))]


class OslaAgent(Agent):
    name = "osla"

    def act(self, state: GameState) -> int:
        return osla_act(state, state.current_player(), self.rng)


class MctsAgent(Agent):
    name = "mcts"

    def __init__(self, seed: int, budget: AgentBudget | None = None):
        super().__init__(seed)
        self.budget = budget or AgentBudget()

    def act(self, state: GameState) -> int:
        return mcts_act(state, state.current_player(), self.budget, self.rng)


AGENT_NAMES = ("random", "osla", "mcts")


def make_agent(name: str, seed: int, budget: AgentBudget | None = None) -> Agent:
    if name == "random":
        return RandomAgent(seed)
    if name == "osla":
        return OslaAgent(seed)
    if name == "mcts":
        return MctsAgent(seed, budget)
    raise ValueError(f"unknown agent {name!r} (expected one of {AGENT_NAMES})")
