"""Frozen-policy evaluation against the baseline agents.

``evaluate`` plays full episodes of one checkpoint versus one opponent
type filling every other seat, with the learner's seat re-randomized each
episode. The learner samples from its masked policy (how it was trained);
pass ``greedy=True`` to argmax instead. ``summarize`` averages the last
``window`` evaluation points per opponent and can write the final table
as CSV.
"""
from __future__ import annotations

import csv
from dataclasses import asdict, dataclass

import numpy as np

from .agents import AgentBudget, make_agent
from .engine import Outcome, game_spec, reset
from .nn.net import PolicyCheckpoint, forward, sample_actions
from .rng import derive_seed


@dataclass(frozen=True)
class EvalRecord:
    step: int
    opponent: str
    episodes: int
    win_rate: float
    tie_rate: float
    loss_rate: float
    mean_score: float
    mean_gap: float
    seed: int

    def validate(self) -> None:
        total = self.win_rate + self.tie_rate + self.loss_rate
        assert abs(total - 1.0) < 1e-9


def evaluate(
    checkpoint: PolicyCheckpoint,
    game: str,
    opponent: str,
    episodes: int,
    seed: int,
    num_players: int | None = None,
    budget: AgentBudget | None = None,
    step: int = 0,
    greedy: bool = False,
) -> EvalRecord:
    """Play ``episodes`` full games of the checkpoint versus one opponent."""
    n = num_players if num_players is not None else checkpoint.num_players
    spec = game_spec(game)
    if checkpoint.params.obs_dim != spec.obs_len(n) or \
            checkpoint.params.action_dim != spec.action_count:
        raise ValueError(
            f"checkpoint dims ({checkpoint.params.obs_dim}, "
            f"{checkpoint.params.action_dim}) do not match {game} with {n} players"
        )
    rng = np.random.default_rng(derive_seed(seed, 0xEA))
    wins = ties = losses = 0
    scores = []
    gaps = []
    for ep in range(episodes):
        learner_seat = int(rng.integers(0, n))
        state = reset(game, n, derive_seed(seed, 0xE9, ep))
        opponents = {
            p: make_agent(opponent, derive_seed(seed, 0xA9, ep, p), budget)
            for p in range(n) if p != learner_seat
        }
        while not state.is_terminal():
            actor = state.current_player()
            if actor == learner_seat:
                probs, _ = forward(
                    checkpoint.params,
                    state.observe(learner_seat),
                    state.legal_mask().astype(np.float32),
                )
                if greedy:
                    action = int(np.argmax(probs))
                else:
                    action = sample_actions(probs, rng)
                state.apply(action)
            else:
                state.apply(opponents[actor].act(state))
        result = state.result()
        outcome = result.outcomes[learner_seat]
        if outcome == Outcome.WIN:
            wins += 1
        elif outcome == Outcome.DRAW:
            ties += 1
        else:
            losses += 1
        score = result.scores[learner_seat]
        scores.append(score)
        if result.ranks[learner_seat] == 1:
            gaps.append(0.0)
        else:
            winner_score = max(
                result.scores[p] for p in range(n) if result.ranks[p] == 1
            )
            gaps.append(winner_score - score)
    record = EvalRecord(
        step=step, opponent=opponent, episodes=episodes,
        win_rate=wins / episodes, tie_rate=ties / episodes,
        loss_rate=losses / episodes,
        mean_score=float(np.mean(scores)), mean_gap=float(np.mean(gaps)),
        seed=seed,
    )
    record.validate()
    return record


@dataclass(frozen=True)
class OpponentSummary:
    opponent: str
    evals_used: int
    win_rate: float
    win_rate_sd: float
    tie_rate: float
    mean_score: float


def summarize(records: list[EvalRecord], window: int = 20) -> dict[str, OpponentSummary]:
    """Mean and sd of win rate over the last ``window`` eval points per opponent."""
    out: dict[str, OpponentSummary] = {}
    for opponent in sorted({r.opponent for r in records}):
        rows = sorted(
            (r for r in records if r.opponent == opponent), key=lambda r: r.step
        )
        if len(rows) < window:
            raise ValueError(
                f"need >= {window} eval records for {opponent}, have {len(rows)}"
            )
        tail = rows[-window:]
        wr = np.array([r.win_rate for r in tail])
        out[opponent] = OpponentSummary(
            opponent=opponent,
            evals_used=window,
            win_rate=float(wr.mean()),
            win_rate_sd=float(wr.std()),
            tie_rate=float(np.mean([r.tie_rate for r in tail])),
            mean_score=float(np.mean([r.mean_score for r in tail])),
        )
    return out


def write_summary_csv(
    path: str, game: str, num_players: int, reward_mode: str,
    summaries: dict[str, OpponentSummary],
) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["game", "players", "reward_mode", "opponent", "win_rate", "sd"])
        for opponent in sorted(summaries):
            s = summaries[opponent]
            writer.writerow([
                game, num_players, reward_mode, opponent,
                f"{s.win_rate:.4f}", f"{s.win_rate_sd:.4f}",
            ])


def record_to_metrics(record: EvalRecord, game: str, run_seed: int) -> dict:
    row = asdict(record)
    row["eval_seed"] = row.pop("seed")
    row.update({"kind": "eval", "game": game, "seed": run_seed})
    return row
