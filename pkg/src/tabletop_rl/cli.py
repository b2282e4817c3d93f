"""Command-line entry points: train, eval, match, inspect (+ serve, rollout).

Configuration is a flat key=value file with CLI flags taking precedence;
flag names mirror the config keys. Every training run directory is
self-describing: resolved config, version stamp, metrics stream,
checkpoints and the final evaluation summary. Exit codes: 0 success,
2 usage error, 1 runtime failure.
"""
from __future__ import annotations

import argparse
import json
import multiprocessing
import subprocess
import sys
from dataclasses import fields as dataclass_fields
from pathlib import Path

from . import __version__, games
from .agents import AGENT_NAMES, AgentBudget, make_agent
from .engine import Outcome, game_spec, reset
from .evaluation import (
    evaluate,
    record_to_metrics,
    summarize,
    write_summary_csv,
)
from .nn.net import load_checkpoint
from .rng import derive_seed
from .selfplay import PpoConfig, SelfPlayTrainer, config_to_dict
from .serve import ServeLoop


class UsageError(Exception):
    """Bad invocation: missing/unknown names or malformed values (exit 2)."""


def _version_stamp() -> str:
    try:
        rev = subprocess.run(
            ["git", "rev-parse", "--short", "HEAD"],
            capture_output=True, text=True, timeout=5,
        ).stdout.strip() or "unknown"
    except Exception:
        rev = "unknown"
    return f"tabletop-rl {__version__} ({rev})"


def parse_config_file(path: str) -> dict:
    out = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"bad config line (expected key=value): {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def parse_seeds(spec: str) -> list[int]:
    """"3" means seeds 0..2; "5,7,11" is an explicit list."""
    if "," in spec:
        return [int(s) for s in spec.split(",") if s.strip()]
    return list(range(int(spec)))


_CONFIG_KEYS = {f.name: f.type for f in dataclass_fields(PpoConfig)}


def build_ppo_config(file_values: dict, args: argparse.Namespace) -> PpoConfig:
    merged: dict = {}
    for key, raw in file_values.items():
        if key in ("seeds", "out", "parallel_seeds"):
            continue
        if key not in _CONFIG_KEYS:
            raise UsageError(f"unknown config key {key!r}")
        merged[key] = raw
    flag_map = {
        "game": "game", "players": "num_players", "reward_mode": "reward_mode",
        "total_steps": "total_steps", "lr": "lr", "num_envs": "num_envs",
        "horizon": "horizon", "pool_size": "pool_size",
        "checkpoint_interval": "checkpoint_interval",
        "resample_interval": "resample_interval", "latest_bias": "latest_bias",
        "eval_interval": "eval_interval", "eval_episodes": "eval_episodes",
        "mcts_iterations": "mcts_iterations",
    }
    for flag, key in flag_map.items():
        value = getattr(args, flag, None)
        if value is not None:
            merged[key] = value
    if "game" not in merged:
        raise UsageError("a game must be given (--game or config file)")
    kwargs = {}
    for key, raw in merged.items():
        target = PpoConfig.__dataclass_fields__[key].type
        if isinstance(raw, str):
            if target in ("int", int):
                raw = int(float(raw))
            elif target in ("float", float):
                raw = float(raw)
        kwargs[key] = raw
    cfg = PpoConfig(**kwargs)
    cfg.validate()
    return cfg


def run_one_seed(cfg: PpoConfig, seed: int, out_dir: Path) -> dict:
    run_dir = out_dir / f"{cfg.game}_{cfg.reward_mode}_s{seed}"
    ckpt_dir = run_dir / "checkpoints"
    ckpt_dir.mkdir(parents=True, exist_ok=True)
    resolved = config_to_dict(cfg)
    resolved["seed"] = seed
    (run_dir / "config.txt").write_text(
        "".join(f"{k}={v}\n" for k, v in sorted(resolved.items()))
    )
    (run_dir / "version.txt").write_text(_version_stamp() + "\n")
    eval_records = []
    budget = AgentBudget(mcts_iterations=cfg.mcts_iterations)

    with open(run_dir / "metrics.jsonl", "w") as metrics:
        def eval_fn(trainer, step, ckpt):
            for opponent in AGENT_NAMES:
                record = evaluate(
                    ckpt, cfg.game, opponent, cfg.eval_episodes,
                    seed=derive_seed(seed, 0xEE, step), num_players=cfg.num_players,
                    budget=budget, step=step,
                )
                eval_records.append(record)
                metrics.write(
                    json.dumps(record_to_metrics(record, cfg.game, seed),
                               sort_keys=True) + "\n"
                )
            metrics.flush()

        trainer = SelfPlayTrainer(
            cfg, seed, metrics_file=metrics,
            checkpoint_dir=str(ckpt_dir), eval_fn=eval_fn,
        )
        trainer.train()
        final = trainer._snapshot(trainer.global_step)
        from .nn.net import save_checkpoint
        save_checkpoint(
            final, str(ckpt_dir / f"{cfg.game}_{seed}_{trainer.global_step}.ptck")
        )
    summary = {}
    window = 20
    per_opp = {r.opponent for r in eval_records}
    if per_opp and all(
        sum(1 for r in eval_records if r.opponent == o) >= window for o in per_opp
    ):
        summaries = summarize(eval_records, window=window)
        write_summary_csv(
            str(run_dir / "eval_summary.csv"), cfg.game, cfg.num_players,
            cfg.reward_mode, summaries,
        )
        summary = {o: s.win_rate for o, s in summaries.items()}
    return {"run_dir": str(run_dir), "summary": summary}


def _seed_worker(payload):
    cfg_dict, seed, out_dir = payload
    cfg = PpoConfig(**cfg_dict)
    return run_one_seed(cfg, seed, Path(out_dir))


def cmd_train(args) -> int:
    file_values = parse_config_file(args.config) if args.config else {}
    cfg = build_ppo_config(file_values, args)
    seeds = parse_seeds(args.seeds if args.seeds is not None
                        else file_values.get("seeds", "1"))
    out_dir = Path(args.out if args.out is not None
                   else file_values.get("out", "runs"))
    out_dir.mkdir(parents=True, exist_ok=True)
    results = []
    if args.parallel_seeds and len(seeds) > 1:
        with multiprocessing.get_context("spawn").Pool(len(seeds)) as pool:
            results = pool.map(
                _seed_worker,
                [(config_to_dict(cfg), s, str(out_dir)) for s in seeds],
            )
    else:
        for seed in seeds:
            results.append(run_one_seed(cfg, seed, out_dir))
    for r in results:
        print(json.dumps(r))
    return 0


def cmd_eval(args) -> int:
    ckpt = load_checkpoint(args.checkpoint, expect_game=args.game)
    game = ckpt.game_id
    players = args.players or ckpt.num_players
    opponents = args.opponents.split(",") if args.opponents else list(AGENT_NAMES)
    budget = AgentBudget(mcts_iterations=args.mcts_iterations or 128)
    rows = []
    for opponent in opponents:
        if opponent not in AGENT_NAMES:
            raise UsageError(f"unknown opponent {opponent!r}")
        record = evaluate(
            ckpt, game, opponent, args.episodes, seed=args.seed,
            num_players=players, budget=budget, step=ckpt.step,
        )
        rows.append(record)
        print(json.dumps(record_to_metrics(record, game, args.seed), sort_keys=True))
    if args.out:
        import csv
        with open(args.out, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow([
                "game", "players", "opponent", "episodes",
                "win_rate", "tie_rate", "loss_rate", "mean_score", "mean_gap",
            ])
            for r in rows:
                writer.writerow([
                    game, players, r.opponent, r.episodes,
                    f"{r.win_rate:.4f}", f"{r.tie_rate:.4f}", f"{r.loss_rate:.4f}",
                    f"{r.mean_score:.4f}", f"{r.mean_gap:.4f}",
                ])
    return 0


def play_match(game: str, agent_names: list[str], episodes: int, seed: int,
               mcts_iterations: int = 128) -> dict:
    """Round-robin seats: agents rotate through seat assignments each episode."""
    n = len(agent_names)
    spec = game_spec(game)
    if not spec.min_players <= n <= spec.max_players:
        raise ValueError(
            f"{game} needs {spec.min_players}-{spec.max_players} agents, got {n}"
        )
    budget = AgentBudget(mcts_iterations=mcts_iterations)
    totals = {
        i: {"win": 0, "tie": 0, "loss": 0, "score": 0.0}
        for i in range(n)
    }
    for ep in range(episodes):
        rotation = ep % n
        seat_of_agent = [(i + rotation) % n for i in range(n)]
        agents = {}
        for i, name in enumerate(agent_names):
            agents[seat_of_agent[i]] = make_agent(
                name, derive_seed(seed, 0x3A, ep, i), budget
            )
        state = reset(game, n, derive_seed(seed, 0x88, ep))
        while not state.is_terminal():
            state.apply(agents[state.current_player()].act(state))
        result = state.result()
        for i in range(n):
            seat = seat_of_agent[i]
            outcome = result.outcomes[seat]
            key = ("win" if outcome == Outcome.WIN
                   else "tie" if outcome == Outcome.DRAW else "loss")
            totals[i][key] += 1
            totals[i]["score"] += result.scores[seat]
    table = {}
    for i, name in enumerate(agent_names):
        label = f"{name}#{i}" if agent_names.count(name) > 1 else name
        table[label] = {
            "win_rate": totals[i]["win"] / episodes,
            "tie_rate": totals[i]["tie"] / episodes,
            "loss_rate": totals[i]["loss"] / episodes,
            "mean_score": totals[i]["score"] / episodes,
        }
    return table


def cmd_match(args) -> int:
    names = args.agents.split(",")
    for name in names:
        if name not in AGENT_NAMES:
            raise UsageError(f"unknown agent {name!r} (expected one of {AGENT_NAMES})")
    table = play_match(args.game, names, args.episodes, args.seed,
                       args.mcts_iterations or 128)
    print(json.dumps({"game": args.game, "episodes": args.episodes,
                      "results": table}, indent=2, sort_keys=True))
    return 0


def cmd_inspect(args) -> int:
    spec = game_spec(args.game)
    players = args.players or spec.min_players
    layout = games.observation_layout(args.game, players)
    print(f"game: {args.game}")
    print(f"players: {players} (supported {spec.min_players}-{spec.max_players})")
    print(f"action_space_size: {games.action_space_size(args.game, players)}")
    print(f"observation_length: {spec.obs_len(players)}")
    print(f"perfect_info: {spec.perfect_info}  simultaneous: {spec.simultaneous}  "
          f"has_score: {spec.has_score}")
    print("observation_layout:")
    offset = 0
    for name, length in layout:
        end = offset + length - 1
        print(f"  [{offset:4d}..{end:4d}] {name} ({length})")
        offset += length
    return 0


def cmd_rollout(args) -> int:
    from .envapi import scripted_rollout_rows
    out = open(args.out, "w") if args.out else sys.stdout
    try:
        for row in scripted_rollout_rows(
            args.game, args.players or game_spec(args.game).min_players,
            args.reward_mode or "terminal", args.episodes, args.seed,
        ):
            out.write(json.dumps(row, sort_keys=True) + "\n")
    finally:
        if args.out:
            out.close()
    return 0


def cmd_serve(args) -> int:
    return ServeLoop().run()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tabletop-rl",
        description="Tabletop game engine with self-play PPO training",
    )
    parser.add_argument("--version", action="version", version=_version_stamp())
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train", help="run self-play PPO training")
    train.add_argument("--config", help="flat key=value config file")
    train.add_argument("--game")
    train.add_argument("--players", type=int)
    train.add_argument("--reward-mode", choices=["terminal", "score", "leader", "ordinal"])
    train.add_argument("--seeds", help="count (3 -> seeds 0..2) or list (5,7)")
    train.add_argument("--total-steps", type=lambda v: int(float(v)))
    train.add_argument("--lr", type=float)
    train.add_argument("--num-envs", type=int)
    train.add_argument("--horizon", type=int)
    train.add_argument("--pool-size", type=int)
    train.add_argument("--checkpoint-interval", type=lambda v: int(float(v)))
    train.add_argument("--resample-interval", type=lambda v: int(float(v)))
    train.add_argument("--latest-bias", type=float)
    train.add_argument("--eval-interval", type=lambda v: int(float(v)))
    train.add_argument("--eval-episodes", type=int)
    train.add_argument("--mcts-iterations", type=int)
    train.add_argument("--out")
    train.add_argument("--parallel-seeds", action="store_true",
                       help="run seeds in isolated worker processes")
    train.set_defaults(func=cmd_train)

    ev = sub.add_parser("eval", help="evaluate a checkpoint against baselines")
    ev.add_argument("--checkpoint", required=True)
    ev.add_argument("--game", help="guard: refuse checkpoints for other games")
    ev.add_argument("--players", type=int)
    ev.add_argument("--opponents", help="comma list from: random,osla,mcts")
    ev.add_argument("--episodes", type=int, default=100)
    ev.add_argument("--seed", type=int, default=0)
    ev.add_argument("--mcts-iterations", type=int)
    ev.add_argument("--out", help="CSV output path")
    ev.set_defaults(func=cmd_eval)

    match = sub.add_parser("match", help="baseline-vs-baseline tournament")
    match.add_argument("--game", required=True)
    match.add_argument("--agents", required=True,
                       help="comma list, one per seat (random,osla,mcts)")
    match.add_argument("--episodes", type=int, default=100)
    match.add_argument("--seed", type=int, default=0)
    match.add_argument("--mcts-iterations", type=int)
    match.set_defaults(func=cmd_match)

    inspect = sub.add_parser("inspect", help="print action/observation layout")
    inspect.add_argument("--game", required=True)
    inspect.add_argument("--players", type=int)
    inspect.set_defaults(func=cmd_inspect)

    rollout = sub.add_parser("rollout", help="dump scripted trajectories (parity)")
    rollout.add_argument("--game", required=True)
    rollout.add_argument("--players", type=int)
    rollout.add_argument("--reward-mode")
    rollout.add_argument("--episodes", type=int, default=10)
    rollout.add_argument("--seed", type=int, default=0)
    rollout.add_argument("--out")
    rollout.set_defaults(func=cmd_rollout)

    serve = sub.add_parser("serve", help="JSON-lines environment server on stdio")
    serve.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # unexpected runtime failure
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
