"""Run (or resume) the desk-scale training matrix used by the acceptance suite.

Nine runs: {tictactoe+terminal, dotsandboxes+score, diamant+terminal} x 3
seeds, full defaults. Completed runs (eval_summary.csv present) are skipped,
so the script is safe to re-run. Results land in desk_runs/ where the
gated acceptance tests (TABLETOP_RL_DESK_SCALE=1) pick them up.
"""
import multiprocessing
import os
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from tabletop_rl.cli import run_one_seed  # noqa: E402
from tabletop_rl.selfplay import PpoConfig  # noqa: E402

CONFIGS = [
    ("tictactoe", "terminal"),
    ("dotsandboxes", "score"),
    ("diamant", "terminal"),
]
SEEDS = (0, 1, 2)


def worker(payload):
    game, reward_mode, seed, out_dir = payload
    t0 = time.time()
    cfg = PpoConfig(game=game, reward_mode=reward_mode)
    result = run_one_seed(cfg, seed, Path(out_dir))
    print(f"[done {time.time() - t0:7.0f}s] {game}/{reward_mode} seed {seed}: "
          f"{result['summary']}", flush=True)
    return result


def main() -> int:
    out_dir = Path(os.environ.get("TABLETOP_RL_DESK_DIR", "desk_runs"))
    out_dir.mkdir(parents=True, exist_ok=True)
    todo = []
    for game, reward_mode in CONFIGS:
        for seed in SEEDS:
            run_dir = out_dir / f"{game}_{reward_mode}_s{seed}"
            if (run_dir / "eval_summary.csv").exists():
                print(f"[cached] {run_dir}", flush=True)
            else:
                todo.append((game, reward_mode, seed, str(out_dir)))
    if not todo:
        print("all desk-scale runs cached", flush=True)
        return 0
    workers = min(len(todo), max(2, os.cpu_count() or 2))
    print(f"running {len(todo)} trainings on {workers} workers", flush=True)
    with multiprocessing.get_context("fork").Pool(workers) as pool:
        pool.map(worker, todo)
    return 0


if __name__ == "__main__":
    sys.exit(main())
