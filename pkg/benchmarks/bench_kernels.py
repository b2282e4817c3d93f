"""Benchmark the numba kernels against the pure-numpy fallback.

Usage: python benchmarks/bench_kernels.py [--repeats N]
Covers the three hot paths: batched policy forward (rollout-sized and
update-sized batches), PPO gradients, and the GAE scan.
"""
import argparse
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from tabletop_rl.nn import kernels_numba, kernels_numpy  # noqa: E402
from tabletop_rl.nn.net import init_params  # noqa: E402


def timeit(fn, repeats):
    fn()  # warm up (numba compiles here)
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - t0) / repeats


def bench(repeats: int) -> None:
    rng = np.random.default_rng(0)
    cases = []
    for label, (B, O, A) in (
        ("forward  rollout  (B=8,   O=82, A=82)", (8, 82, 82)),
        ("forward  minibatch(B=256, O=82, A=82)", (256, 82, 82)),
        ("grads    minibatch(B=256, O=82, A=82)", (256, 82, 82)),
        ("gae      T=128", (128, 0, 0)),
    ):
        cases.append((label, B, O, A))

    print(f"{'kernel':42s} {'numpy':>12s} {'numba':>12s} {'speedup':>9s}")
    for label, B, O, A in cases:
        if label.startswith("gae"):
            r = rng.normal(size=B).astype(np.float32)
            v = rng.normal(size=B).astype(np.float32)
            d = (rng.random(B) < 0.1).astype(np.float32)
            f_np = lambda: kernels_numpy.gae(r, v, d, 0.5, 0.99, 0.95)
            f_nb = lambda: kernels_numba.gae(r, v, d, 0.5, 0.99, 0.95)
        else:
            params = init_params(O, A, seed=1)
            obs = rng.normal(size=(B, O)).astype(np.float32)
            mask = (rng.random((B, A)) < 0.5).astype(np.float32)
            mask[np.arange(B), rng.integers(0, A, B)] = 1.0
            if label.startswith("grads"):
                actions = np.array([np.flatnonzero(m)[0] for m in mask],
                                   dtype=np.int64)
                old_logp = np.full(B, -2.0, dtype=np.float32)
                adv = rng.normal(size=B).astype(np.float32)
                rets = rng.normal(size=B).astype(np.float32)
                args = (obs, mask, actions, old_logp, adv, rets,
                        *params.as_tuple(), 0.2, 0.01, 0.5)
                f_np = lambda: kernels_numpy.ppo_grads(*args)
                f_nb = lambda: kernels_numba.ppo_grads(*args)
            else:
                args = (obs, mask, *params.as_tuple())
                f_np = lambda: kernels_numpy.policy_forward(*args)
                f_nb = lambda: kernels_numba.policy_forward(*args)
        t_np = timeit(f_np, repeats)
        t_nb = timeit(f_nb, repeats)
        print(f"{label:42s} {t_np * 1e6:10.1f}us {t_nb * 1e6:10.1f}us "
              f"{t_np / t_nb:8.2f}x")


if __name__ == "__main__":
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=200)
    args = parser.parse_args()
    bench(args.repeats)
