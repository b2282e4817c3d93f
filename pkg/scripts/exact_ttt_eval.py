"""Exact TicTacToe evaluation of a checkpoint: no sampling noise.

Computes the precise seat-averaged win/tie/loss probabilities of a policy
against the uniform-random and take-the-win-else-uniform opponents by
full expectation over the game tree, for both sampled and greedy action
selection.
"""
import sys
from functools import lru_cache
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from tabletop_rl.nn.net import forward, load_checkpoint  # noqa: E402

LINES = ((0, 1, 2), (3, 4, 5), (6, 7, 8),
         (0, 3, 6), (1, 4, 7), (2, 5, 8), (0, 4, 8), (2, 4, 6))


def winner(b):
    for i, j, k in LINES:
        if b[i] != -1 and b[i] == b[j] == b[k]:
            return b[i]
    return -1


def policy_dist(params, board, me, greedy):
    obs = np.zeros(9, dtype=np.float32)
    mask = np.zeros(9, dtype=np.float32)
    for c, owner in enumerate(board):
        if owner == -1:
            mask[c] = 1.0
        else:
            obs[c] = 1.0 if owner == me else -1.0
    probs, _ = forward(params, obs, mask)
    if greedy:
        out = np.zeros(9)
        out[int(np.argmax(probs))] = 1.0
        return out
    return probs


def opponent_dist(board, mover, take_wins):
    moves = [i for i in range(9) if board[i] == -1]
    if take_wins:
        wins = []
        b = list(board)
        for m in moves:
            b[m] = mover
            if winner(b) == mover:
                wins.append(m)
            b[m] = -1
        if wins:
            moves = wins
    out = np.zeros(9)
    for m in moves:
        out[m] = 1.0 / len(moves)
    return out


def exact_rates(params, me, greedy, take_wins):
    @lru_cache(maxsize=None)
    def rec(board, to_move):
        w = winner(board)
        if w != -1:
            return (1.0, 0.0, 0.0) if w == me else (0.0, 0.0, 1.0)
        if -1 not in board:
            return (0.0, 1.0, 0.0)
        if to_move == me:
            dist = policy_dist(params, board, me, greedy)
        else:
            dist = opponent_dist(board, to_move, take_wins)
        total = np.zeros(3)
        b = list(board)
        for m in range(9):
            p = dist[m]
            if p > 0.0:
                b[m] = to_move
                total += p * np.array(rec(tuple(b), 1 - to_move))
                b[m] = -1
        return tuple(total)

    return rec((-1,) * 9, 0)


def report(params, label=""):
    for opp_name, take_wins in (("random", False), ("osla", True)):
        for greedy in (False, True):
            as_first = exact_rates(params, 0, greedy, take_wins)
            as_second = exact_rates(params, 1, greedy, take_wins)
            avg = [(a + b) / 2 for a, b in zip(as_first, as_second)]
            mode = "greedy " if greedy else "sampled"
            print(f"{label} vs {opp_name:6s} {mode}: "
                  f"win {avg[0]:.4f} tie {avg[1]:.4f} loss {avg[2]:.4f} "
                  f"(first {as_first[0]:.4f}, second {as_second[0]:.4f})")


if __name__ == "__main__":
    ckpt = load_checkpoint(sys.argv[1])
    report(ckpt.params, Path(sys.argv[1]).stem)
