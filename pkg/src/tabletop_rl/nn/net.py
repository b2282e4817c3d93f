"""Policy/value MLP: parameters, forward pass, checkpoint format.

Architecture: shared trunk of two 64-unit tanh layers, linear policy head
over the game's action space (masked softmax) and linear value head.
Parameters are float32; weights are stored (in, out).

Checkpoint file format (PTCK, normative for bindings):
    magic "PTCK", u16 version,
    game id (u8 length + ascii), u8 num_players, u32 obs_dim,
    u32 action_dim, u64 training step, u64 seed,
    u8 layer count, then per layer: u32 out, u32 in,
    out*in row-major float32 weights, out float32 biases.
All integers and floats little-endian.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from . import kernels

HIDDEN = 64
CKPT_MAGIC = b"PTCK"
CKPT_VERSION = 1


class CheckpointError(Exception):
    """Malformed, truncated, or mismatched checkpoint file."""


@dataclass
class MlpParams:
    w0: np.ndarray
    b0: np.ndarray
    w1: np.ndarray
    b1: np.ndarray
    wp: np.ndarray
    bp: np.ndarray
    wv: np.ndarray
    bv: np.ndarray

    @property
    def obs_dim(self) -> int:
        return self.w0.shape[0]

    @property
    def action_dim(self) -> int:
        return self.wp.shape[1]

    def as_tuple(self):
        return (self.w0, self.b0, self.w1, self.b1,
                self.wp, self.bp, self.wv, self.bv)

    def copy(self) -> "MlpParams":
        return MlpParams(*(a.copy() for a in self.as_tuple()))

    def assert_finite(self) -> None:
        for a in self.as_tuple():
            if not np.all(np.isfinite(a)):
                raise FloatingPointError("non-finite parameter values")


@dataclass
class PolicyCheckpoint:
    params: MlpParams
    game_id: str
    num_players: int
    step: int = 0
    seed: int = 0
    meta_obs_dim: int = field(default=-1)
    meta_action_dim: int = field(default=-1)

    def __post_init__(self):
        if self.meta_obs_dim < 0:
            self.meta_obs_dim = self.params.obs_dim
        if self.meta_action_dim < 0:
            self.meta_action_dim = self.params.action_dim


def _orthogonal(rng: np.random.Generator, shape: tuple[int, int], gain: float) -> np.ndarray:
    rows, cols = shape
    a = rng.normal(size=(max(rows, cols), min(rows, cols)))
    q, r = np.linalg.qr(a)
    q = q * np.sign(np.diag(r))
    if rows < cols:
        q = q.T
    return np.ascontiguousarray(gain * q[:rows, :cols], dtype=np.float32)


def init_params(obs_dim: int, action_dim: int, seed: int, hidden: int = HIDDEN) -> MlpParams:
    """Orthogonal init: sqrt(2) gain in the trunk, 0.01 policy, 1.0 value."""
    rng = np.random.default_rng(seed)
    return MlpParams(
        w0=_orthogonal(rng, (obs_dim, hidden), np.sqrt(2.0)),
        b0=np.zeros(hidden, dtype=np.float32),
        w1=_orthogonal(rng, (hidden, hidden), np.sqrt(2.0)),
        b1=np.zeros(hidden, dtype=np.float32),
        wp=_orthogonal(rng, (hidden, action_dim), 0.01),
        bp=np.zeros(action_dim, dtype=np.float32),
        wv=_orthogonal(rng, (hidden, 1), 1.0),
        bv=np.zeros(1, dtype=np.float32),
    )


def forward(params: MlpParams, obs: np.ndarray, mask: np.ndarray):
    """Masked action probabilities and value. Accepts one row or a batch."""
    single = obs.ndim == 1
    obs2 = np.ascontiguousarray(obs.reshape(1, -1) if single else obs, dtype=np.float32)
    mask2 = np.ascontiguousarray(
        (mask.reshape(1, -1) if single else mask), dtype=np.float32
    )
    if obs2.shape[1] != params.obs_dim or mask2.shape[1] != params.action_dim:
        raise ValueError(
            f"dim mismatch: obs {obs2.shape[1]} vs {params.obs_dim}, "
            f"mask {mask2.shape[1]} vs {params.action_dim}"
        )
    probs, values = kernels.policy_forward(obs2, mask2, *params.as_tuple())
    if single:
        return probs[0], float(values[0])
    return probs, values


def sample_actions(probs: np.ndarray, rng: np.random.Generator) -> "np.ndarray | int":
    """Sample one action per row; zero-probability actions are never drawn."""
    probs2 = probs.reshape(1, -1) if probs.ndim == 1 else probs
    out = np.empty(probs2.shape[0], dtype=np.int64)
    us = rng.random(probs2.shape[0])
    for i in range(probs2.shape[0]):
        r = us[i]
        chosen = -1
        row = probs2[i]
        for j in range(row.shape[0]):
            p = row[j]
            if p > 0.0:
                chosen = j
                r -= p
                if r < 0.0:
                    break
        out[i] = chosen
    if probs.ndim == 1:
        return int(out[0])
    return out


def log_prob(probs: np.ndarray, actions: np.ndarray) -> np.ndarray:
    idx = np.arange(probs.shape[0])
    return np.log(probs[idx, actions])


# -- checkpoint io -------------------------------------------------------

def save_checkpoint(ckpt: PolicyCheckpoint, path: str) -> None:
    p = ckpt.params
    gid = ckpt.game_id.encode()
    out = bytearray()
    out += CKPT_MAGIC
    out += struct.pack("<HB", CKPT_VERSION, len(gid))
    out += gid
    out += struct.pack(
        "<BIIQQ", ckpt.num_players, p.obs_dim, p.action_dim,
        ckpt.step, ckpt.seed,
    )
    layers = [(p.w0, p.b0), (p.w1, p.b1), (p.wp, p.bp), (p.wv, p.bv)]
    out += struct.pack("<B", len(layers))
    for w, b in layers:
        # file stores (out, in) row-major; memory is (in, out)
        wt = np.ascontiguousarray(w.T, dtype=np.float32)
        out += struct.pack("<II", wt.shape[0], wt.shape[1])
        out += wt.tobytes()
        out += np.ascontiguousarray(b, dtype=np.float32).tobytes()
    with open(path, "wb") as f:
        f.write(bytes(out))


def load_checkpoint(
    path: str,
    expect_game: str | None = None,
    expect_players: int | None = None,
) -> PolicyCheckpoint:
    with open(path, "rb") as f:
        blob = f.read()
    try:
        if blob[:4] != CKPT_MAGIC:
            raise CheckpointError(f"bad magic {blob[:4]!r}")
        pos = 4
        version, gid_len = struct.unpack_from("<HB", blob, pos)
        pos += 3
        if version != CKPT_VERSION:
            raise CheckpointError(f"unsupported version {version}")
        game_id = blob[pos:pos + gid_len].decode()
        pos += gid_len
        num_players, obs_dim, action_dim, step, seed = struct.unpack_from(
            "<BIIQQ", blob, pos
        )
        pos += 25
        (n_layers,) = struct.unpack_from("<B", blob, pos)
        pos += 1
        if n_layers != 4:
            raise CheckpointError(f"expected 4 layers, found {n_layers}")
        arrays = []
        for _ in range(n_layers):
            rows, cols = struct.unpack_from("<II", blob, pos)
            pos += 8
            w_bytes = rows * cols * 4
            wt = np.frombuffer(blob, dtype="<f4", count=rows * cols, offset=pos)
            pos += w_bytes
            b = np.frombuffer(blob, dtype="<f4", count=rows, offset=pos)
            pos += rows * 4
            arrays.append((wt.reshape(rows, cols), b))
        if pos != len(blob):
            raise CheckpointError("trailing bytes after last layer")
    except (struct.error, ValueError, UnicodeDecodeError) as exc:
        raise CheckpointError(f"truncated or corrupt checkpoint: {exc}") from exc
    params = MlpParams(
        w0=np.ascontiguousarray(arrays[0][0].T), b0=arrays[0][1].copy(),
        w1=np.ascontiguousarray(arrays[1][0].T), b1=arrays[1][1].copy(),
        wp=np.ascontiguousarray(arrays[2][0].T), bp=arrays[2][1].copy(),
        wv=np.ascontiguousarray(arrays[3][0].T), bv=arrays[3][1].copy(),
    )
    if params.obs_dim != obs_dim or params.action_dim != action_dim:
        raise CheckpointError("layer shapes disagree with metadata")
    if params.w0.shape[1] != params.w1.shape[0] or params.w1.shape[1] != params.wp.shape[0]:
        raise CheckpointError("inconsistent layer shapes")
    if expect_game is not None and game_id != expect_game:
        raise CheckpointError(f"checkpoint is for {game_id!r}, expected {expect_game!r}")
    if expect_players is not None and num_players != expect_players:
        raise CheckpointError(
            f"checkpoint is for {num_players} players, expected {expect_players}"
        )
    return PolicyCheckpoint(
        params=params, game_id=game_id, num_players=num_players,
        step=step, seed=seed,
    )
