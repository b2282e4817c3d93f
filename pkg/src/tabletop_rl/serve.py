"""Line-delimited JSON protocol over stdio for language bindings.

One request per line: {"id": int, "op": str, ...}; one response per line:
{"id": int, "ok": true, ...} or {"id": int, "ok": false, "error":
{"type": str, "message": str}}. Ops: make, reset, step, close,
load_policy, policy_forward, shutdown. Errors never crash the server.
"""
from __future__ import annotations

import json
import sys

import numpy as np

from .envapi import EnvSession
from .nn.net import forward, load_checkpoint


def _jsonable(value):
    if isinstance(value, np.ndarray):
        if np.issubdtype(value.dtype, np.integer):
            return [int(x) for x in value]
        return [float(x) for x in value]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


class ServeLoop:
    def __init__(self):
        self.envs: dict[int, EnvSession] = {}
        self.policies: dict[int, object] = {}
        self._next_env = 0
        self._next_policy = 0

    def handle(self, req: dict) -> dict:
        op = req.get("op")
        if op == "make":
            session = EnvSession(
                req["game"], int(req["players"]),
                req.get("reward_mode", "terminal"),
            )
            env_id = self._next_env
            self._next_env += 1
            self.envs[env_id] = session
            return {"env": env_id, "action_count": session.spec.action_count,
                    "obs_len": session.spec.obs_len(session.num_players)}
        if op == "reset":
            out = self.envs[req["env"]].reset(int(req["seed"]))
            return _jsonable(out)
        if op == "step":
            out = self.envs[req["env"]].step(int(req["action"]))
            return _jsonable(out)
        if op == "close":
            env = self.envs.pop(req["env"], None)
            if env is not None:
                env.close()
            return {}
        if op == "load_policy":
            ckpt = load_checkpoint(
                req["path"],
                expect_game=req.get("expect_game"),
                expect_players=req.get("expect_players"),
            )
            pid = self._next_policy
            self._next_policy += 1
            self.policies[pid] = ckpt
            return {
                "policy": pid, "game": ckpt.game_id,
                "players": ckpt.num_players,
                "obs_dim": ckpt.params.obs_dim,
                "action_dim": ckpt.params.action_dim,
                "step": ckpt.step,
            }
        if op == "policy_forward":
            ckpt = self.policies[req["policy"]]
            obs = np.asarray(req["obs"], dtype=np.float32)
            mask = np.asarray(req["mask"], dtype=np.float32)
            probs, value = forward(ckpt.params, obs, mask)
            return {"probs": _jsonable(probs), "value": float(value)}
        raise ValueError(f"unknown op {op!r}")

    def run(self, stdin=None, stdout=None) -> int:
        stdin = stdin or sys.stdin
        stdout = stdout or sys.stdout
        for line in stdin:
            line = line.strip()
            if not line:
                continue
            rid = None
            try:
                req = json.loads(line)
                rid = req.get("id")
                if req.get("op") == "shutdown":
                    stdout.write(json.dumps({"id": rid, "ok": True}) + "\n")
                    stdout.flush()
                    return 0
                out = self.handle(req)
                out.update({"id": rid, "ok": True})
                stdout.write(json.dumps(out) + "\n")
            except Exception as exc:  # protocol surface: report, never abort
                err = {
                    "id": rid, "ok": False,
                    "error": {"type": type(exc).__name__, "message": str(exc)},
                }
                stdout.write(json.dumps(err) + "\n")
            stdout.flush()
        return 0
