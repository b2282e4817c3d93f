"""Checkpoint-pool self-play PPO.

The trainer steps a vector of environments where one seat per environment
belongs to the learner (re-randomized every episode reset) and the other
seats are filled by frozen checkpoints drawn from a bounded recency pool.
Each vector step, current observations and masks are split between the
learner and the opponents, actions are merged back in environment order,
and only the learner's transitions are buffered. Buffers flush into one
variable-size batch as soon as any environment's buffer reaches the
horizon; unfinished episodes bootstrap from the learner's value estimate
at its latest decision point.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import asdict, dataclass, field

import numpy as np

from .engine import GameState, Outcome, game_spec, reset
from .nn import kernels
from .nn.net import (
    MlpParams,
    PolicyCheckpoint,
    forward,
    init_params,
    log_prob,
    sample_actions,
    save_checkpoint,
)
from .rewards import (
    RewardAccumulator,
    RewardError,
    RewardMode,
    check_mode_supported,
    parse_mode,
)
from .rng import derive_seed


@dataclass
class PpoConfig:
    game: str
    num_players: int = 2
    reward_mode: str = "terminal"
    total_steps: int = 1_000_000
    lr: float = 1e-3
    gamma: float = 0.99
    gae_lambda: float = 0.95
    clip: float = 0.2
    update_epochs: int = 4
    num_minibatches: int = 4
    ent_coef: float = 0.01
    vf_coef: float = 0.5
    max_grad_norm: float = 0.5
    num_envs: int = 8
    horizon: int = 128
    pool_size: int = 10
    checkpoint_interval: int = 100_000
    resample_interval: int = 20_000
    latest_bias: float = 0.5
    eval_interval: int = 20_000
    eval_episodes: int = 5
    mcts_iterations: int = 128
    adam_eps: float = 1e-5

    def validate(self) -> None:
        spec = game_spec(self.game)
        if not spec.min_players <= self.num_players <= spec.max_players:
            raise ValueError(
                f"{self.game} supports {spec.min_players}-{spec.max_players} players"
            )
        try:
            check_mode_supported(parse_mode(self.reward_mode), spec.has_score)
        except RewardError as exc:
            raise ValueError(str(exc)) from None
        for name in ("total_steps", "lr", "gamma", "gae_lambda", "update_epochs",
                     "num_minibatches", "ent_coef", "vf_coef", "num_envs", "horizon",
                     "pool_size", "checkpoint_interval", "resample_interval",
                     "eval_interval", "eval_episodes", "mcts_iterations"):
            if getattr(self, name) <= 0 and name not in ("ent_coef",):
                raise ValueError(f"config field {name} must be positive")
        if not 0.0 < self.clip < 1.0:
            raise ValueError("clip must be in (0, 1)")
        if not 0.0 <= self.latest_bias <= 1.0:
            raise ValueError("latest_bias must be in [0, 1]")


@dataclass
class PoolEntry:
    uid: int
    checkpoint: PolicyCheckpoint


class OpponentPool:
    """Bounded ring of the most recent checkpoints, oldest evicted first."""

    def __init__(self, pool_size: int = 10, add_interval: int = 100_000,
                 resample_interval: int = 20_000, latest_bias: float = 0.5):
        self.pool_size = pool_size
        self.add_interval = add_interval
        self.resample_interval = resample_interval
        self.latest_bias = latest_bias
        self._entries: list[PoolEntry] = []
        self._next_uid = 0

    def __len__(self) -> int:
        return len(self._entries)

    @property
    def entries(self) -> list[PoolEntry]:
        return list(self._entries)

    def add(self, ckpt: PolicyCheckpoint) -> PoolEntry:
        entry = PoolEntry(self._next_uid, ckpt)
        self._next_uid += 1
        self._entries.append(entry)
        if len(self._entries) > self.pool_size:
            self._entries.pop(0)
        return entry

    def sample(self, rng: np.random.Generator) -> PoolEntry:
        if not self._entries:
            raise ValueError("cannot sample from an empty pool")
        if len(self._entries) == 1:
            return self._entries[-1]
        if rng.random() < self.latest_bias:
            return self._entries[-1]
        return self._entries[int(rng.integers(0, len(self._entries) - 1))]


@dataclass
class PendingStep:
    obs: np.ndarray
    mask: np.ndarray
    action: int
    logp: float
    value: float


class EnvSlot:
    """One environment plus its learner seat, opponents and buffers."""

    def __init__(self, index: int, cfg: PpoConfig):
        self.index = index
        self.cfg = cfg
        self.mode = parse_mode(cfg.reward_mode)
        self.state: GameState | None = None
        self.learner_seat = 0
        self.opponents: list[PoolEntry | None] = [None] * cfg.num_players
        self.acc: RewardAccumulator | None = None
        self.pending: PendingStep | None = None
        self.steps: list[tuple] = []  # completed (obs, mask, a, logp, value, reward, done)

    def reset(self, seed: int, learner_seat: int) -> None:
        self.state = reset(self.cfg.game, self.cfg.num_players, seed)
        self.learner_seat = learner_seat
        self.acc = RewardAccumulator(self.mode, self.state)

    def close_pending(self, reward: float, done: bool) -> None:
        p = self.pending
        self.steps.append((p.obs, p.mask, p.action, p.logp, p.value, reward, done))
        self.pending = None


def gae_advantages(rewards, values, dones, bootstrap, gamma, lam):
    """Generalized advantage estimates for one env segment (float64)."""
    return kernels.gae(
        np.asarray(rewards, dtype=np.float64),
        np.asarray(values, dtype=np.float64),
        np.asarray(dones, dtype=np.float64),
        float(bootstrap), float(gamma), float(lam),
    )


class Adam:
    def __init__(self, params: MlpParams, lr: float, eps: float = 1e-5):
        self.lr = lr
        self.eps = eps
        self.beta1, self.beta2 = 0.9, 0.999
        self.t = 0
        self.m = [np.zeros_like(a) for a in params.as_tuple()]
        self.v = [np.zeros_like(a) for a in params.as_tuple()]

    def step(self, params: MlpParams, grads) -> None:
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        bc1 = 1.0 - b1 ** self.t
        bc2 = 1.0 - b2 ** self.t
        for i, (a, g) in enumerate(zip(params.as_tuple(), grads)):
            self.m[i] = b1 * self.m[i] + (1 - b1) * g
            self.v[i] = b2 * self.v[i] + (1 - b2) * g * g
            a -= (self.lr * (self.m[i] / bc1)
                  / (np.sqrt(self.v[i] / bc2) + self.eps)).astype(np.float32)


def clip_grad_norm(grads, max_norm: float):
    total = 0.0
    for g in grads:
        total += float(np.sum(g.astype(np.float64) ** 2))
    norm = total ** 0.5
    if norm > max_norm:
        scale = max_norm / (norm + 1e-6)
        grads = tuple((g * scale).astype(g.dtype) for g in grads)
    return grads, norm


class SelfPlayTrainer:
    """Runs the full training loop for one (game, seed) configuration."""

    def __init__(self, cfg: PpoConfig, seed: int, metrics_file=None,
                 checkpoint_dir: str | None = None, eval_fn=None):
        cfg.validate()
        self.cfg = cfg
        self.seed = seed
        self.metrics_file = metrics_file
        self.checkpoint_dir = checkpoint_dir
        self.eval_fn = eval_fn  # called as eval_fn(trainer, step, checkpoint)
        spec = game_spec(cfg.game)
        self.obs_dim = spec.obs_len(cfg.num_players)
        self.action_dim = spec.action_count
        self.params = init_params(self.obs_dim, self.action_dim, derive_seed(seed, 0xA11))
        self.opt = Adam(self.params, cfg.lr, cfg.adam_eps)
        self.pool = OpponentPool(cfg.pool_size, cfg.checkpoint_interval,
                                 cfg.resample_interval, cfg.latest_bias)
        self.pool.add(self._snapshot(0))
        self.seat_rng = np.random.default_rng(derive_seed(seed, 1))
        self.learner_rng = np.random.default_rng(derive_seed(seed, 2))
        self.opp_rng = np.random.default_rng(derive_seed(seed, 3))
        self.pool_rng = np.random.default_rng(derive_seed(seed, 4))
        self.update_rng = np.random.default_rng(derive_seed(seed, 5))
        self._reset_counter = 0
        self.global_step = 0
        self.episodes = 0
        self.ep_wins: deque[float] = deque(maxlen=100)
        self.ep_ties: deque[float] = deque(maxlen=100)
        self.ep_scores: deque[float] = deque(maxlen=100)
        self.ep_gaps: deque[float] = deque(maxlen=100)
        self.envs = [EnvSlot(i, cfg) for i in range(cfg.num_envs)]
        for env in self.envs:
            self._reset_env(env)
            self._assign_opponents(env)

    # -- bookkeeping ------------------------------------------------------

    def _snapshot(self, step: int) -> PolicyCheckpoint:
        return PolicyCheckpoint(
            params=self.params.copy(), game_id=self.cfg.game,
            num_players=self.cfg.num_players, step=step, seed=self.seed,
        )

    def _reset_env(self, env: EnvSlot) -> None:
        self._reset_counter += 1
        seed = derive_seed(self.seed, 0xE0, env.index, self._reset_counter)
        env.reset(seed, int(self.seat_rng.integers(0, self.cfg.num_players)))

    def _assign_opponents(self, env: EnvSlot) -> None:
        env.opponents = [
            self.pool.sample(self.pool_rng) for _ in range(self.cfg.num_players)
        ]

    def _emit(self, record: dict) -> None:
        if self.metrics_file is not None:
            self.metrics_file.write(json.dumps(record, sort_keys=True) + "\n")
            self.metrics_file.flush()

    # -- stepping ----------------------------------------------------------

    def route_step(self) -> list[int]:
        """One vector step: dispatch obs/masks, merge actions, apply.

        Returns the merged action vector in environment order (entry i is
        the action applied in env i).
        """
        learner_envs: list[EnvSlot] = []
        opp_groups: dict[int, tuple[PoolEntry, list[EnvSlot]]] = {}
        for env in self.envs:
            actor = env.state.current_player()
            if actor == env.learner_seat:
                learner_envs.append(env)
            else:
                entry = env.opponents[actor]
                group = opp_groups.setdefault(entry.uid, (entry, []))
                group[1].append(env)
        actions: dict[int, int] = {}
        if learner_envs:
            obs = np.stack([e.state.observe(e.learner_seat) for e in learner_envs])
            masks = np.stack([e.state.legal_mask() for e in learner_envs]).astype(np.float32)
            probs, values = forward(self.params, obs, masks)
            acts = sample_actions(probs, self.learner_rng)
            logps = log_prob(probs, acts)
            for i, env in enumerate(learner_envs):
                if env.pending is not None:
                    env.close_pending(env.acc.on_decision(env.state, env.learner_seat), False)
                else:
                    env.acc.on_decision(env.state, env.learner_seat)
                env.pending = PendingStep(obs[i], masks[i], int(acts[i]),
                                          float(logps[i]), float(values[i]))
                actions[env.index] = int(acts[i])
        for uid in sorted(opp_groups):
            entry, group = opp_groups[uid]
            obs = np.stack([e.state.observe(e.state.current_player()) for e in group])
            masks = np.stack([e.state.legal_mask() for e in group]).astype(np.float32)
            probs, _ = forward(entry.checkpoint.params, obs, masks)
            acts = sample_actions(probs, self.opp_rng)
            for env, a in zip(group, acts):
                actions[env.index] = int(a)
        merged = [actions[env.index] for env in self.envs]
        for env, action in zip(self.envs, merged):
            result = env.state.apply(action)
            self.global_step += 1
            if result is not None:
                self._finish_episode(env, result)
        return merged

    def _finish_episode(self, env: EnvSlot, result) -> None:
        seat = env.learner_seat
        if env.pending is not None:
            env.close_pending(env.acc.on_terminal(env.state, seat), True)
        outcome = result.outcomes[seat]
        self.ep_wins.append(1.0 if outcome == Outcome.WIN else 0.0)
        self.ep_ties.append(1.0 if outcome == Outcome.DRAW else 0.0)
        score = result.scores[seat]
        winner_score = max(
            (result.scores[p] for p in range(self.cfg.num_players)
             if result.ranks[p] == 1),
            default=score,
        )
        self.ep_scores.append(score)
        self.ep_gaps.append(0.0 if result.ranks[seat] == 1 else winner_score - score)
        self.episodes += 1
        self._reset_env(env)

    # -- updates -----------------------------------------------------------

    def maybe_update(self):
        """Flush all buffers and run PPO epochs once any buffer reaches H."""
        if not any(len(e.steps) >= self.cfg.horizon for e in self.envs):
            return None
        cfg = self.cfg
        obs_l, mask_l, act_l, logp_l, adv_l, ret_l = [], [], [], [], [], []
        for env in self.envs:
            if not env.steps:
                continue
            seg = env.steps
            rewards = [s[5] for s in seg]
            values = [s[4] for s in seg]
            dones = [1.0 if s[6] else 0.0 for s in seg]
            if dones[-1]:
                bootstrap = 0.0
            else:
                # value at the learner's latest decision (the pending step)
                bootstrap = env.pending.value if env.pending is not None else 0.0
            adv = gae_advantages(rewards, values, dones, bootstrap,
                                 cfg.gamma, cfg.gae_lambda)
            ret = adv + np.asarray(values, dtype=np.float64)
            obs_l.extend(s[0] for s in seg)
            mask_l.extend(s[1] for s in seg)
            act_l.extend(s[2] for s in seg)
            logp_l.extend(s[3] for s in seg)
            adv_l.append(adv)
            ret_l.append(ret)
            env.steps = []
        obs = np.stack(obs_l).astype(np.float32)
        masks = np.stack(mask_l).astype(np.float32)
        actions = np.asarray(act_l, dtype=np.int64)
        old_logp = np.asarray(logp_l, dtype=np.float32)
        adv = np.concatenate(adv_l)
        returns = np.concatenate(ret_l).astype(np.float32)
        adv = ((adv - adv.mean()) / (adv.std() + 1e-8)).astype(np.float32)
        n = len(actions)
        stats_sum = np.zeros(6, dtype=np.float64)
        passes = 0
        for _ in range(cfg.update_epochs):
            perm = self.update_rng.permutation(n)
            for chunk in np.array_split(perm, cfg.num_minibatches):
                if len(chunk) == 0:
                    continue
                grads, stats = kernels.ppo_grads(
                    obs[chunk], masks[chunk], actions[chunk], old_logp[chunk],
                    adv[chunk], returns[chunk],
                    *self.params.as_tuple(),
                    cfg.clip, cfg.ent_coef, cfg.vf_coef,
                )
                if not np.isfinite(stats[5]):
                    raise FloatingPointError(
                        f"non-finite loss at step {self.global_step}: {stats}"
                    )
                grads, _ = clip_grad_norm(grads, cfg.max_grad_norm)
                self.opt.step(self.params, grads)
                stats_sum += stats
                passes += 1
        stats_avg = stats_sum / max(passes, 1)
        return {"batch_size": n, "stats": stats_avg}

    # -- main loop -----------------------------------------------------------

    def train(self) -> list[PolicyCheckpoint]:
        cfg = self.cfg
        next_add = cfg.checkpoint_interval
        next_resample = cfg.resample_interval
        next_eval = cfg.eval_interval
        saved: list[PolicyCheckpoint] = []
        while self.global_step < cfg.total_steps:
            self.route_step()
            update = self.maybe_update()
            if update is not None:
                s = update["stats"]
                self._emit({
                    "step": self.global_step, "kind": "selfplay",
                    "game": cfg.game, "seed": self.seed,
                    "episodes": self.episodes,
                    "win_rate": _mean(self.ep_wins),
                    "tie_rate": _mean(self.ep_ties),
                    "mean_score": _mean(self.ep_scores),
                    "mean_gap": _mean(self.ep_gaps),
                    "batch_size": int(update["batch_size"]),
                    "policy_loss": float(s[0]), "value_loss": float(s[1]),
                    "entropy": float(s[2]), "clip_frac": float(s[3]),
                    "approx_kl": float(s[4]),
                })
            if self.global_step >= next_add:
                ckpt = self._snapshot(self.global_step)
                self.pool.add(ckpt)
                saved.append(ckpt)
                if self.checkpoint_dir is not None:
                    save_checkpoint(
                        ckpt,
                        f"{self.checkpoint_dir}/{cfg.game}_{self.seed}_{self.global_step}.ptck",
                    )
                next_add += cfg.checkpoint_interval
            if self.global_step >= next_resample:
                for env in self.envs:
                    self._assign_opponents(env)
                next_resample += cfg.resample_interval
            if self.global_step >= next_eval:
                if self.eval_fn is not None:
                    self.eval_fn(self, self.global_step, self._snapshot(self.global_step))
                next_eval += cfg.eval_interval
        return saved


def _mean(values) -> float:
    if not values:
        return 0.0
    return float(sum(values) / len(values))


def config_from_dict(d: dict) -> PpoConfig:
    known = {f for f in PpoConfig.__dataclass_fields__}
    unknown = set(d) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    return PpoConfig(**d)


def config_to_dict(cfg: PpoConfig) -> dict:
    return asdict(cfg)
