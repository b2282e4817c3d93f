/**
 * Environment handles over the native server: make / reset / step / close,
 * plus a thin batched vector wrapper. Observations and masks arrive as
 * contiguous typed arrays. One in-flight call per handle: concurrent use
 * of the same handle throws instead of interleaving.
 */
import { Server, ServerError, type ServerOptions } from "./protocol.js";

export interface ResetResult {
  obs: Float64Array;
  mask: Int8Array;
  currentPlayer: number;
}

export interface StepResult extends ResetResult {
  reward: number;
  done: boolean;
  info: Record<string, unknown>;
}

function toObs(values: unknown): Float64Array {
  return Float64Array.from(values as number[]);
}

function toMask(values: unknown): Int8Array {
  return Int8Array.from(values as number[]);
}

export class Env {
  private busy = false;
  private closed = false;

  constructor(
    private readonly server: Server,
    private readonly id: number,
    public readonly game: string,
    public readonly players: number,
    public readonly rewardMode: string,
    public readonly actionCount: number,
    public readonly obsLen: number,
    public readonly defaultSeed: number,
  ) {}

  private async exclusive<T>(fn: () => Promise<T>): Promise<T> {
    if (this.closed) throw new ServerError("LifecycleError", "environment is closed");
    if (this.busy) throw new ServerError("ConcurrencyError", "handle already has a call in flight");
    this.busy = true;
    try {
      return await fn();
    } finally {
      this.busy = false;
    }
  }

  async reset(seed?: number | bigint): Promise<ResetResult> {
    return this.exclusive(async () => {
      const chosen = seed ?? this.defaultSeed;
      return this.resetRaw(chosen);
    });
  }

  private async resetRaw(seed: number | bigint): Promise<ResetResult> {
    // 64-bit seeds exceed JSON number precision: send as a decimal string
    const out = await this.server.request("reset", {
      env: this.id,
      seed: typeof seed === "bigint" ? seed.toString() : seed,
    });
    return {
      obs: toObs(out.obs),
      mask: toMask(out.mask),
      currentPlayer: out.current_player as number,
    };
  }

  async step(action: number): Promise<StepResult> {
    return this.exclusive(async () => {
      const out = await this.server.request("step", { env: this.id, action });
      return {
        obs: toObs(out.obs),
        mask: toMask(out.mask),
        currentPlayer: out.current_player as number,
        reward: out.reward as number,
        done: out.done as boolean,
        info: (out.info ?? {}) as Record<string, unknown>,
      };
    });
  }

  async close(): Promise<void> {
    if (this.closed) return;
    this.closed = true;
    await this.server.request("close", { env: this.id });
  }
}

export class Client {
  private server: Server;

  constructor(options: ServerOptions = {}) {
    this.server = new Server(options);
  }

  async make(game: string, players: number, rewardMode = "terminal", seed = 0): Promise<Env> {
    const out = await this.server.request("make", {
      game,
      players,
      reward_mode: rewardMode,
    });
    return new Env(
      this.server,
      out.env as number,
      game,
      players,
      rewardMode,
      out.action_count as number,
      out.obs_len as number,
      seed,
    );
  }

  /** Load a checkpoint server-side; returns its id and dimensions. */
  async loadPolicy(
    path: string,
    expect?: { game?: string; players?: number },
  ): Promise<{ policy: number; game: string; obsDim: number; actionDim: number }> {
    const out = await this.server.request("load_policy", {
      path,
      expect_game: expect?.game,
      expect_players: expect?.players,
    });
    return {
      policy: out.policy as number,
      game: out.game as string,
      obsDim: out.obs_dim as number,
      actionDim: out.action_dim as number,
    };
  }

  /** Native-side forward pass (reference for parity checks). */
  async policyForward(
    policy: number,
    obs: ArrayLike<number>,
    mask: ArrayLike<number>,
  ): Promise<{ probs: Float64Array; value: number }> {
    const out = await this.server.request("policy_forward", {
      policy,
      obs: Array.from(obs),
      mask: Array.from(mask),
    });
    return { probs: toObs(out.probs), value: out.value as number };
  }

  async close(): Promise<void> {
    await this.server.shutdown();
  }
}

/** Batched wrapper: one server process, n independent environments. */
export class VecEnv {
  private constructor(private readonly envs: Env[]) {}

  static async create(
    client: Client,
    n: number,
    game: string,
    players: number,
    rewardMode = "terminal",
  ): Promise<VecEnv> {
    const envs = [];
    for (let i = 0; i < n; i++) {
      envs.push(await client.make(game, players, rewardMode, i));
    }
    return new VecEnv(envs);
  }

  get size(): number {
    return this.envs.length;
  }

  env(i: number): Env {
    return this.envs[i];
  }

  async resetAll(seeds: number[]): Promise<ResetResult[]> {
    return Promise.all(this.envs.map((env, i) => env.reset(seeds[i])));
  }

  async stepAll(actions: number[]): Promise<StepResult[]> {
    return Promise.all(this.envs.map((env, i) => env.step(actions[i])));
  }

  async closeAll(): Promise<void> {
    await Promise.all(this.envs.map((env) => env.close()));
  }
}
