/**
 * Deterministic 64-bit mixing shared with the native engine.
 *
 * The scripted-action chooser used by the trajectory-parity contract is a
 * pure function of (run seed, episode, step): both sides derive the same
 * SplitMix64 stream, so a replay over the wire must match a native replay
 * bit for bit.
 */

const MASK = (1n << 64n) - 1n;
const GOLDEN = 0x9e3779b97f4a7c15n;

export function mix64(z: bigint): bigint {
  z &= MASK;
  z = ((z ^ (z >> 30n)) * 0xbf58476d1ce4e5b9n) & MASK;
  z = ((z ^ (z >> 27n)) * 0x94d049bb133111ebn) & MASK;
  return z ^ (z >> 31n);
}

export function deriveSeed(seed: bigint | number, ...salts: Array<bigint | number>): bigint {
  let z = BigInt(seed) & MASK;
  for (const salt of salts) {
    z = mix64((z + GOLDEN + (BigInt(salt) & MASK)) & MASK);
  }
  return mix64(z);
}

/** Episode base for the scripted rollout of episode `ep` under `seed`. */
export function scriptedEpisodeBase(seed: number, ep: number): bigint {
  return deriveSeed(seed, 0x5c, ep);
}

/** Reset seed used by the native `rollout` command for episode `ep`. */
export function scriptedResetSeed(seed: number, ep: number): bigint {
  return deriveSeed(seed, 0xe5, ep);
}

/** Deterministic pick among the legal action ids at step `t`. */
export function scriptedAction(episodeBase: bigint, t: number, legal: number[]): number {
  const draw = mix64((episodeBase + BigInt(t + 1) * GOLDEN) & MASK);
  return legal[Number(draw % BigInt(legal.length))];
}

/** Legal action ids from a 0/1 mask. */
export function legalIds(mask: ArrayLike<number>): number[] {
  const out: number[] = [];
  for (let i = 0; i < mask.length; i++) {
    if (mask[i] > 0) out.push(i);
  }
  return out;
}
