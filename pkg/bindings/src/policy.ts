/**
 * Checkpoint files: parser and local forward pass.
 *
 * File layout (little-endian): magic "PTCK", u16 version, game id
 * (u8 length + ascii), u8 players, u32 obs_dim, u32 action_dim, u64 step,
 * u64 seed, u8 layer count, then per layer u32 out, u32 in, out*in
 * row-major float32 weights and out float32 biases.
 *
 * The forward pass mirrors the native one: float64 accumulation with
 * float32 rounding at each layer output, masked logits filled with -1e9,
 * probabilities under 1e-12 truncated and renormalized to exact zeros.
 */
import { readFileSync } from "node:fs";

const MAGIC = 0x5054434b; // "PTCK" big-endian read of the 4 bytes
const MASK_FILL = -1e9;
const PROB_FLOOR = 1e-12;

export class CheckpointError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "CheckpointError";
  }
}

interface Layer {
  out: number;
  in: number;
  weights: Float32Array; // (out, in) row-major
  bias: Float32Array;
}

export class Policy {
  private constructor(
    public readonly gameId: string,
    public readonly numPlayers: number,
    public readonly obsDim: number,
    public readonly actionDim: number,
    public readonly step: bigint,
    public readonly seed: bigint,
    private readonly layers: Layer[],
  ) {}

  static fromFile(path: string, expect?: { game?: string; players?: number }): Policy {
    const buf = readFileSync(path);
    return Policy.fromBuffer(buf, expect);
  }

  static fromBuffer(buf: Buffer, expect?: { game?: string; players?: number }): Policy {
    const view = new DataView(buf.buffer, buf.byteOffset, buf.byteLength);
    let pos = 0;
    const need = (n: number) => {
      if (pos + n > buf.byteLength) throw new CheckpointError("truncated checkpoint");
      pos += n;
      return pos - n;
    };
    if (buf.byteLength < 4 || view.getUint32(need(4), false) !== MAGIC) {
      throw new CheckpointError("bad magic");
    }
    const version = view.getUint16(need(2), true);
    if (version !== 1) throw new CheckpointError(`unsupported version ${version}`);
    const gidLen = view.getUint8(need(1));
    const gameId = buf.subarray(pos, need(gidLen) + gidLen).toString("ascii");
    const numPlayers = view.getUint8(need(1));
    const obsDim = view.getUint32(need(4), true);
    const actionDim = view.getUint32(need(4), true);
    const step = view.getBigUint64(need(8), true);
    const seed = view.getBigUint64(need(8), true);
    const layerCount = view.getUint8(need(1));
    if (layerCount !== 4) throw new CheckpointError(`expected 4 layers, found ${layerCount}`);
    const layers: Layer[] = [];
    for (let k = 0; k < layerCount; k++) {
      const rows = view.getUint32(need(4), true);
      const cols = view.getUint32(need(4), true);
      const wOff = need(rows * cols * 4);
      const bOff = need(rows * 4);
      const weights = new Float32Array(rows * cols);
      for (let i = 0; i < rows * cols; i++) weights[i] = view.getFloat32(wOff + i * 4, true);
      const bias = new Float32Array(rows);
      for (let i = 0; i < rows; i++) bias[i] = view.getFloat32(bOff + i * 4, true);
      layers.push({ out: rows, in: cols, weights, bias });
    }
    if (pos !== buf.byteLength) throw new CheckpointError("trailing bytes after last layer");
    const [l0, l1, lp, lv] = layers;
    if (l0.in !== obsDim || lp.out !== actionDim || lv.out !== 1 ||
        l1.in !== l0.out || l1.out !== l1.in || lp.in !== l1.out || lv.in !== l1.out) {
      throw new CheckpointError("layer shapes disagree with metadata");
    }
    if (expect?.game !== undefined && expect.game !== gameId) {
      throw new CheckpointError(`checkpoint is for ${gameId}, expected ${expect.game}`);
    }
    if (expect?.players !== undefined && expect.players !== numPlayers) {
      throw new CheckpointError(`checkpoint is for ${numPlayers} players`);
    }
    return new Policy(gameId, numPlayers, obsDim, actionDim, step, seed, layers);
  }

  private dense(layer: Layer, x: Float64Array, tanh: boolean): Float64Array {
    const y = new Float64Array(layer.out);
    for (let o = 0; o < layer.out; o++) {
      let acc = layer.bias[o];
      const row = o * layer.in;
      for (let i = 0; i < layer.in; i++) acc += layer.weights[row + i] * x[i];
      y[o] = Math.fround(tanh ? Math.tanh(acc) : acc);
    }
    return y;
  }

  forward(obs: ArrayLike<number>, mask: ArrayLike<number>): { probs: Float64Array; value: number } {
    if (obs.length !== this.obsDim || mask.length !== this.actionDim) {
      throw new CheckpointError(
        `dim mismatch: obs ${obs.length} vs ${this.obsDim}, mask ${mask.length} vs ${this.actionDim}`,
      );
    }
    const x = Float64Array.from(obs, Math.fround);
    const h1 = this.dense(this.layers[0], x, true);
    const h2 = this.dense(this.layers[1], h1, true);
    const logits = this.dense(this.layers[2], h2, false);
    const value = this.dense(this.layers[3], h2, false)[0];
    let hi = -Infinity;
    for (let j = 0; j < logits.length; j++) {
      if (!(mask[j] > 0)) logits[j] = MASK_FILL;
      if (logits[j] > hi) hi = logits[j];
    }
    const probs = new Float64Array(logits.length);
    let tot = 0;
    for (let j = 0; j < logits.length; j++) {
      const e = Math.exp(logits[j] - hi);
      probs[j] = e;
      tot += e;
    }
    let tot2 = 0;
    for (let j = 0; j < probs.length; j++) {
      let p = probs[j] / tot;
      if (p < PROB_FLOOR) p = 0;
      probs[j] = p;
      tot2 += p;
    }
    for (let j = 0; j < probs.length; j++) probs[j] /= tot2;
    return { probs, value };
  }
}
