/**
 * Small transformer encoder with explicit forward/backward passes.
 *
 * Pre-LN blocks: x + Attn(LN(x)), then x + FFN(LN(x)), with a final
 * LayerNorm. Heads are plain linear layers applied at selected positions
 * only, so the vocabulary-sized LM head is never evaluated at unmasked
 * positions.
 */

import { F64, addBiasRows, colSumAccum, matmul, matmulATAccum, matmulBT, zeros } from "./tensor.js";
import { Mulberry32 } from "./rng.js";

export interface ModelConfig {
  layers: number;
  heads: number;
  hidden: number;
  ffn: number;
  maxLen: number;
  vocabSize: number;
  dtypeClasses: number;
  vtypeClasses: number;
  binClasses: number;
}

export class ParamStore {
  data = new Map<string, F64>();
  grads = new Map<string, F64>();
  shapes = new Map<string, [number, number]>();

  add(name: string, rows: number, cols: number, init: (i: number) => number): void {
    const arr = new Float64Array(rows * cols);
    for (let i = 0; i < arr.length; i++) arr[i] = init(i);
    this.data.set(name, arr);
    this.grads.set(name, new Float64Array(rows * cols));
    this.shapes.set(name, [rows, cols]);
  }

  get(name: string): F64 {
    const arr = this.data.get(name);
    if (!arr) throw new Error(`unknown parameter ${name}`);
    return arr;
  }

  grad(name: string): F64 {
    const arr = this.grads.get(name);
    if (!arr) throw new Error(`unknown parameter ${name}`);
    return arr;
  }

  has(name: string): boolean {
    return this.data.has(name);
  }

  zeroGrads(): void {
    for (const g of this.grads.values()) g.fill(0);
  }

  names(): string[] {
    return [...this.data.keys()];
  }
}

const LN_EPS = 1e-5;
const GELU_C = Math.sqrt(2 / Math.PI);

function gelu(x: number): number {
  const u = GELU_C * (x + 0.044715 * x * x * x);
  return 0.5 * x * (1 + Math.tanh(u));
}

function geluGrad(x: number): number {
  const u = GELU_C * (x + 0.044715 * x * x * x);
  const t = Math.tanh(u);
  return 0.5 * (1 + t) + 0.5 * x * (1 - t * t) * GELU_C * (1 + 3 * 0.044715 * x * x);
}

interface LayerNormCache {
  xhat: F64;
  rstd: F64;
}

function layerNormForward(x: F64, gamma: F64, beta: F64, n: number, h: number, out: F64): LayerNormCache {
  const xhat = new Float64Array(n * h);
  const rstd = new Float64Array(n);
  for (let i = 0; i < n; i++) {
    const xi = i * h;
    let mean = 0;
    for (let j = 0; j < h; j++) mean += x[xi + j];
    mean /= h;
    let variance = 0;
    for (let j = 0; j < h; j++) {
      const d = x[xi + j] - mean;
      variance += d * d;
    }
    variance /= h;
    const r = 1 / Math.sqrt(variance + LN_EPS);
    rstd[i] = r;
    for (let j = 0; j < h; j++) {
      const xh = (x[xi + j] - mean) * r;
      xhat[xi + j] = xh;
      out[xi + j] = xh * gamma[j] + beta[j];
    }
  }
  return { xhat, rstd };
}

function layerNormBackward(
  dy: F64, cache: LayerNormCache, gamma: F64, n: number, h: number,
  dGamma: F64, dBeta: F64, dx: F64,
): void {
  const { xhat, rstd } = cache;
  for (let i = 0; i < n; i++) {
    const xi = i * h;
    let sumDxhat = 0;
    let sumDxhatXhat = 0;
    for (let j = 0; j < h; j++) {
      const dyv = dy[xi + j];
      const xh = xhat[xi + j];
      dGamma[j] += dyv * xh;
      dBeta[j] += dyv;
      const dxh = dyv * gamma[j];
      sumDxhat += dxh;
      sumDxhatXhat += dxh * xh;
    }
    const mDxhat = sumDxhat / h;
    const mDxhatXhat = sumDxhatXhat / h;
    for (let j = 0; j < h; j++) {
      const dxh = dy[xi + j] * gamma[j];
      dx[xi + j] = rstd[i] * (dxh - mDxhat - xhat[xi + j] * mDxhatXhat);
    }
  }
}

interface LayerCache {
  x: F64;
  ln1: LayerNormCache;
  a: F64;
  q: F64;
  k: F64;
  v: F64;
  probs: F64[]; // per head [T,T]
  ctx: F64;
  x2: F64;
  ln2: LayerNormCache;
  b: F64;
  f1: F64;
  g: F64;
}

export interface ForwardCache {
  tokens: number[];
  T: number;
  layers: LayerCache[];
  lnF: LayerNormCache;
  xLast: F64;
  hFinal: F64;
}

export class Encoder {
  config: ModelConfig;
  params: ParamStore;

  constructor(config: ModelConfig, params?: ParamStore, initSeed = 1234) {
    if (config.hidden % config.heads !== 0) {
      throw new Error("hidden dimension must be divisible by attention heads");
    }
    this.config = config;
    if (params) {
      this.params = params;
      return;
    }
    this.params = new ParamStore();
    const rng = new Mulberry32(initSeed);
    const std = 0.02;
    const gauss = () => rng.nextGaussian() * std;
    const zero = () => 0;
    const one = () => 1;
    const p = this.params;
    const H = config.hidden;
    p.add("tok_emb", config.vocabSize, H, gauss);
    p.add("pos_emb", config.maxLen, H, gauss);
    for (let l = 0; l < config.layers; l++) {
      p.add(`l${l}.ln1.g`, 1, H, one);
      p.add(`l${l}.ln1.b`, 1, H, zero);
      for (const w of ["wq", "wk", "wv", "wo"]) {
        p.add(`l${l}.${w}`, H, H, gauss);
        p.add(`l${l}.${w}b`, 1, H, zero);
      }
      p.add(`l${l}.ln2.g`, 1, H, one);
      p.add(`l${l}.ln2.b`, 1, H, zero);
      p.add(`l${l}.w1`, H, config.ffn, gauss);
      p.add(`l${l}.b1`, 1, config.ffn, zero);
      p.add(`l${l}.w2`, config.ffn, H, gauss);
      p.add(`l${l}.b2`, 1, H, zero);
    }
    p.add("lnf.g", 1, H, one);
    p.add("lnf.b", 1, H, zero);
    this.addHead("lm", config.vocabSize, rng);
    this.addHead("dtype", config.dtypeClasses, rng);
    this.addHead("vtype", config.vtypeClasses, rng);
    this.addHead("bin", config.binClasses, rng);
    this.addHead("cov", 2, rng);
  }

  addHead(name: string, classes: number, rng?: Mulberry32): void {
    const r = rng ?? new Mulberry32(4321);
    const std = 0.02;
    this.params.add(`head.${name}.w`, this.config.hidden, classes, () => r.nextGaussian() * std);
    this.params.add(`head.${name}.b`, 1, classes, () => 0);
  }

  forward(tokens: number[]): ForwardCache {
    const { hidden: H, heads, layers } = this.config;
    const dk = H / heads;
    const scale = 1 / Math.sqrt(dk);
    const T = tokens.length;
    if (T > this.config.maxLen) {
      throw new Error(`sequence of ${T} tokens exceeds maxLen ${this.config.maxLen}`);
    }
    const p = this.params;
    const tokEmb = p.get("tok_emb");
    const posEmb = p.get("pos_emb");
    let x = new Float64Array(T * H);
    for (let t = 0; t < T; t++) {
      const e = tokens[t] * H;
      const q = t * H;
      for (let j = 0; j < H; j++) x[t * H + j] = tokEmb[e + j] + posEmb[q + j];
    }
    const layerCaches: LayerCache[] = [];
    for (let l = 0; l < layers; l++) {
      const a = new Float64Array(T * H);
      const ln1 = layerNormForward(x, p.get(`l${l}.ln1.g`), p.get(`l${l}.ln1.b`), T, H, a);
      const q = new Float64Array(T * H);
      const k = new Float64Array(T * H);
      const v = new Float64Array(T * H);
      matmul(a, p.get(`l${l}.wq`), T, H, H, q);
      addBiasRows(q, p.get(`l${l}.wqb`), T, H);
      matmul(a, p.get(`l${l}.wk`), T, H, H, k);
      addBiasRows(k, p.get(`l${l}.wkb`), T, H);
      matmul(a, p.get(`l${l}.wv`), T, H, H, v);
      addBiasRows(v, p.get(`l${l}.wvb`), T, H);

      const ctx = new Float64Array(T * H);
      const probs: F64[] = [];
      const dlim = dk - 3;
      for (let h = 0; h < heads; h++) {
        const off = h * dk;
        const scores = new Float64Array(T * T);
        for (let i = 0; i < T; i++) {
          const qi = i * H + off;
          for (let j = 0; j < T; j++) {
            const kj = j * H + off;
            let a0 = 0;
            let a1 = 0;
            let a2 = 0;
            let a3 = 0;
            let d = 0;
            for (; d < dlim; d += 4) {
              a0 += q[qi + d] * k[kj + d];
              a1 += q[qi + d + 1] * k[kj + d + 1];
              a2 += q[qi + d + 2] * k[kj + d + 2];
              a3 += q[qi + d + 3] * k[kj + d + 3];
            }
            let acc = a0 + a1 + a2 + a3;
            for (; d < dk; d++) acc += q[qi + d] * k[kj + d];
            scores[i * T + j] = acc * scale;
          }
        }
        // softmax rows in place
        for (let i = 0; i < T; i++) {
          const ri = i * T;
          let max = -Infinity;
          for (let j = 0; j < T; j++) if (scores[ri + j] > max) max = scores[ri + j];
          let sum = 0;
          for (let j = 0; j < T; j++) {
            const e = Math.exp(scores[ri + j] - max);
            scores[ri + j] = e;
            sum += e;
          }
          for (let j = 0; j < T; j++) scores[ri + j] /= sum;
        }
        probs.push(scores);
        for (let i = 0; i < T; i++) {
          const ri = i * T;
          const ci = i * H + off;
          for (let j = 0; j < T; j++) {
            const pv = scores[ri + j];
            const vj = j * H + off;
            let d = 0;
            for (; d < dlim; d += 4) {
              ctx[ci + d] += pv * v[vj + d];
              ctx[ci + d + 1] += pv * v[vj + d + 1];
              ctx[ci + d + 2] += pv * v[vj + d + 2];
              ctx[ci + d + 3] += pv * v[vj + d + 3];
            }
            for (; d < dk; d++) ctx[ci + d] += pv * v[vj + d];
          }
        }
      }
      const attnOut = new Float64Array(T * H);
      matmul(ctx, p.get(`l${l}.wo`), T, H, H, attnOut);
      addBiasRows(attnOut, p.get(`l${l}.wob`), T, H);
      const x2 = new Float64Array(T * H);
      for (let i = 0; i < T * H; i++) x2[i] = x[i] + attnOut[i];

      const b = new Float64Array(T * H);
      const ln2 = layerNormForward(x2, p.get(`l${l}.ln2.g`), p.get(`l${l}.ln2.b`), T, H, b);
      const f1 = new Float64Array(T * this.config.ffn);
      matmul(b, p.get(`l${l}.w1`), T, H, this.config.ffn, f1);
      addBiasRows(f1, p.get(`l${l}.b1`), T, this.config.ffn);
      const g = new Float64Array(T * this.config.ffn);
      for (let i = 0; i < g.length; i++) g[i] = gelu(f1[i]);
      const f2 = new Float64Array(T * H);
      matmul(g, p.get(`l${l}.w2`), T, this.config.ffn, H, f2);
      addBiasRows(f2, p.get(`l${l}.b2`), T, H);
      const x3 = new Float64Array(T * H);
      for (let i = 0; i < T * H; i++) x3[i] = x2[i] + f2[i];

      layerCaches.push({ x, ln1, a, q, k, v, probs, ctx, x2, ln2, b, f1, g });
      x = x3;
    }
    const hFinal = new Float64Array(T * H);
    const lnF = layerNormForward(x, p.get("lnf.g"), p.get("lnf.b"), T, H, hFinal);
    return { tokens, T, layers: layerCaches, lnF, xLast: x, hFinal };
  }

  /** Accumulate gradients for dL/dhFinal; returns nothing (grads live in the store). */
  backward(cache: ForwardCache, dHFinal: F64): void {
    const { hidden: H, heads, layers, ffn } = this.config;
    const dk = H / heads;
    const scale = 1 / Math.sqrt(dk);
    const T = cache.T;
    const p = this.params;

    let dx = new Float64Array(T * H);
    layerNormBackward(
      dHFinal, cache.lnF, p.get("lnf.g"), T, H,
      p.grad("lnf.g"), p.grad("lnf.b"), dx,
    );

    for (let l = layers - 1; l >= 0; l--) {
      const c = cache.layers[l];
      // dx currently holds dL/dx3
      const dx3 = dx;

      // FFN branch: x3 = x2 + f2(LN2(x2))
      const dG = new Float64Array(T * ffn);
      matmulBT(dx3, p.get(`l${l}.w2`), T, H, ffn, dG);
      matmulATAccum(c.g, dx3, T, ffn, H, p.grad(`l${l}.w2`));
      colSumAccum(dx3, T, H, p.grad(`l${l}.b2`));
      const dF1 = dG;
      for (let i = 0; i < dF1.length; i++) dF1[i] = dG[i] * geluGrad(c.f1[i]);
      const dB = new Float64Array(T * H);
      matmulBT(dF1, p.get(`l${l}.w1`), T, ffn, H, dB);
      matmulATAccum(c.b, dF1, T, H, ffn, p.grad(`l${l}.w1`));
      colSumAccum(dF1, T, ffn, p.grad(`l${l}.b1`));
      const dx2 = new Float64Array(T * H);
      layerNormBackward(dB, c.ln2, p.get(`l${l}.ln2.g`), T, H,
        p.grad(`l${l}.ln2.g`), p.grad(`l${l}.ln2.b`), dx2);
      for (let i = 0; i < T * H; i++) dx2[i] += dx3[i];

      // attention branch: x2 = x + attn(LN1(x))
      const dCtx = new Float64Array(T * H);
      matmulBT(dx2, p.get(`l${l}.wo`), T, H, H, dCtx);
      matmulATAccum(c.ctx, dx2, T, H, H, p.grad(`l${l}.wo`));
      colSumAccum(dx2, T, H, p.grad(`l${l}.wob`));

      const dQ = new Float64Array(T * H);
      const dK = new Float64Array(T * H);
      const dV = new Float64Array(T * H);
      const dlim = dk - 3;
      for (let h = 0; h < heads; h++) {
        const off = h * dk;
        const probs = c.probs[h];
        // dProbs:[T,T], dV
        const dProbs = new Float64Array(T * T);
        for (let i = 0; i < T; i++) {
          const ci = i * H + off;
          for (let j = 0; j < T; j++) {
            const vj = j * H + off;
            const pv = probs[i * T + j];
            let a0 = 0;
            let a1 = 0;
            let a2 = 0;
            let a3 = 0;
            let d = 0;
            for (; d < dlim; d += 4) {
              const c0 = dCtx[ci + d];
              const c1 = dCtx[ci + d + 1];
              const c2 = dCtx[ci + d + 2];
              const c3 = dCtx[ci + d + 3];
              a0 += c0 * c.v[vj + d];
              a1 += c1 * c.v[vj + d + 1];
              a2 += c2 * c.v[vj + d + 2];
              a3 += c3 * c.v[vj + d + 3];
              dV[vj + d] += pv * c0;
              dV[vj + d + 1] += pv * c1;
              dV[vj + d + 2] += pv * c2;
              dV[vj + d + 3] += pv * c3;
            }
            let acc = a0 + a1 + a2 + a3;
            for (; d < dk; d++) {
              const cd = dCtx[ci + d];
              acc += cd * c.v[vj + d];
              dV[vj + d] += pv * cd;
            }
            dProbs[i * T + j] = acc;
          }
        }
        // softmax backward -> dScores (reuse dProbs buffer)
        for (let i = 0; i < T; i++) {
          const ri = i * T;
          let dot = 0;
          for (let j = 0; j < T; j++) dot += dProbs[ri + j] * probs[ri + j];
          for (let j = 0; j < T; j++) {
            dProbs[ri + j] = probs[ri + j] * (dProbs[ri + j] - dot) * scale;
          }
        }
        // dQ_h = dScores . K_h ; dK_h = dScores^T . Q_h
        for (let i = 0; i < T; i++) {
          const ri = i * T;
          const qi = i * H + off;
          for (let j = 0; j < T; j++) {
            const ds = dProbs[ri + j];
            if (ds === 0) continue;
            const kj = j * H + off;
            let d = 0;
            for (; d < dlim; d += 4) {
              dQ[qi + d] += ds * c.k[kj + d];
              dQ[qi + d + 1] += ds * c.k[kj + d + 1];
              dQ[qi + d + 2] += ds * c.k[kj + d + 2];
              dQ[qi + d + 3] += ds * c.k[kj + d + 3];
              dK[kj + d] += ds * c.q[qi + d];
              dK[kj + d + 1] += ds * c.q[qi + d + 1];
              dK[kj + d + 2] += ds * c.q[qi + d + 2];
              dK[kj + d + 3] += ds * c.q[qi + d + 3];
            }
            for (; d < dk; d++) {
              dQ[qi + d] += ds * c.k[kj + d];
              dK[kj + d] += ds * c.q[qi + d];
            }
          }
        }
      }
      const dA = new Float64Array(T * H);
      const tmp = new Float64Array(T * H);
      matmulBT(dQ, p.get(`l${l}.wq`), T, H, H, tmp);
      for (let i = 0; i < T * H; i++) dA[i] += tmp[i];
      matmulATAccum(c.a, dQ, T, H, H, p.grad(`l${l}.wq`));
      colSumAccum(dQ, T, H, p.grad(`l${l}.wqb`));
      matmulBT(dK, p.get(`l${l}.wk`), T, H, H, tmp);
      for (let i = 0; i < T * H; i++) dA[i] += tmp[i];
      matmulATAccum(c.a, dK, T, H, H, p.grad(`l${l}.wk`));
      colSumAccum(dK, T, H, p.grad(`l${l}.wkb`));
      matmulBT(dV, p.get(`l${l}.wv`), T, H, H, tmp);
      for (let i = 0; i < T * H; i++) dA[i] += tmp[i];
      matmulATAccum(c.a, dV, T, H, H, p.grad(`l${l}.wv`));
      colSumAccum(dV, T, H, p.grad(`l${l}.wvb`));

      const dxAttn = new Float64Array(T * H);
      layerNormBackward(dA, c.ln1, p.get(`l${l}.ln1.g`), T, H,
        p.grad(`l${l}.ln1.g`), p.grad(`l${l}.ln1.b`), dxAttn);
      dx = new Float64Array(T * H);
      for (let i = 0; i < T * H; i++) dx[i] = dx2[i] + dxAttn[i];
    }

    // embeddings
    const dTok = p.grad("tok_emb");
    const dPos = p.grad("pos_emb");
    for (let t = 0; t < T; t++) {
      const e = cache.tokens[t] * H;
      const q = t * H;
      const xi = t * H;
      for (let j = 0; j < H; j++) {
        dTok[e + j] += dx[xi + j];
        dPos[q + j] += dx[xi + j];
      }
    }
  }
}
