/** Linear heads at selected positions with softmax cross-entropy. */

import { F64 } from "./tensor.js";
import { Encoder, ForwardCache } from "./model.js";

export interface HeadEval {
  loss: number; // mean CE over the positions, already scaled by coeff
  count: number;
  correct: number;
  predictions: number[];
}

/**
 * Apply head `name` at `positions` of the encoded sequence; accumulate
 * parameter gradients and dL/dhFinal into `dHFinal` when training.
 * The per-position CE mean is multiplied by `coeff` (loss and gradients).
 */
export function headLoss(
  encoder: Encoder,
  cache: ForwardCache,
  name: string,
  classes: number,
  positions: number[],
  targets: number[],
  coeff: number,
  dHFinal: F64 | null,
): HeadEval {
  const n = positions.length;
  if (n === 0) return { loss: 0, count: 0, correct: 0, predictions: [] };
  const H = encoder.config.hidden;
  const p = encoder.params;
  const W = p.get(`head.${name}.w`);
  const b = p.get(`head.${name}.b`);
  const logits = new Float64Array(classes);
  const predictions: number[] = [];
  let totalLoss = 0;
  let correct = 0;
  const training = dHFinal !== null && coeff !== 0;
  const dW = training ? p.grad(`head.${name}.w`) : null;
  const dB = training ? p.grad(`head.${name}.b`) : null;
  for (let i = 0; i < n; i++) {
    const pos = positions[i];
    const hOff = pos * H;
    for (let c = 0; c < classes; c++) {
      let acc = b[c];
      for (let j = 0; j < H; j++) acc += cache.hFinal[hOff + j] * W[j * classes + c];
      logits[c] = acc;
    }
    let max = -Infinity;
    let argmax = 0;
    for (let c = 0; c < classes; c++) {
      if (logits[c] > max) {
        max = logits[c];
        argmax = c;
      }
    }
    predictions.push(argmax);
    let sum = 0;
    for (let c = 0; c < classes; c++) sum += Math.exp(logits[c] - max);
    const logZ = max + Math.log(sum);
    const target = targets[i];
    totalLoss += logZ - logits[target];
    if (argmax === target) correct++;
    if (training && dW && dB && dHFinal) {
      const fac = coeff / n;
      for (let c = 0; c < classes; c++) {
        const prob = Math.exp(logits[c] - logZ);
        const dlogit = (prob - (c === target ? 1 : 0)) * fac;
        if (dlogit === 0) continue;
        dB[c] += dlogit;
        for (let j = 0; j < H; j++) {
          dW[j * classes + c] += cache.hFinal[hOff + j] * dlogit;
          dHFinal[hOff + j] += W[j * classes + c] * dlogit;
        }
      }
    }
  }
  return { loss: (coeff * totalLoss) / n, count: n, correct, predictions };
}

/** Inference-only head application at positions. */
export function headPredict(
  encoder: Encoder,
  cache: ForwardCache,
  name: string,
  classes: number,
  positions: number[],
): number[] {
  const dummyTargets = positions.map(() => 0);
  return headLoss(encoder, cache, name, classes, positions, dummyTargets, 0, null).predictions;
}
