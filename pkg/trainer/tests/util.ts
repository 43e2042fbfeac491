import { DatasetRecord } from "../src/data.js";
import { Encoder, ModelConfig } from "../src/model.js";
import { Mulberry32 } from "../src/rng.js";

/** Synthetic record shaped like the dataset builder's output: [CLS] E [SEP]
 * [SEP] C [SEP] with label arrays on a few code positions. */
export function syntheticRecord(seed: number, codeLen = 12, inputLen = 3): DatasetRecord {
  const rng = new Mulberry32(seed);
  const tokenIds: number[] = [0];
  const regionTags: number[] = [0];
  for (let i = 0; i < inputLen; i++) {
    tokenIds.push(5 + rng.nextBelow(15));
    regionTags.push(1);
  }
  tokenIds.push(1, 1);
  regionTags.push(2, 2);
  const branchMaskPositions: number[] = [];
  for (let i = 0; i < codeLen; i++) {
    if (i === 4) {
      tokenIds.push(2); // branch marker
      branchMaskPositions.push(tokenIds.length - 1);
    } else {
      tokenIds.push(5 + rng.nextBelow(15));
    }
    regionTags.push(3);
  }
  tokenIds.push(1);
  regionTags.push(2);
  const n = tokenIds.length;
  const dtype = new Array(n).fill(-1);
  const vtype = new Array(n).fill(-1);
  const bin = new Array(n).fill(-1);
  const cov = new Array(n).fill(-1);
  const occTokenSpans: [number, number][] = [];
  const codeStart = 1 + inputLen + 2;
  for (const occ of [1, 6, 9]) {
    const pos = codeStart + occ;
    dtype[pos] = rng.nextBelow(4);
    vtype[pos] = rng.nextBelow(7);
    bin[pos] = rng.nextBelow(30);
    cov[pos] = rng.nextBelow(2);
    occTokenSpans.push([pos, pos + 1]);
  }
  return {
    problemId: `synthetic-${seed}`,
    tokenIds,
    regionTags,
    dtype,
    vtype,
    bin,
    cov,
    mlmSeed: seed,
    branchMaskPositions,
    branchTaken: branchMaskPositions.map(() => rng.nextBelow(2) === 1),
    occTokenSpans,
  };
}

export function tinyConfig(vocabSize = 24): ModelConfig {
  return {
    layers: 1,
    heads: 2,
    hidden: 8,
    ffn: 16,
    maxLen: 64,
    vocabSize,
    dtypeClasses: 4,
    vtypeClasses: 7,
    binClasses: 30,
  };
}

export function tinyEncoder(seed = 5): Encoder {
  return new Encoder(tinyConfig(), undefined, seed);
}
