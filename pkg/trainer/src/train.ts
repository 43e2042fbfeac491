/**
 * Training loops: joint pre-training (masked token reconstruction +
 * program-state prediction + variable-coverage prediction), task-specific
 * fine-tuning for branch coverage and quantized values, and evaluation to
 * the predictions JSONL the dataset toolkit's `eval` command consumes.
 */

import * as fs from "node:fs";
import * as path from "node:path";
import { Adam } from "./adam.js";
import {
  DatasetRecord,
  Taxonomy,
  labeledPositions,
  mlmView,
} from "./data.js";
import { headLoss, headPredict } from "./loss.js";
import { Encoder, ModelConfig, ParamStore } from "./model.js";
import { Mulberry32 } from "./rng.js";

export interface TrainConfig {
  epochs: number;
  lr: number;
  seed: number;
  batchSize: number;
  maskRate: number;
  coeffMlm: number;
  coeffPsp: number;
  coeffVcp: number;
  logEvery: number;
}

export const DEFAULT_TRAIN: TrainConfig = {
  epochs: 10,
  lr: 5e-5,
  seed: 1,
  batchSize: 8,
  maskRate: 0.15,
  coeffMlm: 1,
  coeffPsp: 1,
  coeffVcp: 1,
  logEvery: 1,
};

export interface StepLog {
  joint: number;
  mlm: number;
  psp: number;
  vcp: number;
}

export function defaultConfig(vocabSize: number, taxonomy: Taxonomy, maxLen: number): ModelConfig {
  return {
    layers: 2,
    heads: 4,
    hidden: 128,
    ffn: 512,
    maxLen,
    vocabSize,
    dtypeClasses: taxonomy.dtypeClasses,
    vtypeClasses: taxonomy.vtypeClasses,
    binClasses: taxonomy.binClasses,
  };
}

export function maxSequenceLength(records: DatasetRecord[]): number {
  let max = 0;
  for (const r of records) max = Math.max(max, r.tokenIds.length);
  return max;
}

function checkFinite(log: StepLog, context: string): void {
  for (const [key, value] of Object.entries(log)) {
    if (!Number.isFinite(value)) {
      throw new Error(`non-finite ${key} loss (${value}) at ${context}`);
    }
  }
}

/**
 * One pre-training sample: single forward pass, three losses on the shared
 * representation. Returns the per-component (coefficient-weighted) means.
 */
export function pretrainSample(
  encoder: Encoder,
  record: DatasetRecord,
  cfg: TrainConfig,
  train: boolean,
): StepLog {
  const view = mlmView(record, cfg.maskRate);
  const cache = encoder.forward(view.inputTokens);
  const dH = train ? new Float64Array(cache.hFinal.length) : null;
  const mlm = headLoss(
    encoder, cache, "lm", encoder.config.vocabSize,
    view.positions, view.targets, cfg.coeffMlm, dH,
  );
  const varPositions = labeledPositions(record);
  const dtype = headLoss(
    encoder, cache, "dtype", encoder.config.dtypeClasses,
    varPositions, varPositions.map((p) => record.dtype[p]), cfg.coeffPsp, dH,
  );
  const vtype = headLoss(
    encoder, cache, "vtype", encoder.config.vtypeClasses,
    varPositions, varPositions.map((p) => record.vtype[p]), cfg.coeffPsp, dH,
  );
  const bin = headLoss(
    encoder, cache, "bin", encoder.config.binClasses,
    varPositions, varPositions.map((p) => record.bin[p]), cfg.coeffPsp, dH,
  );
  const cov = headLoss(
    encoder, cache, "cov", 2,
    varPositions, varPositions.map((p) => record.cov[p]), cfg.coeffVcp, dH,
  );
  if (train && dH) encoder.backward(cache, dH);
  const psp = dtype.loss + vtype.loss + bin.loss;
  const log = { joint: mlm.loss + psp + cov.loss, mlm: mlm.loss, psp, vcp: cov.loss };
  checkFinite(log, record.problemId);
  return log;
}

export interface EpochLog {
  epoch: number;
  steps: StepLog[];
  mean: StepLog;
}

export function pretrain(
  encoder: Encoder,
  records: DatasetRecord[],
  cfg: TrainConfig,
  onEpoch?: (log: EpochLog) => void,
): EpochLog[] {
  const order = records.map((_, i) => i);
  const rng = new Mulberry32(cfg.seed);
  const stepsPerEpoch = Math.ceil(records.length / cfg.batchSize);
  const adam = new Adam(cfg.lr, cfg.epochs * stepsPerEpoch);
  const logs: EpochLog[] = [];
  for (let epoch = 0; epoch < cfg.epochs; epoch++) {
    rng.shuffle(order);
    const steps: StepLog[] = [];
    let inBatch = 0;
    let batchLog = { joint: 0, mlm: 0, psp: 0, vcp: 0 };
    for (let i = 0; i < order.length; i++) {
      const log = pretrainSample(encoder, records[order[i]], cfg, true);
      batchLog = {
        joint: batchLog.joint + log.joint,
        mlm: batchLog.mlm + log.mlm,
        psp: batchLog.psp + log.psp,
        vcp: batchLog.vcp + log.vcp,
      };
      inBatch++;
      if (inBatch === cfg.batchSize || i === order.length - 1) {
        adam.update(encoder.params);
        steps.push({
          joint: batchLog.joint / inBatch,
          mlm: batchLog.mlm / inBatch,
          psp: batchLog.psp / inBatch,
          vcp: batchLog.vcp / inBatch,
        });
        inBatch = 0;
        batchLog = { joint: 0, mlm: 0, psp: 0, vcp: 0 };
      }
    }
    const mean = {
      joint: steps.reduce((a, s) => a + s.joint, 0) / steps.length,
      mlm: steps.reduce((a, s) => a + s.mlm, 0) / steps.length,
      psp: steps.reduce((a, s) => a + s.psp, 0) / steps.length,
      vcp: steps.reduce((a, s) => a + s.vcp, 0) / steps.length,
    };
    const log = { epoch, steps, mean };
    logs.push(log);
    if (onEpoch) onEpoch(log);
  }
  return logs;
}

// -- fine-tuning ------------------------------------------------------------

function finetuneHead(
  encoder: Encoder,
  records: DatasetRecord[],
  cfg: TrainConfig,
  headName: string,
  classes: number,
  positionsOf: (r: DatasetRecord) => number[],
  targetsOf: (r: DatasetRecord) => number[],
  onEpoch?: (epoch: number, loss: number) => void,
): void {
  if (!encoder.params.has(`head.${headName}.w`)) {
    encoder.addHead(headName, classes, new Mulberry32(cfg.seed + 77));
  }
  const order = records.map((_, i) => i);
  const rng = new Mulberry32(cfg.seed);
  const stepsPerEpoch = Math.ceil(records.length / cfg.batchSize);
  const adam = new Adam(cfg.lr, cfg.epochs * stepsPerEpoch);
  for (let epoch = 0; epoch < cfg.epochs; epoch++) {
    rng.shuffle(order);
    let total = 0;
    let count = 0;
    let inBatch = 0;
    for (let i = 0; i < order.length; i++) {
      const record = records[order[i]];
      const positions = positionsOf(record);
      if (positions.length > 0) {
        const cache = encoder.forward(record.tokenIds);
        const dH = new Float64Array(cache.hFinal.length);
        const res = headLoss(encoder, cache, headName, classes, positions, targetsOf(record), 1, dH);
        encoder.backward(cache, dH);
        if (!Number.isFinite(res.loss)) {
          throw new Error(`non-finite fine-tune loss at ${record.problemId}`);
        }
        total += res.loss;
        count++;
      }
      inBatch++;
      if (inBatch === cfg.batchSize || i === order.length - 1) {
        adam.update(encoder.params);
        inBatch = 0;
      }
    }
    if (onEpoch) onEpoch(epoch, count ? total / count : 0);
  }
}

export function finetuneBranch(
  encoder: Encoder,
  records: DatasetRecord[],
  cfg: TrainConfig,
  onEpoch?: (epoch: number, loss: number) => void,
): void {
  const withMasks = records.filter((r) => r.branchMaskPositions.length > 0);
  if (withMasks.length === 0) {
    throw new Error("no records carry branch mask positions");
  }
  finetuneHead(
    encoder, records, cfg, "branch", 2,
    (r) => r.branchMaskPositions,
    (r) => r.branchTaken.map((t) => (t ? 1 : 0)),
    onEpoch,
  );
}

export function finetuneValue(
  encoder: Encoder,
  records: DatasetRecord[],
  cfg: TrainConfig,
  onEpoch?: (epoch: number, loss: number) => void,
): void {
  finetuneHead(
    encoder, records, cfg, "value", encoder.config.binClasses,
    (r) => labeledPositions(r),
    (r) => labeledPositions(r).map((p) => r.bin[p]),
    onEpoch,
  );
}

// -- prediction & evaluation --------------------------------------------------

export function predictBranches(encoder: Encoder, record: DatasetRecord): boolean[] {
  if (record.branchMaskPositions.length === 0) return [];
  const cache = encoder.forward(record.tokenIds);
  const preds = headPredict(encoder, cache, "branch", 2, record.branchMaskPositions);
  return preds.map((c) => c === 1);
}

export function predictValues(encoder: Encoder, record: DatasetRecord): number[] {
  if (record.occTokenSpans.length === 0) return [];
  const cache = encoder.forward(record.tokenIds);
  // per-occurrence prediction comes from the occurrence's first sub-token
  const positions = record.occTokenSpans.map(([start]) => start);
  return headPredict(encoder, cache, "value", encoder.config.binClasses, positions);
}

export interface PredictionRow {
  problem_id: string;
  branch_pred: boolean[];
  value_pred: number[];
}

export function evaluate(
  branchEncoder: Encoder,
  valueEncoder: Encoder,
  records: DatasetRecord[],
): PredictionRow[] {
  return records.map((record) => ({
    problem_id: record.problemId,
    branch_pred: predictBranches(branchEncoder, record),
    value_pred: predictValues(valueEncoder, record),
  }));
}

export function writePredictions(rows: PredictionRow[], outPath: string): void {
  const text = rows.map((r) => JSON.stringify(r)).join("\n") + "\n";
  atomicWrite(outPath, text);
}

// -- accuracy probes ----------------------------------------------------------

export function mlmAccuracy(encoder: Encoder, records: DatasetRecord[], rate: number): number {
  let correct = 0;
  let total = 0;
  for (const record of records) {
    const view = mlmView(record, rate);
    if (view.positions.length === 0) continue;
    const cache = encoder.forward(view.inputTokens);
    const preds = headPredict(encoder, cache, "lm", encoder.config.vocabSize, view.positions);
    for (let i = 0; i < preds.length; i++) {
      if (preds[i] === view.targets[i]) correct++;
      total++;
    }
  }
  return total ? correct / total : 0;
}

export function stateAccuracies(
  encoder: Encoder,
  records: DatasetRecord[],
): { bin: number; cov: number } {
  let binCorrect = 0;
  let covCorrect = 0;
  let total = 0;
  for (const record of records) {
    const positions = labeledPositions(record);
    if (positions.length === 0) continue;
    const cache = encoder.forward(record.tokenIds);
    const binPred = headPredict(encoder, cache, "bin", encoder.config.binClasses, positions);
    const covPred = headPredict(encoder, cache, "cov", 2, positions);
    for (let i = 0; i < positions.length; i++) {
      if (binPred[i] === record.bin[positions[i]]) binCorrect++;
      if (covPred[i] === record.cov[positions[i]]) covCorrect++;
      total++;
    }
  }
  return { bin: total ? binCorrect / total : 0, cov: total ? covCorrect / total : 0 };
}

export function branchAccuracy(
  encoder: Encoder,
  records: DatasetRecord[],
): { accuracy: number; total: number; majority: number } {
  let correct = 0;
  let total = 0;
  let takenCount = 0;
  for (const record of records) {
    const preds = predictBranches(encoder, record);
    for (let i = 0; i < preds.length; i++) {
      if (preds[i] === record.branchTaken[i]) correct++;
      if (record.branchTaken[i]) takenCount++;
      total++;
    }
  }
  const majority = total ? Math.max(takenCount, total - takenCount) / total : 0;
  return { accuracy: total ? correct / total : 0, total, majority };
}

// -- checkpoints ---------------------------------------------------------------

export function atomicWrite(outPath: string, text: string): void {
  const tmp = path.join(
    path.dirname(outPath),
    `.${path.basename(outPath)}.tmp-${process.pid}`,
  );
  fs.writeFileSync(tmp, text);
  fs.renameSync(tmp, outPath);
}

export function saveCheckpoint(encoder: Encoder, outPath: string): void {
  const params: Record<string, number[]> = {};
  for (const name of encoder.params.names()) {
    params[name] = Array.from(encoder.params.get(name));
  }
  atomicWrite(outPath, JSON.stringify({ config: encoder.config, params }));
}

export function loadCheckpoint(filePath: string): Encoder {
  const raw = JSON.parse(fs.readFileSync(filePath, "utf-8"));
  const config = raw.config as ModelConfig;
  const store = new ParamStore();
  const reference = new Encoder(config);
  for (const name of reference.params.names()) {
    if (!(name in raw.params)) throw new Error(`checkpoint missing parameter ${name}`);
  }
  for (const [name, values] of Object.entries(raw.params as Record<string, number[]>)) {
    const shape = reference.params.shapes.get(name) ?? [1, values.length];
    store.add(name, shape[0], shape[1], (i) => values[i]);
  }
  return new Encoder(config, store);
}
