/**
 * Dataset JSONL loading plus the on-the-fly MLM view.
 *
 * Mask positions are re-derived from the stored per-record seed with the
 * same portable PRNG and candidate rule the dataset builder used: code
 * region only, special ids excluded, floor(rate * |code region|) picks.
 */

import * as crypto from "node:crypto";
import * as fs from "node:fs";
import * as path from "node:path";
import { samplePositions } from "./rng.js";

export const REGION_CODE = 3;
export const MASK_ID = 2;
export const PAD_ID = 3;

export interface DatasetRecord {
  problemId: string;
  tokenIds: number[];
  regionTags: number[];
  dtype: number[];
  vtype: number[];
  bin: number[];
  cov: number[];
  mlmSeed: number;
  branchMaskPositions: number[];
  branchTaken: boolean[];
  occTokenSpans: [number, number][];
}

export function loadDataset(path: string): DatasetRecord[] {
  const rows = fs
    .readFileSync(path, "utf-8")
    .split("\n")
    .filter((line) => line.trim().length > 0);
  return rows.map((line, idx) => {
    const raw = JSON.parse(line);
    for (const key of [
      "problem_id", "token_ids", "region_tags", "labels", "mlm_seed",
      "branch_mask_positions", "branch_taken", "occ_token_spans",
    ]) {
      if (!(key in raw)) throw new Error(`record ${idx}: missing field ${key}`);
    }
    return {
      problemId: raw.problem_id,
      tokenIds: raw.token_ids,
      regionTags: raw.region_tags,
      dtype: raw.labels.dtype,
      vtype: raw.labels.vtype,
      bin: raw.labels.bin,
      cov: raw.labels.cov,
      mlmSeed: raw.mlm_seed,
      branchMaskPositions: raw.branch_mask_positions,
      branchTaken: raw.branch_taken.map((b: unknown) => Boolean(b)),
      occTokenSpans: raw.occ_token_spans,
    };
  });
}

export interface Taxonomy {
  binClasses: number;
  dtypeClasses: number;
  vtypeClasses: number;
  nullId: number;
}

export function loadTaxonomy(path: string): Taxonomy {
  const raw = JSON.parse(fs.readFileSync(path, "utf-8"));
  const binClasses = Object.keys(raw.bins).length;
  if (binClasses !== 30) {
    throw new Error(`taxonomy has ${binClasses} bins, expected 30`);
  }
  return {
    binClasses,
    dtypeClasses: Object.keys(raw.data_types).length,
    vtypeClasses: Object.keys(raw.value_types).length,
    nullId: raw.null_id,
  };
}

export function loadVocabSize(path: string): number {
  const raw = JSON.parse(fs.readFileSync(path, "utf-8"));
  return raw.tokens.length;
}

/** When a build manifest sits next to the taxonomy file, its recorded hash
 * must match the file we are about to train against. */
export function verifyTaxonomyHash(taxonomyPath: string): void {
  const manifestPath = path.join(path.dirname(taxonomyPath), "manifest.json");
  if (!fs.existsSync(manifestPath)) return;
  const manifest = JSON.parse(fs.readFileSync(manifestPath, "utf-8"));
  if (!manifest.taxonomy_hash) return;
  const digest = crypto
    .createHash("sha256")
    .update(fs.readFileSync(taxonomyPath))
    .digest("hex");
  if (digest !== manifest.taxonomy_hash) {
    throw new Error(
      `taxonomy hash mismatch: manifest says ${manifest.taxonomy_hash}, file is ${digest}`,
    );
  }
}

export function mlmPositions(record: DatasetRecord, rate: number): number[] {
  const codePositions: number[] = [];
  const candidates: number[] = [];
  for (let i = 0; i < record.tokenIds.length; i++) {
    if (record.regionTags[i] === REGION_CODE) {
      codePositions.push(i);
      if (record.tokenIds[i] > PAD_ID) candidates.push(i);
    }
  }
  const count = Math.min(Math.floor(rate * codePositions.length), candidates.length);
  return samplePositions(candidates.length, count, record.mlmSeed).map((i) => candidates[i]);
}

export interface MlmView {
  inputTokens: number[];
  positions: number[];
  targets: number[];
}

export function mlmView(record: DatasetRecord, rate: number): MlmView {
  const positions = mlmPositions(record, rate);
  const inputTokens = record.tokenIds.slice();
  const targets: number[] = [];
  for (const pos of positions) {
    targets.push(inputTokens[pos]);
    inputTokens[pos] = MASK_ID;
  }
  return { inputTokens, positions, targets };
}

/** Positions carrying variable labels (label arrays hold -1 elsewhere). */
export function labeledPositions(record: DatasetRecord): number[] {
  const out: number[] = [];
  for (let i = 0; i < record.bin.length; i++) {
    if (record.bin[i] >= 0) out.push(i);
  }
  return out;
}
