/**
 * Cross-package integration: datasets come from the Python toolkit's CLI,
 * predictions go back through its `eval` command.
 */

import assert from "node:assert/strict";
import { execFileSync } from "node:child_process";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";
import { test } from "node:test";

import { loadDataset, loadTaxonomy, loadVocabSize, mlmPositions } from "../src/data.js";
import { Encoder } from "../src/model.js";
import {
  DEFAULT_TRAIN,
  branchAccuracy,
  defaultConfig,
  evaluate,
  finetuneBranch,
  finetuneValue,
  maxSequenceLength,
  writePredictions,
} from "../src/train.js";

function python(args: string[], cwd?: string): string {
  return execFileSync("python3", args, { encoding: "utf-8", cwd });
}

function buildSmallDataset(dir: string): void {
  const corpus = path.join(dir, "corpus");
  python(["-m", "tracekit", "gen-corpus", "--seed", "21", "--problems", "8",
    "--variants", "2", "-o", corpus]);
  python(["-m", "tracekit", "build-dataset", "--corpus", corpus, "--split", "0.75",
    "--seed", "2", "--cap", "2", "-o", dir]);
}

const WORK = fs.mkdtempSync(path.join(os.tmpdir(), "trainer-integration-"));
buildSmallDataset(WORK);

test("MLM mask positions replayed here match the dataset builder's", () => {
  const trainPath = path.join(WORK, "train.jsonl");
  const records = loadDataset(trainPath);
  const script = [
    "import json, sys",
    "from tracekit.assemble import AssembledSequence, mask_for_mlm",
    "rows = []",
    "for line in open(sys.argv[1]):",
    "    rec = json.loads(line)",
    "    seq = AssembledSequence(token_ids=rec['token_ids'], region_tags=rec['region_tags'],",
    "                            alignment={}, dtype_ids=[], vtype_ids=[], bin_ids=[], cov_ids=[])",
    "    _, targets = mask_for_mlm(seq, 0.15, rec['mlm_seed'])",
    "    rows.append(sorted(targets))",
    "print(json.dumps(rows))",
  ].join("\n");
  const reference: number[][] = JSON.parse(python(["-c", script, trainPath]));
  assert.equal(reference.length, records.length);
  records.forEach((record, i) => {
    assert.deepEqual(mlmPositions(record, 0.15), reference[i], `record ${i}`);
  });
});

test("memorization model scores full_path_acc 1.0 through the eval CLI", { timeout: 600_000 }, () => {
  const trainPath = path.join(WORK, "train.jsonl");
  const records = loadDataset(trainPath);
  const taxonomy = loadTaxonomy(path.join(WORK, "taxonomy.json"));
  const vocabSize = loadVocabSize(path.join(WORK, "vocab.json"));
  const cfg = {
    ...defaultConfig(vocabSize, taxonomy, maxSequenceLength(records)),
    hidden: 48,
    ffn: 96,
  };

  // train-to-memorize on the training split itself
  const branchEncoder = new Encoder(cfg, undefined, 3);
  const ftCfg = { ...DEFAULT_TRAIN, lr: 1e-3, batchSize: 2, seed: 5 };
  let memorized = false;
  for (let round = 0; round < 10 && !memorized; round++) {
    finetuneBranch(branchEncoder, records, { ...ftCfg, epochs: 15 });
    memorized = branchAccuracy(branchEncoder, records).accuracy === 1;
  }
  assert.ok(memorized, "branch head failed to memorize its own training split");

  const valueEncoder = new Encoder(cfg, undefined, 4);
  finetuneValue(valueEncoder, records, { ...ftCfg, epochs: 10 });

  const predPath = path.join(WORK, "pred.jsonl");
  writePredictions(evaluate(branchEncoder, valueEncoder, records), predPath);

  const report = JSON.parse(
    python(["-m", "tracekit", "eval", "--pred", predPath, "--truth", trainPath]),
  );
  console.log(`[integration] eval report: ${JSON.stringify(report)}`);
  assert.equal(report.full_path_acc, 1.0);
  assert.ok(report.value_acc > 0);
});

test("prediction rows align one-to-one with the heldout file", () => {
  const heldout = loadDataset(path.join(WORK, "heldout.jsonl"));
  const taxonomy = loadTaxonomy(path.join(WORK, "taxonomy.json"));
  const vocabSize = loadVocabSize(path.join(WORK, "vocab.json"));
  const cfg = {
    ...defaultConfig(vocabSize, taxonomy, maxSequenceLength(heldout)),
    hidden: 16,
    ffn: 32,
  };
  const enc = new Encoder(cfg, undefined, 9);
  enc.addHead("branch", 2);
  enc.addHead("value", 30);
  const rows = evaluate(enc, enc, heldout);
  assert.equal(rows.length, heldout.length);
});
