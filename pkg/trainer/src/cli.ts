/** Command line: pretrain, finetune-branch, finetune-value, evaluate. */

import { loadDataset, loadTaxonomy, loadVocabSize, verifyTaxonomyHash } from "./data.js";
import { Encoder } from "./model.js";
import {
  DEFAULT_TRAIN,
  TrainConfig,
  defaultConfig,
  evaluate,
  finetuneBranch,
  finetuneValue,
  loadCheckpoint,
  maxSequenceLength,
  pretrain,
  saveCheckpoint,
  writePredictions,
} from "./train.js";

function parseFlags(argv: string[]): Map<string, string> {
  const flags = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i];
    if (!key.startsWith("--") || i + 1 >= argv.length) {
      throw new Error(`malformed flag pair near ${key}`);
    }
    flags.set(key.slice(2), argv[i + 1]);
  }
  return flags;
}

function need(flags: Map<string, string>, key: string): string {
  const value = flags.get(key);
  if (value === undefined) throw new Error(`missing required flag --${key}`);
  return value;
}

function num(flags: Map<string, string>, key: string, fallback: number): number {
  const value = flags.get(key);
  return value === undefined ? fallback : Number(value);
}

function trainConfig(flags: Map<string, string>, lrDefault: number): TrainConfig {
  return {
    ...DEFAULT_TRAIN,
    epochs: num(flags, "epochs", DEFAULT_TRAIN.epochs),
    lr: num(flags, "lr", lrDefault),
    seed: num(flags, "seed", DEFAULT_TRAIN.seed),
    batchSize: num(flags, "batch-size", DEFAULT_TRAIN.batchSize),
    maskRate: num(flags, "mask-rate", DEFAULT_TRAIN.maskRate),
    coeffMlm: num(flags, "coeff-mlm", 1),
    coeffPsp: num(flags, "coeff-psp", 1),
    coeffVcp: num(flags, "coeff-vcp", 1),
  };
}

function cmdPretrain(flags: Map<string, string>): void {
  const records = loadDataset(need(flags, "train"));
  const taxonomyPath = need(flags, "taxonomy");
  verifyTaxonomyHash(taxonomyPath);
  const taxonomy = loadTaxonomy(taxonomyPath);
  const vocabSize = loadVocabSize(need(flags, "vocab"));
  const cfg = trainConfig(flags, 5e-5);
  const maxLen = Math.max(num(flags, "max-len", 0), maxSequenceLength(records));
  const modelCfg = {
    ...defaultConfig(vocabSize, taxonomy, maxLen),
    layers: num(flags, "layers", 2),
    heads: num(flags, "heads", 4),
    hidden: num(flags, "hidden", 128),
    ffn: num(flags, "ffn", 0) || num(flags, "hidden", 128) * 4,
  };
  const encoder = new Encoder(modelCfg, undefined, cfg.seed);
  pretrain(encoder, records, cfg, (log) => {
    console.log(
      JSON.stringify({
        epoch: log.epoch,
        joint: log.mean.joint,
        mlm: log.mean.mlm,
        psp: log.mean.psp,
        vcp: log.mean.vcp,
      }),
    );
  });
  saveCheckpoint(encoder, need(flags, "out"));
}

function cmdFinetune(flags: Map<string, string>, task: "branch" | "value"): void {
  const records = loadDataset(need(flags, "train"));
  const encoder = loadCheckpoint(need(flags, "checkpoint"));
  const cfg = trainConfig(flags, 8e-6);
  const run = task === "branch" ? finetuneBranch : finetuneValue;
  run(encoder, records, cfg, (epoch, loss) => {
    console.log(JSON.stringify({ epoch, loss }));
  });
  saveCheckpoint(encoder, need(flags, "out"));
}

function cmdEvaluate(flags: Map<string, string>): void {
  const records = loadDataset(need(flags, "data"));
  const branchEncoder = loadCheckpoint(need(flags, "branch-model"));
  const valueEncoder = loadCheckpoint(need(flags, "value-model"));
  const rows = evaluate(branchEncoder, valueEncoder, records);
  if (rows.length !== records.length) {
    throw new Error("prediction row count does not match dataset row count");
  }
  writePredictions(rows, need(flags, "out"));
  console.log(JSON.stringify({ rows: rows.length }));
}

export function main(argv: string[]): number {
  const [command, ...rest] = argv;
  try {
    const flags = parseFlags(rest);
    switch (command) {
      case "pretrain":
        cmdPretrain(flags);
        return 0;
      case "finetune-branch":
        cmdFinetune(flags, "branch");
        return 0;
      case "finetune-value":
        cmdFinetune(flags, "value");
        return 0;
      case "evaluate":
        cmdEvaluate(flags);
        return 0;
      default:
        console.error(
          "usage: cli.js <pretrain|finetune-branch|finetune-value|evaluate> [--flag value ...]",
        );
        return 2;
    }
  } catch (err) {
    console.error(JSON.stringify({ error: String(err instanceof Error ? err.message : err) }));
    return 1;
  }
}

process.exitCode = main(process.argv.slice(2));
