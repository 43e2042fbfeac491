"""Command-line surface: every subcommand is a thin wrapper over one
library operation and reads/writes the documented file formats."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .assemble import BudgetConfig
from .corpus import gen_corpus, load_corpus, write_corpus
from .errors import TracekitError
from .labels import annotate_branches
from .metrics import BranchEval, ValueEval, evaluation_report
from .minic import ExecConfig, ExecInput, execute, normalize, parse
from .pipeline import (
    MASK_RATE_DEFAULT,
    build_dataset,
    parse_config_file,
    split_problems,
)
from .quantize import (
    ConcreteAbstraction,
    QuantizationThresholds,
    QuantizedAbstraction,
    quantize,
    taxonomy_json,
)
from .trace import export_trace_to_path, finalize, ingest_trace


def _read_input_file(path) -> ExecInput:
    return ExecInput.from_text(Path(path).read_text(encoding="utf-8"))


def _thresholds(args) -> QuantizationThresholds:
    return QuantizationThresholds(
        small_max=args.small_max, large_min=args.large_min, long_len=args.long_len
    )


def _add_threshold_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--small-max", type=int, default=10)
    p.add_argument("--large-min", type=int, default=10_000)
    p.add_argument("--long-len", type=int, default=64)


def cmd_trace(args) -> int:
    source = Path(args.source).read_text(encoding="utf-8")
    program = parse(normalize(source))
    cfg = ExecConfig(step_budget=args.step_budget)
    trace = execute(program, _read_input_file(args.input), cfg)
    export_trace_to_path(trace, args.output)
    if trace.error is not None:
        print(
            json.dumps({"error": trace.error, "message": trace.error_message}, sort_keys=True),
            file=sys.stderr,
        )
        return 1
    return 0


def cmd_quantize(args) -> int:
    if args.export_taxonomy:
        Path(args.output).write_text(taxonomy_json(), encoding="utf-8")
        return 0
    if args.trace is None:
        raise TracekitError("a trace file is required unless --export-taxonomy is given")
    trace = ingest_trace(args.trace)
    fin = finalize(trace)
    thr = _thresholds(args)
    strategy = QuantizedAbstraction(thr) if args.strategy == "quantized" else ConcreteAbstraction()
    rows = []
    for line in sorted(fin.states):
        for name in sorted(fin.states[line]):
            value = fin.states[line][name]
            row = {
                "line": line,
                "var": name,
                "type": value.static_type,
                "strategy": strategy.name,
                "label": strategy.abstraction(value.static_type, value),
            }
            if args.strategy == "quantized":
                tup = quantize(value.static_type, value, thr)
                row.update(data_type=tup.data_type, value_type=tup.value_type)
            rows.append(row)
    with open(args.output, "w", encoding="utf-8") as fp:
        for row in rows:
            fp.write(json.dumps(row, sort_keys=True))
            fp.write("\n")
    return 0


def cmd_annotate(args) -> int:
    source = normalize(Path(args.source).read_text(encoding="utf-8"))
    program = parse(source)
    trace = execute(program, _read_input_file(args.input))
    covered = finalize(trace).covered
    rewritten, sites = annotate_branches(program, source, covered)
    Path(args.output).write_text(rewritten, encoding="utf-8")
    if args.sites:
        site_rows = [
            {"kind": s.kind, "offset": s.insertion_offset, "taken": s.taken,
             "lines": list(s.block_lines)}
            for s in sites
        ]
        Path(args.sites).write_text(
            json.dumps({"sites": site_rows}, sort_keys=True, indent=2) + "\n", encoding="utf-8"
        )
    return 0


def cmd_gen_corpus(args) -> int:
    problems = gen_corpus(args.seed, args.problems, args.variants)
    write_corpus(problems, args.output)
    return 0


def cmd_split(args) -> int:
    problems = load_corpus(args.corpus)
    spec = split_problems([p.problem_id for p in problems], args.ratio, args.seed)
    payload = {
        "train_problem_ids": list(spec.train_problem_ids),
        "heldout_problem_ids": list(spec.heldout_problem_ids),
        "seed": spec.seed,
    }
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_build_dataset(args) -> int:
    overrides = parse_config_file(args.config) if args.config else {}

    def cfg(key, default, conv):
        if key in overrides:
            return conv(overrides[key])
        return default

    seed = cfg("seed", args.seed, int)
    ratio = cfg("split", args.split, float)
    cap = cfg("cap_per_problem", args.cap, int)
    thr = QuantizationThresholds(
        small_max=cfg("small_max", 10, int),
        large_min=cfg("large_min", 10_000, int),
        long_len=cfg("long_len", 64, int),
    )
    budgets = BudgetConfig(
        input_budget=cfg("input_budget", 64, int),
        code_budget=cfg("code_budget", 960, int),
    )
    mask_rate = cfg("mask_rate", MASK_RATE_DEFAULT, float)
    step_budget = cfg("step_budget", 100_000, int)

    problems = load_corpus(args.corpus)
    spec = split_problems([p.problem_id for p in problems], ratio, seed)
    result = build_dataset(
        problems,
        spec,
        args.output,
        thr=thr,
        cap_per_problem=cap,
        budgets=budgets,
        mask_rate=mask_rate,
        exec_config=ExecConfig(step_budget=step_budget),
    )
    print(json.dumps(result.manifest["counts"], sort_keys=True))
    return 0


def load_truth_rows(path) -> list[dict]:
    rows = []
    with open(path, "r", encoding="utf-8") as fp:
        for raw in fp:
            raw = raw.strip()
            if raw:
                rows.append(json.loads(raw))
    return rows


def cmd_eval(args) -> int:
    truth_rows = load_truth_rows(args.truth)
    pred_rows = load_truth_rows(args.pred)
    if len(truth_rows) != len(pred_rows):
        raise TracekitError(
            f"row count mismatch: {len(truth_rows)} truth vs {len(pred_rows)} predictions"
        )
    branch_corpus = []
    value_corpus = []
    for i, (truth, pred) in enumerate(zip(truth_rows, pred_rows)):
        if truth.get("problem_id") != pred.get("problem_id"):
            raise TracekitError(
                f"row {i}: problem_id mismatch "
                f"({truth.get('problem_id')!r} vs {pred.get('problem_id')!r})"
            )
        taken = [bool(b) for b in truth["branch_taken"]]
        bins = [truth["labels"]["bin"][span[0]] for span in truth["occ_token_spans"]]
        branch_corpus.append(BranchEval(tuple(taken), tuple(bool(b) for b in pred["branch_pred"])))
        value_corpus.append(ValueEval(tuple(bins), tuple(int(v) for v in pred["value_pred"])))
    rankings = None
    if args.rankings:
        rankings = [
            [bool(v) for v in row["relevance"]] for row in load_truth_rows(args.rankings)
        ]
    report = evaluation_report(branch_corpus, value_corpus, rankings, args.r)
    print(json.dumps(report, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tracekit",
        description="Trace small C-like programs and build execution-labeled datasets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("trace", help="execute a program against an input and write the trace JSONL")
    p.add_argument("source")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--step-budget", type=int, default=100_000)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("quantize", help="quantize a trace's finalized states, or export the taxonomy")
    p.add_argument("trace", nargs="?")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--strategy", choices=["quantized", "concrete"], default="quantized")
    p.add_argument("--export-taxonomy", action="store_true")
    _add_threshold_flags(p)
    p.set_defaults(func=cmd_quantize)

    p = sub.add_parser("annotate", help="insert branch markers and report taken ground truth")
    p.add_argument("source")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--sites")
    p.set_defaults(func=cmd_annotate)

    p = sub.add_parser("gen-corpus", help="generate a synthetic problem corpus")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--problems", type=int, required=True)
    p.add_argument("--variants", type=int, default=3)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_gen_corpus)

    p = sub.add_parser("split", help="split a corpus strictly by problem id")
    p.add_argument("--corpus", required=True)
    p.add_argument("--ratio", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("build-dataset", help="build train/heldout dataset JSONL files")
    p.add_argument("--corpus", required=True)
    p.add_argument("--split", type=float, default=0.95)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--cap", type=int, default=200)
    p.add_argument("--config", help="key=value config file overriding defaults")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_build_dataset)

    p = sub.add_parser("eval", help="score predictions against a truth dataset")
    p.add_argument("--pred", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--rankings", help="optional retrieval rankings JSONL for MAP@R")
    p.add_argument("--r", type=int, help="R cutoff for MAP@R")
    p.set_defaults(func=cmd_eval)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (TracekitError, ValueError, OSError) as exc:
        print(
            json.dumps({"error": type(exc).__name__, "message": str(exc)}, sort_keys=True),
            file=sys.stderr,
        )
        return 1


if __name__ == "__main__":
    sys.exit(main())
