"""End-to-end dataset construction: trace, label, assemble, serialize.

Problems are split strictly by problem id; per problem at most
``cap_per_problem`` (program, input) pairs are kept. Output files are
byte-stable for a fixed seed: JSON keys sorted, sampling via the portable
PRNG, vocabulary built only from the training split.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .assemble import BudgetConfig, Vocabulary, assemble, tokenize
from .corpus import CorpusProblem
from .errors import TracekitError
from .labels import (
    LabeledSample,
    annotate_branches,
    build_labels,
    find_occurrences,
    marker_offsets_after_insertion,
    shift_spans,
)
from .minic import ExecInput, execute, normalize, parse
from .quantize import QuantizationThresholds, taxonomy_hash, taxonomy_json
from .rng import Mulberry32, derive_seed
from .trace import finalize

MASK_RATE_DEFAULT = 0.15


@dataclass(frozen=True)
class SplitSpec:
    train_problem_ids: tuple[str, ...]
    heldout_problem_ids: tuple[str, ...]
    seed: int


def split_problems(problem_ids, ratio: float, seed: int) -> SplitSpec:
    """Disjoint train/heldout split over problem ids; both sides non-empty."""
    ids = sorted(problem_ids)
    if len(ids) < 2:
        raise ValueError("need at least 2 problems to split")
    if not 0 < ratio < 1:
        raise ValueError("ratio must be in (0, 1)")
    shuffled = list(ids)
    Mulberry32(derive_seed(seed, "split")).shuffle(shuffled)
    n_train = min(max(round(ratio * len(ids)), 1), len(ids) - 1)
    return SplitSpec(
        train_problem_ids=tuple(sorted(shuffled[:n_train])),
        heldout_problem_ids=tuple(sorted(shuffled[n_train:])),
        seed=seed,
    )


@dataclass
class PreparedSample:
    problem_id: str
    exec_input_text: str
    annotated_code: str
    sample: LabeledSample
    occ_spans: list[tuple[int, int]]
    marker_offsets: list[int]
    mlm_seed: int


def prepare_sample(
    problem_id: str,
    program_text: str,
    exec_input: ExecInput,
    thr: QuantizationThresholds,
    mlm_seed: int,
    exec_config=None,
) -> PreparedSample:
    """Trace one (program, input) pair and attach labels and branch markers.

    Raises TracekitError subtypes on parse problems; raises RuntimeError when
    the execution itself fails (callers skip and count those).
    """
    norm = normalize(program_text)
    program = parse(norm)
    trace = execute(program, exec_input, exec_config)
    if not trace.ok:
        raise RuntimeError(f"execution failed: {trace.error}: {trace.error_message}")
    fin = finalize(trace)
    occurrences = find_occurrences(program, norm)
    labels = build_labels(occurrences, fin, thr)
    annotated, sites = annotate_branches(program, norm, fin.covered)
    insertion_offsets = [s.insertion_offset for s in sites]
    occ_spans = shift_spans([occ.span for occ in occurrences], insertion_offsets)
    marker_offsets = marker_offsets_after_insertion(insertion_offsets)
    exec_input_text = " ".join(exec_input.tokens)
    sample = LabeledSample(
        problem_id=problem_id,
        exec_input_text=exec_input_text,
        code_text=norm,
        occurrences=occurrences,
        labels=labels,
        branches=sites,
    )
    return PreparedSample(
        problem_id=problem_id,
        exec_input_text=exec_input_text,
        annotated_code=annotated,
        sample=sample,
        occ_spans=occ_spans,
        marker_offsets=marker_offsets,
        mlm_seed=mlm_seed,
    )


def sample_to_dataset_record(prepared: PreparedSample, vocab: Vocabulary,
                             budgets: BudgetConfig) -> dict:
    seq = assemble(
        prepared.exec_input_text,
        prepared.annotated_code,
        prepared.sample,
        vocab,
        budgets,
        occ_spans=prepared.occ_spans,
        marker_offsets=prepared.marker_offsets,
    )
    surviving = len(seq.mask_positions)
    occ_token_spans = [list(seq.alignment[i]) for i in sorted(seq.alignment)]
    return {
        "problem_id": prepared.problem_id,
        "token_ids": seq.token_ids,
        "region_tags": seq.region_tags,
        "labels": {
            "dtype": seq.dtype_ids,
            "vtype": seq.vtype_ids,
            "bin": seq.bin_ids,
            "cov": seq.cov_ids,
        },
        "mlm_seed": prepared.mlm_seed,
        "branch_mask_positions": seq.mask_positions,
        "branch_taken": [s.taken for s in prepared.sample.branches[:surviving]],
        "occ_token_spans": occ_token_spans,
    }


@dataclass
class BuildResult:
    train_path: Path
    heldout_path: Path
    manifest_path: Path
    manifest: dict = field(default_factory=dict)


def _select_pairs(problem: CorpusProblem, cap: int, seed: int):
    pairs = [
        (pi, ii)
        for pi in range(len(problem.programs))
        for ii in range(len(problem.inputs))
    ]
    if len(pairs) <= cap:
        return pairs
    rng = Mulberry32(derive_seed(seed, "cap", problem.problem_id))
    idx = list(range(len(pairs)))
    for i in range(cap):
        j = i + rng.next_below(len(idx) - i)
        idx[i], idx[j] = idx[j], idx[i]
    return [pairs[i] for i in sorted(idx[:cap])]


def build_dataset(
    problems: list[CorpusProblem],
    split: SplitSpec,
    out_dir,
    thr: QuantizationThresholds = QuantizationThresholds(),
    cap_per_problem: int = 200,
    budgets: BudgetConfig = BudgetConfig(),
    mask_rate: float = MASK_RATE_DEFAULT,
    exec_config=None,
) -> BuildResult:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    by_id = {p.problem_id: p for p in problems}
    known = set(split.train_problem_ids) | set(split.heldout_problem_ids)
    missing = sorted(set(by_id) - known)
    if missing:
        raise ValueError(f"split does not cover problems: {missing}")

    prepared: dict[str, list[PreparedSample]] = {"train": [], "heldout": []}
    skipped: list[dict] = []
    for split_name, ids in (("train", split.train_problem_ids), ("heldout", split.heldout_problem_ids)):
        for pid in ids:
            problem = by_id.get(pid)
            if problem is None:
                continue
            for pi, ii in _select_pairs(problem, cap_per_problem, split.seed):
                mlm_seed = derive_seed(split.seed, "mlm", pid, pi, ii)
                try:
                    prepared[split_name].append(
                        prepare_sample(
                            pid,
                            problem.programs[pi].text,
                            problem.inputs[ii],
                            thr,
                            mlm_seed,
                            exec_config,
                        )
                    )
                except (TracekitError, RuntimeError, ValueError) as exc:
                    skipped.append({
                        "problem_id": pid, "program": pi, "input": ii,
                        "reason": str(exc),
                    })

    vocab_tokens: list[str] = []
    for ps in prepared["train"]:
        vocab_tokens.extend(tokenize(ps.exec_input_text))
        vocab_tokens.extend(tokenize(ps.annotated_code))
    vocab = Vocabulary.build(vocab_tokens)

    paths = {}
    counts = {}
    for split_name in ("train", "heldout"):
        path = out / f"{split_name}.jsonl"
        with open(path, "w", encoding="utf-8") as fp:
            for ps in prepared[split_name]:
                record = sample_to_dataset_record(ps, vocab, budgets)
                fp.write(json.dumps(record, sort_keys=True))
                fp.write("\n")
        paths[split_name] = path
        counts[split_name] = len(prepared[split_name])

    (out / "taxonomy.json").write_text(taxonomy_json(), encoding="utf-8")
    (out / "vocab.json").write_text(
        json.dumps(vocab.to_dict(), sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    manifest = {
        "seed": split.seed,
        "train_problem_ids": list(split.train_problem_ids),
        "heldout_problem_ids": list(split.heldout_problem_ids),
        "cap_per_problem": cap_per_problem,
        "thresholds": {
            "small_max": thr.small_max,
            "large_min": thr.large_min,
            "long_len": thr.long_len,
        },
        "budgets": {
            "input_budget": budgets.input_budget,
            "code_budget": budgets.code_budget,
        },
        "mask_rate": mask_rate,
        "truncation_side": "head",
        "taxonomy_hash": taxonomy_hash(),
        "vocab_size": len(vocab),
        "counts": {
            "train_records": counts["train"],
            "heldout_records": counts["heldout"],
            "skipped": len(skipped),
        },
        "skipped": skipped,
    }
    manifest_path = out / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    return BuildResult(paths["train"], paths["heldout"], manifest_path, manifest)


def parse_config_file(path) -> dict[str, str]:
    """key=value config lines; blank lines and # comments ignored."""
    out: dict[str, str] = {}
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"config line is not key=value: {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out
