"""Evaluation metrics: full-path match, branch accuracy/P/R/F1, value
accuracy, full-execution match, and MAP@R.

Branch metrics are micro-averaged over all branch positions in the corpus
with "taken" as the positive class; zero-denominator precision/recall/F1
are defined as 0.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import EmptyCorpus, LengthMismatch, TooFewCandidates


@dataclass(frozen=True)
class BranchEval:
    truth: tuple[bool, ...]
    pred: tuple[bool, ...]

    def __post_init__(self):
        if len(self.truth) != len(self.pred):
            raise LengthMismatch(
                f"branch truth has {len(self.truth)} entries, prediction has {len(self.pred)}"
            )


@dataclass(frozen=True)
class ValueEval:
    truth: tuple[int, ...]
    pred: tuple[int, ...]

    def __post_init__(self):
        if len(self.truth) != len(self.pred):
            raise LengthMismatch(
                f"value truth has {len(self.truth)} entries, prediction has {len(self.pred)}"
            )


def full_path_match(e: BranchEval) -> bool:
    """True iff every branch label matches (vacuously true with no branches)."""
    return e.truth == e.pred


def branch_prf(corpus: list[BranchEval]) -> dict[str, float]:
    if not corpus:
        raise EmptyCorpus("no branch evaluations")
    tp = fp = tn = fn = 0
    for e in corpus:
        for t, p in zip(e.truth, e.pred):
            if t and p:
                tp += 1
            elif not t and p:
                fp += 1
            elif not t and not p:
                tn += 1
            else:
                fn += 1
    total = tp + fp + tn + fn
    if total == 0:
        raise EmptyCorpus("no branch positions")
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return {
        "accuracy": (tp + tn) / total,
        "precision": precision,
        "recall": recall,
        "f1": f1,
    }


def value_accuracy(corpus: list[ValueEval]) -> float:
    matched = 0
    total = 0
    for e in corpus:
        total += len(e.truth)
        matched += sum(1 for t, p in zip(e.truth, e.pred) if t == p)
    if total == 0:
        raise EmptyCorpus("no value positions")
    return matched / total


def full_exec_match(e: ValueEval) -> bool:
    return e.truth == e.pred


def average_precision_at_r(relevance: list[bool], r: int) -> float:
    """AP@R = (1/R) * sum_{k=1..R} P(k) * rel(k)."""
    if len(relevance) < r:
        raise TooFewCandidates(f"ranking has {len(relevance)} candidates, need {r}")
    hits = 0
    total = 0.0
    for k in range(1, r + 1):
        if relevance[k - 1]:
            hits += 1
            total += hits / k
    return total / r


def map_at_r(rankings: list[list[bool]], r: int) -> float:
    """Mean over queries of AP@R; each ranking is relevance in rank order."""
    if not rankings:
        raise EmptyCorpus("no rankings")
    return sum(average_precision_at_r(rel, r) for rel in rankings) / len(rankings)


def evaluation_report(
    branch_corpus: list[BranchEval],
    value_corpus: list[ValueEval],
    rankings: list[list[bool]] | None = None,
    r: int | None = None,
) -> dict:
    report = {
        "full_path_acc": sum(1 for e in branch_corpus if full_path_match(e)) / len(branch_corpus)
        if branch_corpus
        else 0.0,
        "branch": branch_prf(branch_corpus),
        "value_acc": value_accuracy(value_corpus),
        "full_exec_acc": sum(1 for e in value_corpus if full_exec_match(e)) / len(value_corpus)
        if value_corpus
        else 0.0,
    }
    if rankings is not None:
        if r is None:
            raise ValueError("r is required when rankings are given")
        report["map_at_r"] = map_at_r(rankings, r)
    return report
