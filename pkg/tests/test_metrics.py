import random

import pytest

from tracekit.errors import EmptyCorpus, LengthMismatch, TooFewCandidates
from tracekit.metrics import (
    BranchEval,
    ValueEval,
    average_precision_at_r,
    branch_prf,
    evaluation_report,
    full_exec_match,
    full_path_match,
    map_at_r,
    value_accuracy,
)

# -- independent naive recounts (kept deliberately separate from the module
# under test; plain counting, no shared helpers) ------------------------------


def naive_branch_metrics(corpus):
    flat = [(t, p) for e in corpus for t, p in zip(e.truth, e.pred)]
    tp = len([1 for t, p in flat if t and p])
    fp = len([1 for t, p in flat if not t and p])
    fn = len([1 for t, p in flat if t and not p])
    acc = len([1 for t, p in flat if t == p]) / len(flat)
    prec = tp / (tp + fp) if tp + fp > 0 else 0.0
    rec = tp / (tp + fn) if tp + fn > 0 else 0.0
    f1 = (2 * prec * rec / (prec + rec)) if prec + rec > 0 else 0.0
    return acc, prec, rec, f1


def naive_value_accuracy(corpus):
    pairs = [(t, p) for e in corpus for t, p in zip(e.truth, e.pred)]
    return len([1 for t, p in pairs if t == p]) / len(pairs)


def naive_ap_at_r(relevance, r):
    total = 0.0
    for k in range(1, r + 1):
        if relevance[k - 1]:
            prec_at_k = sum(relevance[:k]) / k
            total += prec_at_k
    return total / r


class TestFullPathMatch:
    def test_identity(self):
        assert full_path_match(BranchEval((True, False), (True, False))) is True

    def test_mismatch(self):
        assert full_path_match(BranchEval((True, False), (True, True))) is False

    def test_zero_branches_vacuously_true(self):
        assert full_path_match(BranchEval((), ())) is True

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            BranchEval((True,), (True, False))


class TestBranchPrf:
    def test_hand_confusion_matrix(self):
        # truth [1,0], pred [1,1]: tp=1 fp=1 tn=0 fn=0
        result = branch_prf([BranchEval((True, False), (True, True))])
        assert result["accuracy"] == 0.5
        assert result["precision"] == 0.5
        assert result["recall"] == 1.0
        assert result["f1"] == pytest.approx(2 / 3)

    def test_perfect(self):
        result = branch_prf([BranchEval((True, False, True), (True, False, True))])
        assert all(result[k] == 1.0 for k in ("accuracy", "precision", "recall", "f1"))

    def test_all_negative_convention(self):
        result = branch_prf([BranchEval((False, False), (False, False))])
        assert result["accuracy"] == 1.0
        assert result["precision"] == 0.0
        assert result["recall"] == 0.0
        assert result["f1"] == 0.0

    def test_empty_corpus(self):
        with pytest.raises(EmptyCorpus):
            branch_prf([])


class TestValueMetrics:
    def test_three_of_four(self):
        e = ValueEval((1, 2, 3, 4), (1, 2, 3, 9))
        assert value_accuracy([e]) == 0.75
        assert full_exec_match(e) is False

    def test_identical(self):
        e = ValueEval((5, 6), (5, 6))
        assert value_accuracy([e]) == 1.0
        assert full_exec_match(e) is True

    def test_empty_vectors(self):
        assert full_exec_match(ValueEval((), ())) is True
        with pytest.raises(EmptyCorpus):
            value_accuracy([ValueEval((), ())])


class TestMapAtR:
    def test_hand_example(self):
        # [rel, irrel], R=2: AP@2 = (1/2) * (1/1) = 0.5
        assert map_at_r([[True, False]], 2) == 0.5

    def test_all_relevant(self):
        assert map_at_r([[True] * 5], 5) == 1.0

    def test_none_relevant(self):
        assert map_at_r([[False] * 5], 5) == 0.0

    def test_too_few_candidates(self):
        with pytest.raises(TooFewCandidates):
            map_at_r([[True]], 2)

    def test_bounds_random(self):
        rng = random.Random(3)
        for _ in range(200):
            rel = [rng.random() < 0.4 for _ in range(10)]
            ap = average_precision_at_r(rel, 10)
            assert 0.0 <= ap <= 1.0

    def test_monotone_under_upward_swap(self):
        rng = random.Random(4)
        for _ in range(200):
            rel = [rng.random() < 0.4 for _ in range(12)]
            idx = [i for i in range(1, 12) if rel[i] and not rel[i - 1]]
            if not idx:
                continue
            i = rng.choice(idx)
            swapped = list(rel)
            swapped[i - 1], swapped[i] = swapped[i], swapped[i - 1]
            assert average_precision_at_r(swapped, 12) >= average_precision_at_r(rel, 12)


def random_branch_corpus(rng, n):
    corpus = []
    for _ in range(n):
        m = rng.randint(0, 6)
        truth = tuple(rng.random() < 0.5 for _ in range(m))
        pred = tuple(rng.random() < 0.5 for _ in range(m))
        corpus.append(BranchEval(truth, pred))
    return corpus


def random_value_corpus(rng, n):
    corpus = []
    for _ in range(n):
        m = rng.randint(1, 8)
        truth = tuple(rng.randrange(30) for _ in range(m))
        pred = tuple(rng.randrange(30) for _ in range(m))
        corpus.append(ValueEval(truth, pred))
    return corpus


class TestOracleEquivalence:
    def test_branch_metrics_match_naive_recount(self):
        rng = random.Random(11)
        for _ in range(300):
            corpus = random_branch_corpus(rng, rng.randint(1, 12))
            if not any(e.truth for e in corpus):
                continue
            got = branch_prf(corpus)
            acc, prec, rec, f1 = naive_branch_metrics(corpus)
            assert abs(got["accuracy"] - acc) < 1e-12
            assert abs(got["precision"] - prec) < 1e-12
            assert abs(got["recall"] - rec) < 1e-12
            assert abs(got["f1"] - f1) < 1e-12

    def test_value_accuracy_matches_naive_recount(self):
        rng = random.Random(12)
        for _ in range(300):
            corpus = random_value_corpus(rng, rng.randint(1, 12))
            assert abs(value_accuracy(corpus) - naive_value_accuracy(corpus)) < 1e-12

    def test_map_matches_naive_recount(self):
        rng = random.Random(13)
        for _ in range(300):
            rel = [rng.random() < 0.3 for _ in range(15)]
            assert abs(average_precision_at_r(rel, 15) - naive_ap_at_r(rel, 15)) < 1e-12

    def test_full_path_implies_positionwise_correct(self):
        rng = random.Random(14)
        for _ in range(300):
            corpus = random_branch_corpus(rng, 6)
            for e in corpus:
                if full_path_match(e):
                    assert all(t == p for t, p in zip(e.truth, e.pred))

    def test_permutation_invariance(self):
        rng = random.Random(15)
        corpus = random_branch_corpus(rng, 20)
        values = random_value_corpus(rng, 20)
        shuffled = list(corpus)
        rng.shuffle(shuffled)
        assert branch_prf(corpus) == branch_prf(shuffled)
        vs = list(values)
        rng.shuffle(vs)
        assert value_accuracy(values) == value_accuracy(vs)


class TestReport:
    def test_report_shape(self):
        report = evaluation_report(
            [BranchEval((True,), (True,))],
            [ValueEval((1, 2), (1, 3))],
            rankings=[[True, False]],
            r=2,
        )
        assert report["full_path_acc"] == 1.0
        assert report["value_acc"] == 0.5
        assert report["full_exec_acc"] == 0.0
        assert report["map_at_r"] == 0.5
        assert set(report["branch"]) == {"accuracy", "precision", "recall", "f1"}

    def test_rankings_require_r(self):
        with pytest.raises(ValueError):
            evaluation_report([BranchEval((True,), (True,))], [ValueEval((1,), (1,))],
                              rankings=[[True]], r=None)
