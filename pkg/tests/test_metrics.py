import numpy as np
import pytest

from phonexl.metrics import (EvalReport, EvalResult, bio_spans, ner_scores,
                             score_task, token_scores)


def test_bio_span_extraction():
    tags = ["O", "B-PER", "I-PER", "O", "B-LOC", "B-ORG", "I-ORG"]
    assert bio_spans(tags) == {("PER", 1, 3), ("LOC", 4, 5), ("ORG", 5, 7)}


def test_bio_span_handles_dangling_i_tags():
    assert bio_spans(["I-PER", "I-PER", "O"]) == {("PER", 0, 2)}
    assert bio_spans(["B-PER", "I-LOC"]) == {("PER", 0, 1), ("LOC", 1, 2)}
    assert bio_spans(["B-PER"]) == {("PER", 0, 1)}


def test_perfect_predictions_score_100():
    gold = [["B-PER", "I-PER", "O"], ["O", "B-LOC"]]
    p, r, f1 = ner_scores(gold, gold)
    assert (p, r, f1) == (100.0, 100.0, 100.0)


def test_all_o_predictions_score_zero():
    gold = [["B-PER", "I-PER", "O"]]
    pred = [["O", "O", "O"]]
    assert ner_scores(gold, pred) == (0.0, 0.0, 0.0)


def test_hand_scored_boundary_error_fixture():
    # three sentences, three gold entities; one predicted span is clipped a
    # word short, the rest are exact
    gold = [["B-PER", "I-PER", "O"], ["B-LOC", "I-LOC", "B-ORG"], ["O", "O"]]
    pred = [["B-PER", "I-PER", "O"], ["B-LOC", "O", "B-ORG"], ["O", "O"]]
    # gold spans: PER(0,2), LOC(0,2), ORG(2,3); predicted LOC(0,1) misses
    # by one word: correct = 2, predicted = 3, gold = 3
    p, r, f1 = ner_scores(gold, pred)
    assert p == pytest.approx(100 * 2 / 3)
    assert r == pytest.approx(100 * 2 / 3)
    assert f1 == pytest.approx(100 * 2 / 3)


def test_ner_scores_match_independent_oracle_on_random_pairs():
    rng = np.random.default_rng(0)
    tags = ["O", "B-PER", "I-PER", "B-LOC", "I-LOC"]

    def oracle(gold, pred):
        def spans(seq):
            out, start, kind = set(), None, None
            for i, t in enumerate(seq + ["O"]):
                starts = t.startswith("B-") or (t.startswith("I-") and
                                                (kind is None or t[2:] != kind))
                if (t == "O" or starts) and start is not None:
                    out.add((kind, start, i))
                    start, kind = None, None
                if starts:
                    start, kind = i, t[2:]
            return out

        g = [spans(s) for s in gold]
        p = [spans(s) for s in pred]
        correct = sum(len(a & b) for a, b in zip(g, p))
        n_g, n_p = sum(map(len, g)), sum(map(len, p))
        prec = 100 * correct / n_p if n_p else 0.0
        rec = 100 * correct / n_g if n_g else 0.0
        f1 = 2 * prec * rec / (prec + rec) if prec + rec else 0.0
        return prec, rec, f1

    for _ in range(100):
        n = int(rng.integers(1, 5))
        gold = [[str(rng.choice(tags)) for _ in range(int(rng.integers(1, 8)))]
                for _ in range(n)]
        pred = [[str(rng.choice(tags)) for _ in range(len(s))] for s in gold]
        ours = ner_scores(gold, pred)
        ref = oracle(gold, pred)
        assert ours == pytest.approx(ref, abs=1e-9)


def test_token_scores_equal_accuracy():
    gold = [["A", "B", "C"], ["A"]]
    pred = [["A", "B", "X"], ["A"]]
    p, r, f1 = token_scores(gold, pred)
    assert p == r == f1 == pytest.approx(75.0)


def test_score_task_dispatch():
    gold = [["O"]]
    assert score_task("ner", gold, gold)[2] == 0.0  # no entities at all
    assert score_task("pos", gold, gold)[2] == 100.0
    with pytest.raises(ValueError):
        score_task("parsing", gold, gold)


def test_eval_report_statistics():
    report = EvalReport(task="ner", language="tgt", per_seed={
        1: EvalResult(50.0, 40.0, 44.44, 10),
        2: EvalResult(52.0, 42.0, 46.44, 10),
        3: EvalResult(54.0, 44.0, 48.44, 10),
    })
    assert report.mean_f1() == pytest.approx(46.44)
    assert report.stdev_f1() == pytest.approx(2.0)
    single = EvalReport(task="ner", language="tgt",
                        per_seed={1: EvalResult(1, 1, 1, 1)})
    assert single.stdev_f1() is None
    assert "stdev_f1" not in single.as_dict()
