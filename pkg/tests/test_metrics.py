import random

import pytest

from botsift.errors import EmptyInput, EmptyMatrix, LengthMismatch, UnlabeledRecord
from botsift.ingest import Label
from botsift.metrics import ConfusionMatrix, confusion, evaluate, report_to_dict

BOT, HUMAN = Label.BOT, Label.HUMAN


def test_all_correct():
    truth = [BOT] * 3 + [HUMAN] * 7
    matrix = confusion(truth, truth)
    assert (matrix.tp, matrix.tn, matrix.fp, matrix.fn) == (3, 7, 0, 0)


def test_all_inverted_swaps_counts():
    truth = [BOT] * 3 + [HUMAN] * 7
    flipped = [HUMAN] * 3 + [BOT] * 7
    matrix = confusion(flipped, truth)
    assert (matrix.tp, matrix.tn, matrix.fp, matrix.fn) == (0, 0, 7, 3)


def brute_force_counts(predictions, truth):
    """Independent counting oracle."""
    tp = sum(1 for p, t in zip(predictions, truth) if p is BOT and t is BOT)
    fp = sum(1 for p, t in zip(predictions, truth) if p is BOT and t is HUMAN)
    tn = sum(1 for p, t in zip(predictions, truth) if p is HUMAN and t is HUMAN)
    fn = sum(1 for p, t in zip(predictions, truth) if p is HUMAN and t is BOT)
    return tp, fp, tn, fn


def test_confusion_matches_brute_force():
    rng = random.Random(9)
    for _ in range(30):
        n = rng.randrange(1, 50)
        predictions = [BOT if rng.random() < 0.5 else HUMAN for _ in range(n)]
        truth = [BOT if rng.random() < 0.5 else HUMAN for _ in range(n)]
        matrix = confusion(predictions, truth)
        assert (matrix.tp, matrix.fp, matrix.tn, matrix.fn) == brute_force_counts(
            predictions, truth
        )


def test_confusion_input_validation():
    with pytest.raises(LengthMismatch):
        confusion([BOT], [BOT, HUMAN])
    with pytest.raises(EmptyInput):
        confusion([], [])
    with pytest.raises(UnlabeledRecord):
        confusion([Label.UNLABELED], [BOT])


def test_evaluate_hand_counted():
    report = evaluate(ConfusionMatrix(tp=3, fp=1, tn=5, fn=1))
    assert report.accuracy == pytest.approx(0.8)
    assert report.precision == pytest.approx(0.75)
    assert report.recall == pytest.approx(0.75)
    assert report.f1 == pytest.approx(0.75)


def test_evaluate_undefined_precision_is_none():
    report = evaluate(ConfusionMatrix(tp=0, fp=0, tn=4, fn=2))
    assert report.precision is None
    assert report.recall == pytest.approx(0.0)
    assert report.f1 is None


def test_evaluate_undefined_recall_is_none():
    report = evaluate(ConfusionMatrix(tp=0, fp=2, tn=4, fn=0))
    assert report.recall is None
    assert report.f1 is None


def test_evaluate_zero_precision_plus_recall():
    report = evaluate(ConfusionMatrix(tp=0, fp=1, tn=1, fn=1))
    assert report.precision == 0.0
    assert report.recall == 0.0
    assert report.f1 is None


def test_evaluate_empty_matrix():
    with pytest.raises(EmptyMatrix):
        evaluate(ConfusionMatrix(tp=0, fp=0, tn=0, fn=0))


def test_reported_headline_f1_consistent_with_p_and_r():
    # counts implying precision 25/27 ~ 0.9259 and recall 0.50 reproduce F1 0.6494
    report = evaluate(ConfusionMatrix(tp=25, fp=2, tn=48, fn=25))
    assert report.precision == pytest.approx(0.9259, abs=5e-5)
    assert report.recall == pytest.approx(0.5, abs=1e-12)
    assert report.f1 == pytest.approx(0.6494, abs=5e-5)


def test_metric_ranges_and_f1_bound():
    rng = random.Random(17)
    for _ in range(200):
        matrix = ConfusionMatrix(
            tp=rng.randrange(0, 20),
            fp=rng.randrange(0, 20),
            tn=rng.randrange(0, 20),
            fn=rng.randrange(0, 20),
        )
        if matrix.total == 0:
            continue
        report = evaluate(matrix)
        assert 0.0 <= report.accuracy <= 1.0
        for value in (report.precision, report.recall, report.f1):
            if value is not None:
                assert 0.0 <= value <= 1.0
        if report.f1 is not None:
            assert min(report.precision, report.recall) <= report.f1 + 1e-12
            assert report.f1 <= max(report.precision, report.recall) + 1e-12
            # internal consistency of the report's own fields
            expected = 2 * report.precision * report.recall / (report.precision + report.recall)
            assert abs(report.f1 - expected) <= 1e-12


def test_swapping_positive_class_matches_brute_force():
    rng = random.Random(23)
    for _ in range(50):
        n = rng.randrange(1, 40)
        predictions = [BOT if rng.random() < 0.5 else HUMAN for _ in range(n)]
        truth = [BOT if rng.random() < 0.5 else HUMAN for _ in range(n)]
        flip = {BOT: HUMAN, HUMAN: BOT}
        swapped = confusion([flip[p] for p in predictions], [flip[t] for t in truth])
        tp, fp, tn, fn = brute_force_counts(
            [flip[p] for p in predictions], [flip[t] for t in truth]
        )
        assert (swapped.tp, swapped.fp, swapped.tn, swapped.fn) == (tp, fp, tn, fn)
        original = confusion(predictions, truth)
        # swapping the positive class exchanges tp<->tn and fp<->fn
        assert (swapped.tp, swapped.fp, swapped.tn, swapped.fn) == (
            original.tn,
            original.fn,
            original.tp,
            original.fp,
        )


def test_report_to_dict_uses_null_for_undefined():
    payload = report_to_dict(evaluate(ConfusionMatrix(tp=0, fp=0, tn=4, fn=2)))
    assert payload["precision"] is None
    assert payload["f1"] is None
    assert payload["confusion"] == {"tp": 0, "fp": 0, "tn": 4, "fn": 2}


def test_confusion_matrix_rejects_negative_counts():
    with pytest.raises(ValueError):
        ConfusionMatrix(tp=-1, fp=0, tn=0, fn=0)
