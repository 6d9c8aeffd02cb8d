"""Scoring arithmetic, canonicalization, and reference baselines."""

import pytest

from aqagen.errors import InvalidArgumentError
from aqagen.evaluate import (
    MISSING,
    baseline_majority,
    baseline_random,
    canonicalize,
    score,
)


def _gold_row(qid, qtype, answer):
    return {"question_id": qid, "question_type": qtype, "answer": answer}


# Ten questions over five types with hand-marked correctness: the per-type
# table below was computed by hand from the prediction list.
FIXTURE_GOLD = [
    _gold_row(0, "yes_no", "yes"),
    _gold_row(1, "yes_no", "no"),
    _gold_row(2, "counting", "3"),
    _gold_row(3, "counting", "0"),
    _gold_row(4, "note", "A#"),
    _gold_row(5, "note", "G"),
    _gold_row(6, "instrument", "cello"),
    _gold_row(7, "instrument", "flute"),
    _gold_row(8, "global_position", "end"),
    _gold_row(9, "global_position", "middle"),
]
FIXTURE_PREDS = {
    0: "yes",        # correct
    1: "yes",        # wrong
    2: "3",          # correct
    3: "1",          # wrong
    4: "a#",         # correct (case-insensitive note)
    5: "G",          # correct
    6: "violin",     # wrong
    7: "flute",      # correct
    8: "end",        # correct
    # 9 missing     -> wrong, counted as missing
}
# hand computation: yes_no 1/2, counting 1/2, note 2/2, instrument 1/2,
# global_position 1/2 -> overall 6/10
FIXTURE_PER_TYPE = {
    "yes_no": 0.5, "counting": 0.5, "note": 1.0,
    "instrument": 0.5, "global_position": 0.5,
}


def test_fixture_per_type_table_matches_hand_computation():
    report = score(FIXTURE_PREDS, FIXTURE_GOLD)
    assert report.per_type_accuracy == FIXTURE_PER_TYPE
    assert report.overall_accuracy == pytest.approx(0.60)
    assert report.n_scored == 10
    assert report.n_missing == 1
    assert report.n_out_of_vocabulary == 0


def test_seven_of_ten_is_070():
    preds = {i: row["answer"] for i, row in enumerate(FIXTURE_GOLD)}
    preds[1] = "yes"
    preds[3] = "9"
    preds[6] = "trumpet"
    report = score(preds, FIXTURE_GOLD)
    assert report.overall_accuracy == pytest.approx(0.70)


def test_identity_predictions_scores_one():
    preds = {row["question_id"]: row["answer"] for row in FIXTURE_GOLD}
    report = score(preds, FIXTURE_GOLD)
    assert report.overall_accuracy == 1.0
    assert all(v == 1.0 for v in report.per_type_accuracy.values())
    assert report.n_missing == 0


def test_weighted_per_type_reproduces_overall():
    report = score(FIXTURE_PREDS, FIXTURE_GOLD)
    weighted = sum(
        report.per_type_accuracy[t] * report.per_type_counts[t]
        for t in report.per_type_accuracy
    )
    assert weighted / report.n_scored == report.overall_accuracy


def test_permutation_invariance():
    report_a = score(FIXTURE_PREDS, FIXTURE_GOLD)
    shuffled = list(reversed(FIXTURE_GOLD))
    report_b = score(dict(reversed(list(FIXTURE_PREDS.items()))), shuffled)
    assert report_a.overall_accuracy == report_b.overall_accuracy
    assert report_a.per_type_accuracy == report_b.per_type_accuracy


def test_confusion_counts_sum_to_scored():
    report = score(FIXTURE_PREDS, FIXTURE_GOLD)
    assert sum(report.answer_confusion.values()) == report.n_scored
    assert report.answer_confusion[("middle", MISSING)] == 1


def test_canonicalization_rules():
    assert canonicalize("A#") == canonicalize("a#")
    assert canonicalize("three") == canonicalize("3")
    assert canonicalize("  YES ") == "yes"
    report = score({2: "three"}, [FIXTURE_GOLD[2]])
    assert report.overall_accuracy == 1.0


def test_out_of_vocabulary_counted():
    report = score({0: "maybe"}, [FIXTURE_GOLD[0]])
    assert report.overall_accuracy == 0.0
    assert report.n_out_of_vocabulary == 1


def test_duplicate_prediction_ids_rejected():
    with pytest.raises(InvalidArgumentError):
        score([{"question_id": 0, "answer": "yes"},
               {"question_id": 0, "answer": "no"}], FIXTURE_GOLD)


def test_baseline_random_two_class_hook():
    gold = [_gold_row(i, "yes_no", "yes" if i % 2 else "no") for i in range(4000)]
    acc = baseline_random(gold, seed=5, n_trials=5, vocabulary=["yes", "no"])
    assert acc == pytest.approx(0.5, abs=0.03)


def test_baseline_random_requires_trials():
    with pytest.raises(InvalidArgumentError):
        baseline_random(FIXTURE_GOLD, n_trials=0)


def test_majority_mode_prediction():
    train = (
        [_gold_row(i, "yes_no", "no") for i in range(5)]
        + [_gold_row(i + 5, "yes_no", "yes") for i in range(3)]
        + [_gold_row(i + 8, "counting", "3") for i in range(2)]
    )
    result = baseline_majority(train, FIXTURE_GOLD)
    assert result.majority_answer == "no"
    # "no" matches exactly one fixture answer
    assert result.report.overall_accuracy == pytest.approx(0.1)


def test_majority_tie_breaks_lexicographically():
    train = [_gold_row(0, "yes_no", "yes"), _gold_row(1, "yes_no", "no")]
    result = baseline_majority(train, FIXTURE_GOLD)
    assert result.majority_answer == "no"


def test_per_type_majority_at_least_overall_on_train():
    train = (
        [_gold_row(i, "yes_no", "no") for i in range(6)]
        + [_gold_row(i + 6, "yes_no", "yes") for i in range(4)]
        + [_gold_row(i + 10, "counting", "2") for i in range(5)]
        + [_gold_row(i + 15, "note", "A") for i in range(3)]
    )
    result = baseline_majority(train, train)
    assert result.per_type_majority_accuracy >= result.report.overall_accuracy


def test_empty_train_rejected():
    with pytest.raises(InvalidArgumentError):
        baseline_majority([], FIXTURE_GOLD)
