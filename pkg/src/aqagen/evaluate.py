"""Scoring of model predictions against gold question files.

Matching is exact after canonicalization: answers are compared
case-insensitively, note names keep their ``#`` ("a#" == "A#"), and the
spelled-out count words map to digits ("three" == "3").  Missing and
out-of-vocabulary predictions score as wrong and are tallied separately.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .errors import InvalidArgumentError
from .programs import ANSWER_VOCABULARY, QuestionType
from .rng import SeedStream, mix64

MISSING = "<missing>"

_COUNT_WORDS = {
    "zero": "0", "one": "1", "two": "2", "three": "3", "four": "4", "five": "5",
    "six": "6", "seven": "7", "eight": "8", "nine": "9", "ten": "10",
}


def canonicalize(answer: str) -> str:
    """Canonical comparison key for an answer string."""
    key = str(answer).strip().lower()
    return _COUNT_WORDS.get(key, key)


_CANONICAL_VOCAB = {canonicalize(a): a for a in ANSWER_VOCABULARY}


@dataclass
class EvalReport:
    overall_accuracy: float
    per_type_accuracy: dict[str, float]
    per_type_counts: dict[str, int]
    n_scored: int
    n_missing: int
    n_out_of_vocabulary: int
    answer_confusion: dict[tuple[str, str], int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "overall_accuracy": self.overall_accuracy,
            "per_type_accuracy": self.per_type_accuracy,
            "per_type_counts": self.per_type_counts,
            "n_scored": self.n_scored,
            "n_missing": self.n_missing,
            "n_out_of_vocabulary": self.n_out_of_vocabulary,
            "answer_confusion": {f"{g}|{p}": c for (g, p), c in sorted(self.answer_confusion.items())},
        }

    def format_table(self) -> str:
        lines = [
            f"{'question type':<20} {'n':>7} {'accuracy':>9}",
            "-" * 38,
        ]
        for qtype in QuestionType:
            name = qtype.value
            if name in self.per_type_counts:
                lines.append(
                    f"{name:<20} {self.per_type_counts[name]:>7} "
                    f"{self.per_type_accuracy[name]:>9.4f}"
                )
        lines.append("-" * 38)
        lines.append(f"{'overall':<20} {self.n_scored:>7} {self.overall_accuracy:>9.4f}")
        lines.append(
            f"missing predictions: {self.n_missing}   out-of-vocabulary: {self.n_out_of_vocabulary}"
        )
        return "\n".join(lines)


def _load_gold(gold) -> list[dict]:
    if isinstance(gold, (str, Path)):
        from .pipeline import read_jsonl

        gold = read_jsonl(gold)
    rows = [g if isinstance(g, dict) else g.to_dict() for g in gold]
    seen = set()
    for row in rows:
        if row["question_id"] in seen:
            raise InvalidArgumentError(f"duplicate question_id {row['question_id']} in gold file")
        seen.add(row["question_id"])
    return rows


def load_predictions(pred) -> dict[int, str]:
    """Accepts a mapping, a list of {question_id, answer} rows, or a JSONL path."""
    if isinstance(pred, dict):
        return {int(k): str(v) for k, v in pred.items()}
    if isinstance(pred, (str, Path)):
        from .pipeline import read_jsonl

        pred = read_jsonl(pred)
    out: dict[int, str] = {}
    for row in pred:
        qid = int(row["question_id"])
        if qid in out:
            raise InvalidArgumentError(f"duplicate question_id {qid} in predictions")
        out[qid] = str(row["answer"])
    return out


def score(predictions, gold) -> EvalReport:
    """Exact-match accuracy overall and per question type."""
    gold_rows = _load_gold(gold)
    preds = load_predictions(predictions)

    totals: Counter = Counter()
    corrects: Counter = Counter()
    confusion: Counter = Counter()
    n_missing = 0
    n_oov = 0

    for row in gold_rows:
        qtype = row["question_type"]
        gold_answer = row["answer"]
        totals[qtype] += 1
        predicted = preds.get(int(row["question_id"]))
        if predicted is None:
            n_missing += 1
            confusion[(gold_answer, MISSING)] += 1
            continue
        key = canonicalize(predicted)
        if key not in _CANONICAL_VOCAB:
            n_oov += 1
            confusion[(gold_answer, str(predicted))] += 1
            continue
        display = _CANONICAL_VOCAB[key]
        confusion[(gold_answer, display)] += 1
        if key == canonicalize(gold_answer):
            corrects[qtype] += 1

    n_scored = sum(totals.values())
    overall = sum(corrects.values()) / n_scored if n_scored else 0.0
    return EvalReport(
        overall_accuracy=overall,
        per_type_accuracy={t: corrects[t] / totals[t] for t in sorted(totals)},
        per_type_counts={t: totals[t] for t in sorted(totals)},
        n_scored=n_scored,
        n_missing=n_missing,
        n_out_of_vocabulary=n_oov,
        answer_confusion=dict(confusion),
    )


def baseline_random(gold, seed: int = 0, n_trials: int = 10, vocabulary=None) -> float:
    """Mean accuracy of uniform draws over the answer vocabulary.

    ``vocabulary`` is a test hook; the default is the full 47-word set.
    """
    if n_trials < 1:
        raise InvalidArgumentError("n_trials must be at least 1")
    gold_rows = _load_gold(gold)
    vocab = list(vocabulary) if vocabulary is not None else list(ANSWER_VOCABULARY)
    keys = [canonicalize(v) for v in vocab]
    gold_keys = [canonicalize(r["answer"]) for r in gold_rows]

    accuracies = []
    for trial in range(n_trials):
        stream = SeedStream(mix64(seed, trial))
        draws = (stream.uniform_array(len(gold_keys)) * len(keys)).astype(int)
        hits = sum(1 for g, d in zip(gold_keys, draws) if keys[d] == g)
        accuracies.append(hits / len(gold_keys) if gold_keys else 0.0)
    return float(sum(accuracies) / len(accuracies))


@dataclass
class MajorityBaselineResult:
    majority_answer: str
    report: EvalReport
    per_type_answers: dict[str, str]
    per_type_majority_accuracy: float


def baseline_majority(train, gold) -> MajorityBaselineResult:
    """Predict the most frequent training answer everywhere.

    Ties break lexicographically.  The per-type variant (most frequent
    training answer within each question type) is reported as a secondary
    accuracy figure.
    """
    train_rows = _load_gold(train)
    if not train_rows:
        raise InvalidArgumentError("training question file is empty")
    gold_rows = _load_gold(gold)

    counts: Counter = Counter(r["answer"] for r in train_rows)
    majority = min(counts, key=lambda a: (-counts[a], a))

    by_type: dict[str, Counter] = {}
    for r in train_rows:
        by_type.setdefault(r["question_type"], Counter())[r["answer"]] += 1
    per_type_answers = {
        t: min(c, key=lambda a: (-c[a], a)) for t, c in sorted(by_type.items())
    }

    report = score({r["question_id"]: majority for r in gold_rows}, gold_rows)
    typed_preds = {
        r["question_id"]: per_type_answers.get(r["question_type"], majority) for r in gold_rows
    }
    typed_report = score(typed_preds, gold_rows)

    return MajorityBaselineResult(
        majority_answer=majority,
        report=report,
        per_type_answers=per_type_answers,
        per_type_majority_accuracy=typed_report.overall_accuracy,
    )
