"""Question templates: instantiation, validation, and balanced generation.

A template pairs natural-language text containing typed placeholders with
a program skeleton whose value arguments reference the same placeholders.
Placeholder kinds: ``I`` instrument, ``N`` note, ``B`` brightness, ``L``
loudness, ``GP`` scene part, ``ORD`` ordinal, ``REL`` before/after (the
relation placeholder selects the node kind rather than a value).

Generation is rejection sampling per scene: draw a template and bindings,
instantiate, evaluate; drop ill-posed outcomes, drop degenerate relational
questions, and cap how often any single answer may recur per question
type within the scene.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

from .errors import InvalidArgumentError, InvalidBindingError, PartialGenerationWarning
from .programs import (
    ORDINAL_WORDS,
    ILL_POSED,
    Program,
    ProgramNode,
    QuestionType,
    check_degenerate,
    execute,
    validate,
)
from .rng import SeedStream, QUESTION_SALT, mix64
from .scene import GlobalPosition, Scene
from .soundbank import Brightness, InstrumentFamily, Loudness, Note

BINDING_DOMAINS: dict[str, tuple] = {
    "instrument": tuple(i.value for i in InstrumentFamily),
    "note": tuple(n.value for n in Note),
    "brightness": tuple(b.value for b in Brightness),
    "loudness": tuple(l.value for l in Loudness),
    "global_position": tuple(g.value for g in GlobalPosition),
    "ordinal": (1, 2, 3, 4),
    "relation": ("before", "after"),
}

_PLACEHOLDER_DOMAIN = {
    "I": "instrument",
    "N": "note",
    "B": "brightness",
    "L": "loudness",
    "GP": "global_position",
    "ORD": "ordinal",
    "REL": "relation",
}


def _domain_of(placeholder: str) -> str:
    stem = placeholder.rstrip("0123456789")
    try:
        return _PLACEHOLDER_DOMAIN[stem]
    except KeyError:
        raise InvalidBindingError(f"unknown placeholder {placeholder!r}") from None


@dataclass(frozen=True)
class Template:
    """Text with placeholders plus the program skeleton they feed."""

    template_id: str
    question_type: QuestionType
    text: str
    skeleton: tuple[dict, ...]
    binding_slots: tuple[tuple[str, str], ...]  # (placeholder, domain name)
    distinct_groups: tuple[tuple[tuple[str, ...], ...], ...] = ()


def _n(kind: str, value=None, *inputs: int) -> dict:
    return {"kind": kind, "value": value, "inputs": inputs}


def _slots(*names: str) -> tuple[tuple[str, str], ...]:
    return tuple((name, _domain_of(name)) for name in names)


def _render(placeholder: str, value) -> str:
    if _domain_of(placeholder) == "ordinal":
        return ORDINAL_WORDS[value - 1]
    return str(value)


def instantiate(template: Template, bindings: dict) -> tuple[str, Program]:
    """Substitute bindings into text and skeleton; returns (text, program)."""
    for placeholder, domain in template.binding_slots:
        if placeholder not in bindings:
            raise InvalidBindingError(f"missing binding for <{placeholder}>")
        if bindings[placeholder] not in BINDING_DOMAINS[domain]:
            raise InvalidBindingError(
                f"binding <{placeholder}>={bindings[placeholder]!r} is not a valid {domain}"
            )

    text = template.text
    for placeholder, _ in template.binding_slots:
        text = text.replace(f"<{placeholder}>", _render(placeholder, bindings[placeholder]))

    def lookup(placeholder: str):
        try:
            return bindings[placeholder]
        except KeyError:
            raise InvalidBindingError(
                f"skeleton references <{placeholder}> which is not a binding slot"
            ) from None

    nodes = []
    for spec in template.skeleton:
        kind, value = spec["kind"], spec["value"]
        if kind.startswith("relate:"):
            kind = f"relate_{lookup(kind.split(':', 1)[1])}"
        if isinstance(value, str) and value.startswith("<") and value.endswith(">"):
            value = lookup(value[1:-1])
        nodes.append(ProgramNode(kind=kind, inputs=tuple(spec["inputs"]), value_arg=value))
    program = Program(nodes=tuple(nodes))
    validate(program)
    return text, program


def _bindings_distinct(template: Template, bindings: dict) -> bool:
    for group in template.distinct_groups:
        seen = [tuple(bindings[p] for p in member) for member in group]
        if len(set(seen)) != len(seen):
            return False
    return True


def builtin_catalog() -> list[Template]:
    """The built-in template inventory: 31 templates over the nine types."""
    T, QT = Template, QuestionType
    catalog = [
        # --- yes/no ---
        T("yn_equal_count", QT.YES_NO,
          "Is there an equal number of <L1> <I1> sounds and <L2> <I2> sounds?",
          (_n("scene"),
           _n("filter_loudness", "<L1>", 0), _n("filter_instrument", "<I1>", 1), _n("count", None, 2),
           _n("filter_loudness", "<L2>", 0), _n("filter_instrument", "<I2>", 4), _n("count", None, 5),
           _n("equal_integer", None, 3, 6)),
          _slots("L1", "I1", "L2", "I2"),
          ((("L1", "I1"), ("L2", "I2")),)),
        T("yn_as_loud_as", QT.YES_NO,
          "Is the <I1> as loud as the <I2>?",
          (_n("scene"),
           _n("filter_instrument", "<I1>", 0), _n("unique", None, 1), _n("query_loudness", None, 2),
           _n("filter_instrument", "<I2>", 0), _n("unique", None, 4), _n("query_loudness", None, 5),
           _n("equal_attribute", None, 3, 6)),
          _slots("I1", "I2"),
          ((("I1",), ("I2",)),)),
        T("yn_exist", QT.YES_NO,
          "Is there a <B1> <I1> sound?",
          (_n("scene"), _n("filter_brightness", "<B1>", 0),
           _n("filter_instrument", "<I1>", 1), _n("exist", None, 2)),
          _slots("B1", "I1")),
        T("yn_more_than", QT.YES_NO,
          "Are there more <I1> sounds than <I2> sounds?",
          (_n("scene"),
           _n("filter_instrument", "<I1>", 0), _n("count", None, 1),
           _n("filter_instrument", "<I2>", 0), _n("count", None, 3),
           _n("greater_than", None, 2, 4)),
          _slots("I1", "I2"),
          ((("I1",), ("I2",)),)),
        T("yn_fewer_than", QT.YES_NO,
          "Are there fewer <L1> sounds than <B1> sounds?",
          (_n("scene"),
           _n("filter_loudness", "<L1>", 0), _n("count", None, 1),
           _n("filter_brightness", "<B1>", 0), _n("count", None, 3),
           _n("less_than", None, 2, 4)),
          _slots("L1", "B1")),
        T("yn_same_part", QT.YES_NO,
          "Are the <ORD1> <I1> and the <ORD2> <I2> in the same part of the scene?",
          (_n("scene"),
           _n("filter_instrument", "<I1>", 0), _n("select_ordinal", "<ORD1>", 1),
           _n("query_global_position", None, 2),
           _n("filter_instrument", "<I2>", 0), _n("select_ordinal", "<ORD2>", 4),
           _n("query_global_position", None, 5),
           _n("equal_attribute", None, 3, 6)),
          _slots("ORD1", "I1", "ORD2", "I2"),
          ((("ORD1", "I1"), ("ORD2", "I2")),)),
        T("yn_same_brightness", QT.YES_NO,
          "Do the <ORD1> <I1> and the <ORD2> <I2> have the same brightness?",
          (_n("scene"),
           _n("filter_instrument", "<I1>", 0), _n("select_ordinal", "<ORD1>", 1),
           _n("query_brightness", None, 2),
           _n("filter_instrument", "<I2>", 0), _n("select_ordinal", "<ORD2>", 4),
           _n("query_brightness", None, 5),
           _n("equal_attribute", None, 3, 6)),
          _slots("ORD1", "I1", "ORD2", "I2"),
          ((("ORD1", "I1"), ("ORD2", "I2")),)),
        # --- note ---
        T("note_after_ref", QT.NOTE,
          "What is the note played by the <I1> that is <REL1> the <L1> <B1> <N1> note?",
          (_n("scene"),
           _n("filter_loudness", "<L1>", 0), _n("filter_brightness", "<B1>", 1),
           _n("filter_note", "<N1>", 2), _n("unique", None, 3),
           _n("relate:REL1", None, 4),
           _n("filter_instrument", "<I1>", 5), _n("unique", None, 6),
           _n("query_note", None, 7)),
          _slots("I1", "REL1", "L1", "B1", "N1")),
        T("note_of_ordinal", QT.NOTE,
          "What note does the <ORD1> <I1> play?",
          (_n("scene"), _n("filter_instrument", "<I1>", 0),
           _n("select_ordinal", "<ORD1>", 1), _n("query_note", None, 2)),
          _slots("ORD1", "I1")),
        T("note_in_part", QT.NOTE,
          "What is the note of the <L1> sound in the <GP1> of the scene?",
          (_n("scene"), _n("filter_global_position", "<GP1>", 0),
           _n("filter_loudness", "<L1>", 1), _n("unique", None, 2),
           _n("query_note", None, 3)),
          _slots("L1", "GP1")),
        # --- instrument ---
        T("instr_in_part", QT.INSTRUMENT,
          "What instrument plays a <B1> <L1> sound in the <GP1> of the scene?",
          (_n("scene"), _n("filter_brightness", "<B1>", 0),
           _n("filter_loudness", "<L1>", 1), _n("filter_global_position", "<GP1>", 2),
           _n("unique", None, 3), _n("query_instrument", None, 4)),
          _slots("B1", "L1", "GP1")),
        T("instr_ordinal", QT.INSTRUMENT,
          "What instrument plays the <ORD1> <L1> sound?",
          (_n("scene"), _n("filter_loudness", "<L1>", 0),
           _n("select_ordinal", "<ORD1>", 1), _n("query_instrument", None, 2)),
          _slots("ORD1", "L1")),
        T("instr_relational", QT.INSTRUMENT,
          "What instrument is playing <REL1> the <B1> <N1> note?",
          (_n("scene"), _n("filter_brightness", "<B1>", 0),
           _n("filter_note", "<N1>", 1), _n("unique", None, 2),
           _n("relate:REL1", None, 3), _n("unique", None, 4),
           _n("query_instrument", None, 5)),
          _slots("REL1", "B1", "N1")),
        # --- brightness ---
        T("bright_ordinal", QT.BRIGHTNESS,
          "What is the brightness of the <ORD1> <I1> sound?",
          (_n("scene"), _n("filter_instrument", "<I1>", 0),
           _n("select_ordinal", "<ORD1>", 1), _n("query_brightness", None, 2)),
          _slots("ORD1", "I1")),
        T("bright_note_instr", QT.BRIGHTNESS,
          "What is the brightness of the <N1> note played by the <I1>?",
          (_n("scene"), _n("filter_instrument", "<I1>", 0),
           _n("filter_note", "<N1>", 1), _n("unique", None, 2),
           _n("query_brightness", None, 3)),
          _slots("N1", "I1")),
        T("bright_relational", QT.BRIGHTNESS,
          "What is the brightness of the <I1> playing <REL1> the <ORD1> <I2>?",
          (_n("scene"), _n("filter_instrument", "<I2>", 0),
           _n("select_ordinal", "<ORD1>", 1), _n("relate:REL1", None, 2),
           _n("filter_instrument", "<I1>", 3), _n("unique", None, 4),
           _n("query_brightness", None, 5)),
          _slots("I1", "REL1", "ORD1", "I2")),
        # --- loudness ---
        T("loud_relational", QT.LOUDNESS,
          "What is the loudness of the <I1> playing <REL1> the <ORD1> <I2>?",
          (_n("scene"), _n("filter_instrument", "<I2>", 0),
           _n("select_ordinal", "<ORD1>", 1), _n("relate:REL1", None, 2),
           _n("filter_instrument", "<I1>", 3), _n("unique", None, 4),
           _n("query_loudness", None, 5)),
          _slots("I1", "REL1", "ORD1", "I2")),
        T("loud_ordinal", QT.LOUDNESS,
          "What is the loudness of the <ORD1> <I1> sound?",
          (_n("scene"), _n("filter_instrument", "<I1>", 0),
           _n("select_ordinal", "<ORD1>", 1), _n("query_loudness", None, 2)),
          _slots("ORD1", "I1")),
        # --- counting ---
        T("count_same_brightness", QT.COUNTING,
          "How many other sounds have the same brightness as the <ORD1> <I1>?",
          (_n("scene"), _n("filter_instrument", "<I1>", 0),
           _n("select_ordinal", "<ORD1>", 1), _n("same_brightness", None, 2),
           _n("count", None, 3)),
          _slots("ORD1", "I1")),
        T("count_instrument", QT.COUNTING,
          "How many <I1> sounds are there?",
          (_n("scene"), _n("filter_instrument", "<I1>", 0), _n("count", None, 1)),
          _slots("I1",)),
        T("count_after", QT.COUNTING,
          "How many sounds play <REL1> the <ORD1> <I1>?",
          (_n("scene"), _n("filter_instrument", "<I1>", 0),
           _n("select_ordinal", "<ORD1>", 1), _n("relate:REL1", None, 2),
           _n("count", None, 3)),
          _slots("REL1", "ORD1", "I1")),
        T("count_same_note", QT.COUNTING,
          "How many other sounds play the same note as the <ORD1> <I1>?",
          (_n("scene"), _n("filter_instrument", "<I1>", 0),
           _n("select_ordinal", "<ORD1>", 1), _n("same_note", None, 2),
           _n("count", None, 3)),
          _slots("ORD1", "I1")),
        # --- absolute position ---
        T("abs_after_note", QT.ABSOLUTE_POSITION,
          "What is the position of the <N1> note playing <REL1> the <B1> <N2> note?",
          (_n("scene"), _n("filter_brightness", "<B1>", 0),
           _n("filter_note", "<N2>", 1), _n("unique", None, 2),
           _n("relate:REL1", None, 3), _n("filter_note", "<N1>", 4),
           _n("unique", None, 5), _n("query_absolute_position", None, 6)),
          _slots("N1", "REL1", "B1", "N2")),
        T("abs_ordinal", QT.ABSOLUTE_POSITION,
          "What is the position of the <ORD1> <I1> sound?",
          (_n("scene"), _n("filter_instrument", "<I1>", 0),
           _n("select_ordinal", "<ORD1>", 1), _n("query_absolute_position", None, 2)),
          _slots("ORD1", "I1")),
        T("abs_loud_part", QT.ABSOLUTE_POSITION,
          "What is the position of the <L1> sound in the <GP1> of the scene?",
          (_n("scene"), _n("filter_global_position", "<GP1>", 0),
           _n("filter_loudness", "<L1>", 1), _n("unique", None, 2),
           _n("query_absolute_position", None, 3)),
          _slots("L1", "GP1")),
        # --- relative position ---
        T("rel_note_among", QT.RELATIVE_POSITION,
          "Among the <I1> sounds which one is a <N1>?",
          (_n("scene"), _n("filter_instrument", "<I1>", 0),
           _n("filter_note", "<N1>", 1), _n("unique", None, 2),
           _n("query_relative_position", None, 3)),
          _slots("I1", "N1")),
        T("rel_part_among", QT.RELATIVE_POSITION,
          "Among the <I1> sounds which one plays in the <GP1> of the scene?",
          (_n("scene"), _n("filter_instrument", "<I1>", 0),
           _n("filter_global_position", "<GP1>", 1), _n("unique", None, 2),
           _n("query_relative_position", None, 3)),
          _slots("I1", "GP1")),
        T("rel_relational", QT.RELATIVE_POSITION,
          "Among the <I1> sounds which one is playing <REL1> the <B1> <N1> note?",
          (_n("scene"), _n("filter_brightness", "<B1>", 0),
           _n("filter_note", "<N1>", 1), _n("unique", None, 2),
           _n("relate:REL1", None, 3), _n("filter_instrument", "<I1>", 4),
           _n("unique", None, 5), _n("query_relative_position", None, 6)),
          _slots("I1", "REL1", "B1", "N1")),
        # --- global position ---
        T("glob_relational", QT.GLOBAL_POSITION,
          "In what part of the scene is the <I1> playing a <N1> note that is <REL1> the <ORD1> <I2> sound?",
          (_n("scene"), _n("filter_instrument", "<I2>", 0),
           _n("select_ordinal", "<ORD1>", 1), _n("relate:REL1", None, 2),
           _n("filter_instrument", "<I1>", 3), _n("filter_note", "<N1>", 4),
           _n("unique", None, 5), _n("query_global_position", None, 6)),
          _slots("I1", "N1", "REL1", "ORD1", "I2")),
        T("glob_ordinal", QT.GLOBAL_POSITION,
          "In what part of the scene is the <ORD1> <I1> playing?",
          (_n("scene"), _n("filter_instrument", "<I1>", 0),
           _n("select_ordinal", "<ORD1>", 1), _n("query_global_position", None, 2)),
          _slots("ORD1", "I1")),
        T("glob_note", QT.GLOBAL_POSITION,
          "In what part of the scene is the <B1> <N1> note playing?",
          (_n("scene"), _n("filter_brightness", "<B1>", 0),
           _n("filter_note", "<N1>", 1), _n("unique", None, 2),
           _n("query_global_position", None, 3)),
          _slots("B1", "N1")),
    ]
    return catalog


@dataclass(frozen=True)
class QuestionRecord:
    question_id: int
    scene_id: int
    question_type: QuestionType
    text: str
    program: Program
    answer: str
    template_id: str
    bindings: dict

    def to_dict(self) -> dict:
        return {
            "question_id": self.question_id,
            "scene_id": self.scene_id,
            "question_type": self.question_type.value,
            "text": self.text,
            "program": self.program.to_json(),
            "answer": self.answer,
            "template_id": self.template_id,
            "bindings": dict(self.bindings),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "QuestionRecord":
        return cls(
            question_id=int(d["question_id"]),
            scene_id=int(d["scene_id"]),
            question_type=QuestionType(d["question_type"]),
            text=d["text"],
            program=Program.from_json(d["program"]),
            answer=d["answer"],
            template_id=d["template_id"],
            bindings=dict(d.get("bindings", {})),
        )


def generate_questions(
    scene: Scene,
    catalog: list[Template],
    n_questions: int,
    seed: int,
    cap_fraction: float = 0.5,
    max_attempts: int | None = None,
) -> list[QuestionRecord]:
    """Generate validated questions for one scene.

    Deterministic per (scene, seed).  If the attempt budget runs out before
    ``n_questions`` are accepted, the partial list is returned and a
    ``PartialGenerationWarning`` is issued; answers are never fabricated.
    """
    if n_questions < 1:
        raise InvalidArgumentError("n_questions must be >= 1")
    if not catalog:
        raise InvalidArgumentError("catalog must be non-empty")
    if max_attempts is None:
        max_attempts = 200 * n_questions

    stream = SeedStream(mix64(QUESTION_SALT, seed, scene.scene_id))
    accepted: list[QuestionRecord] = []
    # per question type: answer -> count among accepted questions of that type
    tallies: dict[QuestionType, dict[str, int]] = {}

    attempts = 0
    while len(accepted) < n_questions and attempts < max_attempts:
        attempts += 1
        template = catalog[stream.randint(len(catalog))]
        bindings = {
            placeholder: BINDING_DOMAINS[domain][stream.randint(len(BINDING_DOMAINS[domain]))]
            for placeholder, domain in template.binding_slots
        }
        if not _bindings_distinct(template, bindings):
            continue
        text, program = instantiate(template, bindings)
        answer = execute(program, scene)
        if answer is ILL_POSED:
            continue
        if check_degenerate(program, scene):
            continue
        tally = tallies.setdefault(template.question_type, {})
        n_type = sum(tally.values())
        if tally.get(answer, 0) + 1 > max(1.0, cap_fraction * (n_type + 1)):
            continue
        tally[answer] = tally.get(answer, 0) + 1
        accepted.append(
            QuestionRecord(
                question_id=len(accepted),
                scene_id=scene.scene_id,
                question_type=template.question_type,
                text=text,
                program=program,
                answer=answer,
                template_id=template.template_id,
                bindings=bindings,
            )
        )

    if len(accepted) < n_questions:
        warnings.warn(
            PartialGenerationWarning(
                f"scene {scene.scene_id}: accepted {len(accepted)}/{n_questions} "
                f"questions after {attempts} attempts"
            )
        )
    return accepted
