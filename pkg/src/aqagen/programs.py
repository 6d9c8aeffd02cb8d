"""Functional question programs and their evaluation against a scene.

A program is a rooted DAG of catalog functions.  Leaves start from the
full scene; filters narrow a sound set, relations expand a single sound
back into a set, queries read one attribute, and aggregations produce
counts or booleans.  Evaluating the root yields the question's answer,
or the distinguished ill-posed outcome when a uniqueness requirement
fails (for example ``unique`` over two violins).

Node catalog (26 kinds):

=====================  ========  =======  ==========================
kind                   inputs    output   value_arg
=====================  ========  =======  ==========================
scene                  -         set      -
filter_instrument      set       set      instrument
filter_note            set       set      note
filter_brightness      set       set      brightness
filter_loudness        set       set      loudness
filter_global_position set       set      global position
unique                 set       sound    -
select_ordinal         set       sound    ordinal 1..10 (k-th by onset)
relate_before          sound     set      -
relate_after           sound     set      -
same_brightness        sound     set      -
same_loudness          sound     set      -
same_instrument        sound     set      -
same_note              sound     set      -
count                  set       int      -
exist                  set       bool     -
equal_integer          int,int   bool     -
less_than              int,int   bool     -
greater_than           int,int   bool     -
equal_attribute        attr,attr bool     -
query_instrument       sound     attr     -
query_note             sound     attr     -
query_brightness       sound     attr     -
query_loudness         sound     attr     -
query_absolute_position  sound   ordinal  -
query_relative_position  sound   ordinal  -
query_global_position    sound   attr     -
=====================  ========  =======  ==========================

``same_*`` excludes the referent ("how many OTHER sounds...").
``relate_*`` uses strict onset order over the whole scene.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .errors import ProgramError
from .scene import GlobalPosition, Scene
from .soundbank import Brightness, InstrumentFamily, Loudness, Note


class QuestionType(str, Enum):
    YES_NO = "yes_no"
    NOTE = "note"
    INSTRUMENT = "instrument"
    BRIGHTNESS = "brightness"
    LOUDNESS = "loudness"
    COUNTING = "counting"
    ABSOLUTE_POSITION = "absolute_position"
    RELATIVE_POSITION = "relative_position"
    GLOBAL_POSITION = "global_position"


ORDINAL_WORDS = (
    "first", "second", "third", "fourth", "fifth",
    "sixth", "seventh", "eighth", "ninth", "tenth",
)

# The 47-word answer vocabulary, grouped by question-type answer rows.
ANSWERS_BY_TYPE: dict[QuestionType, tuple[str, ...]] = {
    QuestionType.YES_NO: ("yes", "no"),
    QuestionType.NOTE: tuple(n.value for n in Note),
    QuestionType.INSTRUMENT: tuple(i.value for i in InstrumentFamily),
    QuestionType.BRIGHTNESS: tuple(b.value for b in Brightness),
    QuestionType.LOUDNESS: tuple(l.value for l in Loudness),
    QuestionType.COUNTING: tuple(str(c) for c in range(11)),
    QuestionType.ABSOLUTE_POSITION: ORDINAL_WORDS,
    QuestionType.RELATIVE_POSITION: ORDINAL_WORDS,
    QuestionType.GLOBAL_POSITION: tuple(g.value for g in GlobalPosition),
}

ANSWER_VOCABULARY: tuple[str, ...] = (
    ANSWERS_BY_TYPE[QuestionType.YES_NO]
    + ANSWERS_BY_TYPE[QuestionType.NOTE]
    + ANSWERS_BY_TYPE[QuestionType.INSTRUMENT]
    + ANSWERS_BY_TYPE[QuestionType.BRIGHTNESS]
    + ANSWERS_BY_TYPE[QuestionType.LOUDNESS]
    + ANSWERS_BY_TYPE[QuestionType.COUNTING]
    + ANSWERS_BY_TYPE[QuestionType.ABSOLUTE_POSITION]
    + ANSWERS_BY_TYPE[QuestionType.GLOBAL_POSITION]
)


class IllPosed:
    """Singleton outcome for questions whose referent resolution fails."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "IllPosed"

    def __bool__(self):
        return False


ILL_POSED = IllPosed()

# Value-type tags used by the static checker.
SET, SOUND, INT, BOOL, ATTR = "set", "sound", "int", "bool", "attr"

FILTER_DOMAINS = {
    "filter_instrument": InstrumentFamily,
    "filter_note": Note,
    "filter_brightness": Brightness,
    "filter_loudness": Loudness,
    "filter_global_position": GlobalPosition,
}

RELATIONAL_KINDS = frozenset(
    ["relate_before", "relate_after", "same_brightness", "same_loudness", "same_instrument", "same_note"]
)

# kind -> (input types, output type)
SIGNATURES: dict[str, tuple[tuple[str, ...], str]] = {
    "scene": ((), SET),
    **{k: ((SET,), SET) for k in FILTER_DOMAINS},
    "unique": ((SET,), SOUND),
    "select_ordinal": ((SET,), SOUND),
    **{k: ((SOUND,), SET) for k in RELATIONAL_KINDS},
    "count": ((SET,), INT),
    "exist": ((SET,), BOOL),
    "equal_integer": ((INT, INT), BOOL),
    "less_than": ((INT, INT), BOOL),
    "greater_than": ((INT, INT), BOOL),
    "equal_attribute": ((ATTR, ATTR), BOOL),
    "query_instrument": ((SOUND,), ATTR),
    "query_note": ((SOUND,), ATTR),
    "query_brightness": ((SOUND,), ATTR),
    "query_loudness": ((SOUND,), ATTR),
    "query_absolute_position": ((SOUND,), ATTR),
    "query_relative_position": ((SOUND,), ATTR),
    "query_global_position": ((SOUND,), ATTR),
}

ANSWER_OUTPUT_TYPES = frozenset([INT, BOOL, ATTR])


@dataclass(frozen=True)
class ProgramNode:
    kind: str
    inputs: tuple[int, ...] = ()
    value_arg: object = None

    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind, "inputs": list(self.inputs)}
        if self.value_arg is not None:
            v = self.value_arg
            d["value_arg"] = v.value if isinstance(v, Enum) else v
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ProgramNode":
        return cls(kind=d["kind"], inputs=tuple(d.get("inputs", ())), value_arg=d.get("value_arg"))


@dataclass(frozen=True)
class Program:
    """Node list forming a rooted DAG; children precede parents, root is last."""

    nodes: tuple[ProgramNode, ...]
    root: int = field(default=-1)

    def __post_init__(self):
        if self.root == -1:
            object.__setattr__(self, "root", len(self.nodes) - 1)

    def to_json(self) -> list:
        return [n.to_dict() for n in self.nodes]

    @classmethod
    def from_json(cls, data: list) -> "Program":
        return cls(nodes=tuple(ProgramNode.from_dict(d) for d in data))


def _coerce_value_arg(kind: str, value):
    if kind in FILTER_DOMAINS:
        try:
            return FILTER_DOMAINS[kind](value)
        except ValueError:
            raise ProgramError(f"{kind} value_arg {value!r} is not in its attribute domain") from None
    if kind == "select_ordinal":
        if not isinstance(value, int) or isinstance(value, bool) or not 1 <= value <= 10:
            raise ProgramError(f"select_ordinal value_arg must be an integer in 1..10, got {value!r}")
        return value
    raise ProgramError(f"{kind} does not take a value_arg (got {value!r})")


def validate(program: Program) -> None:
    """Check structure and types; raise ProgramError on any violation."""
    nodes = program.nodes
    if not nodes:
        raise ProgramError("program has no nodes")
    if program.root != len(nodes) - 1:
        raise ProgramError("root must be the final node")
    for i, node in enumerate(nodes):
        sig = SIGNATURES.get(node.kind)
        if sig is None:
            raise ProgramError(f"node {i}: unknown kind {node.kind!r}")
        in_types, _ = sig
        if len(node.inputs) != len(in_types):
            raise ProgramError(
                f"node {i} ({node.kind}): expected {len(in_types)} inputs, got {len(node.inputs)}"
            )
        for slot, j in enumerate(node.inputs):
            if not 0 <= j < i:
                raise ProgramError(f"node {i} ({node.kind}): input {j} does not precede it")
            got = SIGNATURES[nodes[j].kind][1]
            if got != in_types[slot]:
                raise ProgramError(
                    f"node {i} ({node.kind}): input {slot} has type {got}, expected {in_types[slot]}"
                )
        needs_value = node.kind in FILTER_DOMAINS or node.kind == "select_ordinal"
        if needs_value and node.value_arg is None:
            raise ProgramError(f"node {i} ({node.kind}): missing value_arg")
        if not needs_value and node.value_arg is not None:
            raise ProgramError(f"node {i} ({node.kind}): unexpected value_arg")
        if needs_value:
            _coerce_value_arg(node.kind, node.value_arg)
    if SIGNATURES[nodes[program.root].kind][1] not in ANSWER_OUTPUT_TYPES:
        raise ProgramError(
            f"root kind {nodes[program.root].kind!r} does not produce an answer type"
        )


def _sound_attr(sound, kind: str):
    if kind.endswith("instrument"):
        return sound.instrument.value
    if kind.endswith("note"):
        return sound.note.value
    if kind.endswith("brightness"):
        return sound.brightness.value
    if kind.endswith("loudness"):
        return sound.loudness.value
    if kind.endswith("global_position"):
        return sound.global_position.value
    raise ProgramError(f"no attribute accessor for {kind}")


def _evaluate(program: Program, scene: Scene, relax_node: int | None = None):
    """Bottom-up evaluation; ``relax_node`` replaces one relational node by
    "all sounds except the referent" (used by the degeneracy check)."""
    sounds = scene.sounds  # onset order
    values: list[object] = []
    for i, node in enumerate(program.nodes):
        args = [values[j] for j in node.inputs]
        if any(a is ILL_POSED for a in args):
            values.append(ILL_POSED)
            continue
        kind = node.kind
        if kind == "scene":
            v = list(sounds)
        elif kind in FILTER_DOMAINS:
            want = _coerce_value_arg(kind, node.value_arg).value
            v = [s for s in args[0] if _sound_attr(s, kind) == want]
        elif kind == "unique":
            v = args[0][0] if len(args[0]) == 1 else ILL_POSED
        elif kind == "select_ordinal":
            k = _coerce_value_arg(kind, node.value_arg)
            v = args[0][k - 1] if len(args[0]) >= k else ILL_POSED
        elif kind in RELATIONAL_KINDS:
            ref = args[0]
            if i == relax_node:
                v = [s for s in sounds if s is not ref]
            elif kind == "relate_before":
                v = [s for s in sounds if s.onset_s < ref.onset_s]
            elif kind == "relate_after":
                v = [s for s in sounds if s.onset_s > ref.onset_s]
            else:  # same_<attr>, referent excluded
                v = [s for s in sounds if s is not ref and _sound_attr(s, kind) == _sound_attr(ref, kind)]
        elif kind == "count":
            v = len(args[0])
        elif kind == "exist":
            v = "yes" if args[0] else "no"
        elif kind == "equal_integer":
            v = "yes" if args[0] == args[1] else "no"
        elif kind == "less_than":
            v = "yes" if args[0] < args[1] else "no"
        elif kind == "greater_than":
            v = "yes" if args[0] > args[1] else "no"
        elif kind == "equal_attribute":
            v = "yes" if args[0] == args[1] else "no"
        elif kind == "query_absolute_position":
            v = ORDINAL_WORDS[args[0].absolute_position - 1]
        elif kind == "query_relative_position":
            v = ORDINAL_WORDS[args[0].relative_position - 1]
        elif kind.startswith("query_"):
            v = _sound_attr(args[0], kind)
        else:
            raise ProgramError(f"unhandled kind {kind!r}")
        values.append(v)

    result = values[program.root]
    if result is ILL_POSED:
        return ILL_POSED
    if isinstance(result, int):
        return str(result)
    return result


def execute(program: Program, scene: Scene):
    """Evaluate a program; returns an answer string or ILL_POSED."""
    validate(program)
    return _evaluate(program, scene)


def check_degenerate(program: Program, scene: Scene) -> bool:
    """True iff some relation in the program is not load-bearing.

    For each relational node, the node is replaced by "every sound except
    the referent" and the program re-evaluated; if any variant still
    resolves and yields the same answer, the question could be answered
    without that relation and is rejected as degenerate.
    """
    validate(program)
    baseline = _evaluate(program, scene)
    if baseline is ILL_POSED:
        raise ProgramError("degeneracy is undefined for ill-posed programs")
    for i, node in enumerate(program.nodes):
        if node.kind in RELATIONAL_KINDS:
            relaxed = _evaluate(program, scene, relax_node=i)
            if relaxed is not ILL_POSED and relaxed == baseline:
                return True
    return False
