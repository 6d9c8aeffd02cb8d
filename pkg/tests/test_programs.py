"""The question-program DSL: evaluation semantics, typing, degeneracy."""

import random

import pytest

from aqagen.errors import ProgramError
from aqagen.programs import (
    ANSWER_VOCABULARY,
    ANSWERS_BY_TYPE,
    ILL_POSED,
    ORDINAL_WORDS,
    Program,
    ProgramNode,
    QuestionType,
    check_degenerate,
    execute,
    validate,
)
from aqagen.scene import compose_scene

from conftest import build_scene, prog
from program_gen import FILTER_CHOICES, random_program


def test_count_filtered_instruments(mixed_scene):
    # brute-force count over the fixture rows: cellos at indexes 0, 2, 5
    p = prog(("scene", None), ("filter_instrument", "cello", 0), ("count", None, 1))
    assert execute(p, mixed_scene) == "3"


def test_exist_empty_set_is_no(mixed_scene):
    p = prog(("scene", None), ("filter_note", "F", 0), ("exist", None, 1))
    assert execute(p, mixed_scene) == "no"


def test_unique_over_two_violins_is_ill_posed(mixed_scene):
    # uniqueness fails (two violins), so the downstream query never resolves
    p = prog(("scene", None), ("filter_instrument", "violin", 0),
             ("unique", None, 1), ("query_note", None, 2))
    assert execute(p, mixed_scene) is ILL_POSED


def test_equal_number_program_yes_on_two_and_two():
    scene = build_scene([
        ("cello", "A", "bright", "loud"),
        ("cello", "B", "dark", "loud"),
        ("clarinet", "C", "dark", "quiet"),
        ("clarinet", "D", "bright", "quiet"),
        ("flute", "E", "bright", "loud"),
        ("flute", "F", "dark", "quiet"),
        ("violin", "G", "bright", "loud"),
        ("violin", "A#", "dark", "quiet"),
        ("trumpet", "C#", "bright", "loud"),
        ("trumpet", "D#", "dark", "quiet"),
    ])
    p = prog(
        ("scene", None),
        ("filter_loudness", "loud", 0),
        ("filter_instrument", "cello", 1),
        ("count", None, 2),
        ("filter_loudness", "quiet", 0),
        ("filter_instrument", "clarinet", 4),
        ("count", None, 5),
        ("equal_integer", None, 3, 6),
    )
    assert execute(p, scene) == "yes"


def test_select_ordinal_and_queries(mixed_scene):
    # 3rd-by-onset sound is the 2nd cello: absolute 3, relative 2
    p = prog(("scene", None), ("filter_instrument", "cello", 0),
             ("select_ordinal", 2, 1), ("query_absolute_position", None, 2))
    assert execute(p, mixed_scene) == "third"
    p = prog(("scene", None), ("filter_instrument", "cello", 0),
             ("select_ordinal", 2, 1), ("query_relative_position", None, 2))
    assert execute(p, mixed_scene) == "second"
    p = prog(("scene", None), ("filter_instrument", "cello", 0),
             ("select_ordinal", 4, 1), ("query_note", None, 2))
    assert execute(p, mixed_scene) is ILL_POSED  # only 3 cellos


def test_relate_partition(mixed_scene):
    for idx in range(10):
        ref = prog(("scene", None), ("select_ordinal", idx + 1, 0),
                   ("relate_before", None, 1), ("count", None, 2))
        before = int(execute(ref, mixed_scene))
        ref = prog(("scene", None), ("select_ordinal", idx + 1, 0),
                   ("relate_after", None, 1), ("count", None, 2))
        after = int(execute(ref, mixed_scene))
        assert before == idx
        assert before + 1 + after == 10


def test_same_excludes_referent(mixed_scene):
    # first sound is bright; 4 other bright sounds in the fixture
    p = prog(("scene", None), ("select_ordinal", 1, 0),
             ("same_brightness", None, 1), ("count", None, 2))
    assert execute(p, mixed_scene) == "4"


def test_filters_commute(mixed_scene):
    a = prog(("scene", None), ("filter_brightness", "bright", 0),
             ("filter_loudness", "loud", 1), ("count", None, 2))
    b = prog(("scene", None), ("filter_loudness", "loud", 0),
             ("filter_brightness", "bright", 1), ("count", None, 2))
    assert execute(a, mixed_scene) == execute(b, mixed_scene)


def test_count_full_scene_and_exist_equivalence(mixed_scene):
    p = prog(("scene", None), ("count", None, 0))
    assert execute(p, mixed_scene) == "10"
    for kind, domain in FILTER_CHOICES:
        for value in domain:
            c = prog(("scene", None), (kind, value, 0), ("count", None, 1))
            e = prog(("scene", None), (kind, value, 0), ("exist", None, 1))
            assert (execute(e, mixed_scene) == "yes") == (int(execute(c, mixed_scene)) >= 1)


def test_absolute_position_bijection(mixed_scene):
    seen = set()
    for idx in range(10):
        p = prog(("scene", None), ("select_ordinal", idx + 1, 0),
                 ("query_absolute_position", None, 1))
        seen.add(execute(p, mixed_scene))
    assert seen == set(ORDINAL_WORDS)


def test_vocabulary_has_47_entries_partitioned():
    assert len(ANSWER_VOCABULARY) == 47
    assert len(set(ANSWER_VOCABULARY)) == 47
    sizes = {qt: len(ANSWERS_BY_TYPE[qt]) for qt in QuestionType}
    assert sizes[QuestionType.YES_NO] == 2
    assert sizes[QuestionType.NOTE] == 12
    assert sizes[QuestionType.INSTRUMENT] == 5
    assert sizes[QuestionType.BRIGHTNESS] == 2
    assert sizes[QuestionType.LOUDNESS] == 2
    assert sizes[QuestionType.COUNTING] == 11
    assert sizes[QuestionType.ABSOLUTE_POSITION] == 10
    assert sizes[QuestionType.RELATIVE_POSITION] == 10
    assert sizes[QuestionType.GLOBAL_POSITION] == 3


def test_execute_outputs_stay_in_vocabulary():
    rng = random.Random(202)
    vocab = set(ANSWER_VOCABULARY)
    for trial in range(300):
        scene = compose_scene(trial % 20, 5)
        result = execute(random_program(rng), scene)
        assert result is ILL_POSED or result in vocab


# --- structural validation ---

def test_malformed_arity_rejected():
    p = prog(("scene", None), ("count", None, 0), ("unique", None, 0, 1))
    with pytest.raises(ProgramError):
        validate(p)


def test_forward_reference_rejected():
    p = Program(nodes=(
        ProgramNode(kind="count", inputs=(1,)),
        ProgramNode(kind="scene"),
        ProgramNode(kind="exist", inputs=(1,)),
    ))
    with pytest.raises(ProgramError):
        validate(p)


def test_filter_requires_matching_value_arg():
    with pytest.raises(ProgramError):
        validate(prog(("scene", None), ("filter_instrument", "piano", 0), ("count", None, 1)))
    with pytest.raises(ProgramError):
        validate(prog(("scene", None), ("filter_instrument", None, 0), ("count", None, 1)))
    with pytest.raises(ProgramError):
        validate(prog(("scene", None), ("count", "cello", 0)))


def test_root_must_be_answer_typed(mixed_scene):
    p = prog(("scene", None), ("filter_note", "A", 0))  # set-valued root
    with pytest.raises(ProgramError):
        execute(p, mixed_scene)


def test_type_mismatch_rejected():
    # unique consumes a set, not a sound
    p = prog(("scene", None), ("unique", None, 0), ("unique", None, 1),
             ("query_note", None, 2))
    with pytest.raises(ProgramError):
        validate(p)


def test_serialization_round_trip(mixed_scene):
    p = prog(("scene", None), ("filter_instrument", "cello", 0),
             ("select_ordinal", 2, 1), ("query_brightness", None, 2))
    again = Program.from_json(p.to_json())
    assert again == p
    assert execute(again, mixed_scene) == execute(p, mixed_scene)


# --- degeneracy ---

def _after_trumpet_position_program():
    return prog(
        ("scene", None),
        ("filter_instrument", "trumpet", 0),
        ("unique", None, 1),
        ("relate_after", None, 2),
        ("filter_instrument", "violin", 4 - 1),
        ("unique", None, 4),
        ("query_absolute_position", None, 5),
    )


def test_degenerate_single_violin():
    # one violin total: the relation "after the trumpet" is not load-bearing
    scene = build_scene([
        ("flute", "A", "bright", "loud"),
        ("trumpet", "B", "dark", "loud"),
        ("flute", "C", "bright", "quiet"),
        ("flute", "D", "dark", "loud"),
        ("violin", "E", "bright", "loud"),
        ("flute", "F", "dark", "quiet"),
        ("flute", "G", "bright", "loud"),
        ("flute", "A#", "dark", "quiet"),
        ("flute", "C#", "bright", "loud"),
        ("flute", "D#", "dark", "quiet"),
    ])
    p = _after_trumpet_position_program()
    assert execute(p, scene) == "fifth"
    assert check_degenerate(p, scene) is True


def test_not_degenerate_with_violins_on_both_sides():
    # violins before and after the trumpet; exactly one after
    scene = build_scene([
        ("violin", "A", "bright", "loud"),
        ("trumpet", "B", "dark", "loud"),
        ("flute", "C", "bright", "quiet"),
        ("flute", "D", "dark", "loud"),
        ("violin", "E", "bright", "loud"),
        ("flute", "F", "dark", "quiet"),
        ("flute", "G", "bright", "loud"),
        ("flute", "A#", "dark", "quiet"),
        ("flute", "C#", "bright", "loud"),
        ("flute", "D#", "dark", "quiet"),
    ])
    p = _after_trumpet_position_program()
    assert execute(p, scene) == "fifth"
    assert check_degenerate(p, scene) is False


def test_non_relational_never_degenerate(mixed_scene):
    p = prog(("scene", None), ("filter_instrument", "cello", 0), ("count", None, 1))
    assert check_degenerate(p, mixed_scene) is False
