"""Brute-force reference evaluator for question programs.

This module re-derives answers by exhaustive scanning so it can be used
as an independent check on the main evaluator.  It deliberately shares
no evaluation code or runtime data structures with ``programs.execute``:
the scene is consumed in its serialized dict form, sound collections are
index sets, and evaluation recurses top-down from the root instead of
sweeping bottom-up.  Only the result interface (answer strings and the
ILL_POSED sentinel) is common.
"""

from __future__ import annotations

from .errors import ProgramError
from .programs import ILL_POSED, Program, validate
from .scene import Scene

_ORDINALS = ("first", "second", "third", "fourth", "fifth",
             "sixth", "seventh", "eighth", "ninth", "tenth")

def _attr_of(kind: str) -> str:
    for name in ("global_position", "instrument", "note", "brightness", "loudness"):
        if kind.endswith(name):
            return name
    raise ProgramError(f"no attribute for kind {kind!r}")


def brute_force_answer(program: Program, scene: Scene):
    """Answer by exhaustive enumeration over the serialized scene."""
    validate(program)
    records = [dict(s) for s in scene.to_dict()["sounds"]]
    nodes = program.to_json()

    def members_matching(candidates: frozenset[int], field: str, value) -> frozenset[int]:
        keep = set()
        for i in range(len(records)):
            if i in candidates and records[i][field] == value:
                keep.add(i)
        return frozenset(keep)

    def eval_node(idx: int):
        node = nodes[idx]
        kind = node["kind"]

        if kind == "scene":
            return frozenset(range(len(records)))

        if kind.startswith("filter_"):
            upstream = eval_node(node["inputs"][0])
            if upstream is ILL_POSED:
                return ILL_POSED
            return members_matching(upstream, _attr_of(kind), node["value_arg"])

        if kind == "unique":
            upstream = eval_node(node["inputs"][0])
            if upstream is ILL_POSED:
                return ILL_POSED
            if len(upstream) != 1:
                return ILL_POSED
            return next(iter(upstream))

        if kind == "select_ordinal":
            upstream = eval_node(node["inputs"][0])
            if upstream is ILL_POSED:
                return ILL_POSED
            wanted = node["value_arg"]
            # scan every sound in onset order, counting members seen so far
            seen = 0
            for i in range(len(records)):
                if i in upstream:
                    seen += 1
                    if seen == wanted:
                        return i
            return ILL_POSED

        if kind in ("relate_before", "relate_after"):
            ref = eval_node(node["inputs"][0])
            if ref is ILL_POSED:
                return ILL_POSED
            ref_onset = records[ref]["onset_s"]
            keep = set()
            for i in range(len(records)):
                onset = records[i]["onset_s"]
                if kind == "relate_before" and onset < ref_onset:
                    keep.add(i)
                if kind == "relate_after" and onset > ref_onset:
                    keep.add(i)
            return frozenset(keep)

        if kind.startswith("same_"):
            ref = eval_node(node["inputs"][0])
            if ref is ILL_POSED:
                return ILL_POSED
            field = _attr_of(kind)
            keep = set()
            for i in range(len(records)):
                if i != ref and records[i][field] == records[ref][field]:
                    keep.add(i)
            return frozenset(keep)

        if kind == "count":
            upstream = eval_node(node["inputs"][0])
            if upstream is ILL_POSED:
                return ILL_POSED
            total = 0
            for i in range(len(records)):
                if i in upstream:
                    total += 1
            return total

        if kind == "exist":
            upstream = eval_node(node["inputs"][0])
            if upstream is ILL_POSED:
                return ILL_POSED
            for i in range(len(records)):
                if i in upstream:
                    return True
            return False

        if kind in ("equal_integer", "less_than", "greater_than"):
            left = eval_node(node["inputs"][0])
            right = eval_node(node["inputs"][1])
            if left is ILL_POSED or right is ILL_POSED:
                return ILL_POSED
            if kind == "equal_integer":
                return left == right
            if kind == "less_than":
                return left < right
            return left > right

        if kind == "equal_attribute":
            left = eval_node(node["inputs"][0])
            right = eval_node(node["inputs"][1])
            if left is ILL_POSED or right is ILL_POSED:
                return ILL_POSED
            return left == right

        if kind == "query_absolute_position":
            ref = eval_node(node["inputs"][0])
            if ref is ILL_POSED:
                return ILL_POSED
            return _ORDINALS[records[ref]["absolute_position"] - 1]

        if kind == "query_relative_position":
            ref = eval_node(node["inputs"][0])
            if ref is ILL_POSED:
                return ILL_POSED
            return _ORDINALS[records[ref]["relative_position"] - 1]

        if kind.startswith("query_"):
            ref = eval_node(node["inputs"][0])
            if ref is ILL_POSED:
                return ILL_POSED
            return records[ref][_attr_of(kind)]

        raise ProgramError(f"unhandled kind {kind!r}")

    result = eval_node(len(nodes) - 1)
    if result is ILL_POSED:
        return ILL_POSED
    if result is True:
        return "yes"
    if result is False:
        return "no"
    if isinstance(result, int):
        return str(result)
    return result
