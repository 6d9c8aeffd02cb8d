"""Shared fixtures and builders for the test suite."""

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from aqagen.programs import Program, ProgramNode
from aqagen.scene import Scene, SceneSound, derive_positions
from aqagen.soundbank import Brightness, InstrumentFamily, Loudness, Note


def build_scene(attr_rows, scene_id=0, reverb_ms=200.0, seed=1, spacing=4.8):
    """Scene from (instrument, note, brightness, loudness) value strings.

    Onsets are evenly spaced so positions are easy to reason about by hand.
    """
    sounds = []
    onset = 1.0
    for inst, note, bright, loud in attr_rows:
        sounds.append(
            SceneSound(
                instrument=InstrumentFamily(inst),
                note=Note(note),
                brightness=Brightness(bright),
                loudness=Loudness(loud),
                onset_s=onset,
                duration_s=2.5,
            )
        )
        onset += spacing
    return Scene(
        scene_id=scene_id,
        sounds=tuple(derive_positions(sounds)),
        duration_s=50.0,
        reverb_time_ms=reverb_ms,
        seed=seed,
    )


def prog(*specs):
    """Program from (kind, value_arg, *input_indices) tuples."""
    return Program(
        nodes=tuple(
            ProgramNode(kind=k, inputs=tuple(ins), value_arg=v) for (k, v, *ins) in specs
        )
    )


@pytest.fixture
def mixed_scene():
    """3 cellos, 2 violins, 2 flutes, 1 clarinet, 2 trumpets; no F notes."""
    return build_scene([
        ("cello", "A", "bright", "loud"),
        ("violin", "C", "dark", "quiet"),
        ("cello", "D", "bright", "loud"),
        ("flute", "G", "bright", "quiet"),
        ("trumpet", "A#", "dark", "loud"),
        ("cello", "E", "dark", "quiet"),
        ("violin", "B", "bright", "loud"),
        ("clarinet", "C#", "dark", "quiet"),
        ("trumpet", "D#", "bright", "loud"),
        ("flute", "G#", "dark", "quiet"),
    ])
