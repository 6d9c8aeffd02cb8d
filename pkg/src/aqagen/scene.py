"""Symbolic scene composition.

A scene is a fixed 50-second sequence of 10 non-overlapping attributed
sounds with a sampled room reverberation time.  Composition is purely
symbolic (attributes, onsets, durations); waveforms are resolved later
by the renderer.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

from .errors import InvalidArgumentError
from .rng import SeedStream, SCENE_SALT, mix64
from .soundbank import Brightness, InstrumentFamily, Loudness, Note, FULL_ATTRIBUTE_GRID

SCENE_DURATION_S = 50.0
SOUNDS_PER_SCENE = 10
SOUND_DURATION_RANGE_S = (2.0, 3.0)
REVERB_RANGE_MS = (50.0, 400.0)


class GlobalPosition(str, Enum):
    BEGINNING = "beginning"
    MIDDLE = "middle"
    END = "end"


@dataclass(frozen=True)
class SceneSound:
    """One placed sound: attribute labels plus timing and derived positions."""

    instrument: InstrumentFamily
    note: Note
    brightness: Brightness
    loudness: Loudness
    onset_s: float
    duration_s: float
    absolute_position: int = 0     # 1-based rank by onset among all sounds
    relative_position: int = 0     # 1-based rank among same-instrument sounds
    global_position: GlobalPosition = GlobalPosition.BEGINNING

    def to_dict(self) -> dict:
        return {
            "instrument": self.instrument.value,
            "note": self.note.value,
            "brightness": self.brightness.value,
            "loudness": self.loudness.value,
            "onset_s": self.onset_s,
            "duration_s": self.duration_s,
            "absolute_position": self.absolute_position,
            "relative_position": self.relative_position,
            "global_position": self.global_position.value,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SceneSound":
        return cls(
            instrument=InstrumentFamily(d["instrument"]),
            note=Note(d["note"]),
            brightness=Brightness(d["brightness"]),
            loudness=Loudness(d["loudness"]),
            onset_s=float(d["onset_s"]),
            duration_s=float(d["duration_s"]),
            absolute_position=int(d["absolute_position"]),
            relative_position=int(d["relative_position"]),
            global_position=GlobalPosition(d["global_position"]),
        )


@dataclass(frozen=True)
class Scene:
    scene_id: int
    sounds: tuple[SceneSound, ...]
    duration_s: float
    reverb_time_ms: float
    seed: int

    def to_dict(self) -> dict:
        return {
            "scene_id": self.scene_id,
            "duration_s": self.duration_s,
            "reverb_time_ms": self.reverb_time_ms,
            "seed": self.seed,
            "sounds": [s.to_dict() for s in self.sounds],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Scene":
        return cls(
            scene_id=int(d["scene_id"]),
            sounds=tuple(SceneSound.from_dict(s) for s in d["sounds"]),
            duration_s=float(d["duration_s"]),
            reverb_time_ms=float(d["reverb_time_ms"]),
            seed=int(d["seed"]),
        )


def derive_positions(
    sounds: list[SceneSound], scene_duration_s: float = SCENE_DURATION_S
) -> list[SceneSound]:
    """Fill absolute, relative, and global positions from onset times.

    Sounds must already be in strictly increasing onset order.  Global
    position partitions the scene into exact thirds by onset time.
    """
    onsets = [s.onset_s for s in sounds]
    if any(b <= a for a, b in zip(onsets, onsets[1:])):
        raise InvalidArgumentError("onsets must be strictly increasing")

    per_instrument: dict[InstrumentFamily, int] = {}
    out = []
    for i, s in enumerate(sounds):
        rank = per_instrument.get(s.instrument, 0) + 1
        per_instrument[s.instrument] = rank
        if s.onset_s < scene_duration_s / 3:
            gp = GlobalPosition.BEGINNING
        elif s.onset_s < 2 * scene_duration_s / 3:
            gp = GlobalPosition.MIDDLE
        else:
            gp = GlobalPosition.END
        out.append(
            replace(s, absolute_position=i + 1, relative_position=rank, global_position=gp)
        )
    return out


def compose_scene(
    scene_id: int,
    master_seed: int,
    attribute_tuples: list[tuple] | None = None,
) -> Scene:
    """Compose one deterministic scene from (master_seed, scene_id).

    Attribute tuples are sampled uniformly with replacement from
    ``attribute_tuples`` (default: the full 5x12x2x2 grid; pass a bank's
    covered tuples when composing against recordings).  Per-sound durations
    are uniform in [2, 3] s; an initial gap plus nine inter-sound gaps are
    drawn uniform and rescaled so the last sound ends exactly at 50 s.
    """
    if attribute_tuples is None:
        attribute_tuples = FULL_ATTRIBUTE_GRID
    if not attribute_tuples:
        raise InvalidArgumentError("attribute_tuples must be non-empty")

    seed = mix64(SCENE_SALT, master_seed, scene_id)
    stream = SeedStream(seed)

    picks = [attribute_tuples[stream.randint(len(attribute_tuples))] for _ in range(SOUNDS_PER_SCENE)]
    lo, hi = SOUND_DURATION_RANGE_S
    durations = lo + (hi - lo) * stream.uniform_array(SOUNDS_PER_SCENE)

    total_sound = float(durations.sum())
    if total_sound > SCENE_DURATION_S:
        raise AssertionError("sound durations exceed the scene length")
    raw_gaps = stream.uniform_array(SOUNDS_PER_SCENE)  # initial + 9 inter-sound gaps
    gaps = raw_gaps * ((SCENE_DURATION_S - total_sound) / raw_gaps.sum())

    sounds = []
    clock = 0.0
    for i in range(SOUNDS_PER_SCENE):
        clock += float(gaps[i])
        inst, note, bright, loud = picks[i]
        sounds.append(
            SceneSound(
                instrument=inst,
                note=note,
                brightness=bright,
                loudness=loud,
                onset_s=clock,
                duration_s=float(durations[i]),
            )
        )
        clock += float(durations[i])

    reverb_ms = stream.uniform(*REVERB_RANGE_MS)
    return Scene(
        scene_id=scene_id,
        sounds=tuple(derive_positions(sounds)),
        duration_s=SCENE_DURATION_S,
        reverb_time_ms=reverb_ms,
        seed=seed,
    )
