"""Attribute taxonomy and elementary sound production.

Sounds carry four categorical attributes (instrument family, note,
brightness, loudness).  They are produced either by additive synthesis
with per-family harmonic profiles, or by loading an external bank of
WAV recordings listed in a JSON manifest.  Brightness and loudness
labels are always recomputed from the waveform (spectral centroid and
RMS against fixed thresholds) so stored labels match what an annotator
would measure.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import (
    BankEntryError,
    EmptyBankError,
    InvalidArgumentError,
    MissingSoundError,
    UndefinedAttributeError,
)
from .rng import SeedStream, TIMBRE_SALT, mix64

SAMPLE_RATE = 48_000


class InstrumentFamily(str, Enum):
    CELLO = "cello"
    CLARINET = "clarinet"
    FLUTE = "flute"
    TRUMPET = "trumpet"
    VIOLIN = "violin"


class Note(str, Enum):
    A = "A"
    A_SHARP = "A#"
    B = "B"
    C = "C"
    C_SHARP = "C#"
    D = "D"
    D_SHARP = "D#"
    E = "E"
    F = "F"
    F_SHARP = "F#"
    G = "G"
    G_SHARP = "G#"


class Brightness(str, Enum):
    BRIGHT = "bright"
    DARK = "dark"


class Loudness(str, Enum):
    QUIET = "quiet"
    LOUD = "loud"


# Semitone offset of each pitch class within the octave (octaves start at C).
_SEMITONE = {
    "C": 0, "C#": 1, "D": 2, "D#": 3, "E": 4, "F": 5,
    "F#": 6, "G": 7, "G#": 8, "A": 9, "A#": 10, "B": 11,
}

DEFAULT_OCTAVE = 4

# Annotation thresholds (config defaults).
BRIGHTNESS_THRESHOLD_HZ = 1200.0
LOUDNESS_THRESHOLD_DBFS = -15.0

# Synthesis levels and envelope.
LOUD_PEAK = 10 ** (-6 / 20)
QUIET_PEAK = 10 ** (-18 / 20)
ATTACK_S = 0.030
RELEASE_S = 0.100
MAX_HARMONICS = 40
VIBRATO_RATE_HZ = 5.0
VIBRATO_DEPTH = 0.003
# Brightness voicing: dark = steep low-pass, bright = +18 dB high shelf.
DARK_LOWPASS_HZ = 1000.0
BRIGHT_SHELF_HZ = 2000.0
BRIGHT_SHELF_GAIN = 8.0
# Soft peak limiter keeps the crest factor low enough that peak-normalized
# loud/quiet variants land on opposite sides of the RMS threshold.
LIMITER_CREST = 2.2


@dataclass(frozen=True)
class ElementarySound:
    """One attributed sound: categorical labels plus a mono 48 kHz waveform."""

    id: str
    instrument: InstrumentFamily
    note: Note
    brightness: Brightness
    loudness: Loudness
    duration_s: float
    waveform: np.ndarray

    def attributes(self) -> tuple[InstrumentFamily, Note, Brightness, Loudness]:
        return (self.instrument, self.note, self.brightness, self.loudness)


def note_frequency(note: Note, octave: int = DEFAULT_OCTAVE) -> float:
    """Equal-temperament frequency in Hz with A4 = 440 Hz."""
    if not 0 <= octave <= 8:
        raise InvalidArgumentError(f"octave must be in [0, 8], got {octave}")
    midi = 12 * (octave + 1) + _SEMITONE[Note(note).value]
    return 440.0 * 2.0 ** ((midi - 69) / 12)


def annotate_brightness(
    waveform: np.ndarray, threshold_hz: float = BRIGHTNESS_THRESHOLD_HZ
) -> Brightness:
    """Label by spectral centroid: bright iff centroid > threshold (tie: dark)."""
    w = np.asarray(waveform, dtype=np.float64)
    if w.size == 0:
        raise InvalidArgumentError("empty waveform")
    if not np.any(w):
        raise UndefinedAttributeError("brightness undefined for an all-zero waveform")
    mag = np.abs(np.fft.rfft(w))
    freqs = np.fft.rfftfreq(w.size, 1.0 / SAMPLE_RATE)
    centroid = float((freqs * mag).sum() / mag.sum())
    return Brightness.BRIGHT if centroid > threshold_hz else Brightness.DARK


def annotate_loudness(
    waveform: np.ndarray, threshold_dbfs: float = LOUDNESS_THRESHOLD_DBFS
) -> Loudness:
    """Label by full-waveform RMS: loud iff RMS > threshold (tie: quiet)."""
    w = np.asarray(waveform, dtype=np.float64)
    if w.size == 0:
        raise InvalidArgumentError("empty waveform")
    if not np.any(w):
        raise UndefinedAttributeError("loudness undefined for an all-zero waveform")
    rms = float(np.sqrt(np.mean(w**2)))
    return Loudness.LOUD if rms > 10 ** (threshold_dbfs / 20) else Loudness.QUIET


def _harmonic_profile(instrument: InstrumentFamily, k: np.ndarray) -> np.ndarray:
    """Relative amplitude of harmonic k (1-based) for one instrument family."""
    if instrument is InstrumentFamily.CELLO:
        return np.where(k % 2 == 1, 2.0, 1.0) / k
    if instrument is InstrumentFamily.CLARINET:
        return np.where(k % 2 == 1, 1.0 / k, 0.0)
    if instrument is InstrumentFamily.FLUTE:
        return 1.0 / k**2
    if instrument is InstrumentFamily.TRUMPET:
        return np.where(k <= 6, 1.0, 6.0 / k)
    if instrument is InstrumentFamily.VIOLIN:
        return 1.0 / k**1.2
    raise InvalidArgumentError(f"unknown instrument {instrument!r}")


def _brightness_gain(freq_hz: np.ndarray, brightness: Brightness) -> np.ndarray:
    if brightness is Brightness.DARK:
        return 1.0 / np.sqrt(1.0 + (freq_hz / DARK_LOWPASS_HZ) ** 8)
    shelf = freq_hz**8 / (freq_hz**8 + BRIGHT_SHELF_HZ**8)
    return 1.0 + (BRIGHT_SHELF_GAIN - 1.0) * shelf


def _low_crest_phases(amps: np.ndarray) -> np.ndarray:
    # Schroeder's rule for multitones with arbitrary power distribution.
    p = amps**2 / np.sum(amps**2)
    phases = np.zeros(amps.size)
    for i in range(1, amps.size):
        phases[i] = -2.0 * np.pi * np.sum(np.arange(i, 0, -1) * p[:i])
    return phases


def synthesize_sound(
    instrument: InstrumentFamily,
    note: Note,
    brightness: Brightness,
    loudness: Loudness,
    duration_s: float,
    seed: int,
    octave: int = DEFAULT_OCTAVE,
) -> ElementarySound:
    """Additive-synthesis tone whose measured labels match the requested ones.

    Deterministic in all arguments: the seed drives only a ±10% per-harmonic
    amplitude jitter and the violin's vibrato phase.
    """
    instrument = InstrumentFamily(instrument)
    note = Note(note)
    brightness = Brightness(brightness)
    loudness = Loudness(loudness)
    if not 0.5 <= duration_s <= 5.0:
        raise InvalidArgumentError(f"duration_s must be in [0.5, 5.0], got {duration_s}")

    f0 = note_frequency(note, octave)
    n = round(duration_s * SAMPLE_RATE)
    n_harm = max(1, min(MAX_HARMONICS, int(0.98 * (SAMPLE_RATE / 2) / f0)))
    k = np.arange(1, n_harm + 1, dtype=np.float64)

    stream = SeedStream(seed)
    amps = _harmonic_profile(instrument, k)
    amps = amps * (1.0 + 0.1 * (2.0 * stream.uniform_array(n_harm) - 1.0))
    amps = amps * _brightness_gain(k * f0, brightness)
    phases = _low_crest_phases(amps)

    t = np.arange(n, dtype=np.float64) / SAMPLE_RATE
    if instrument is InstrumentFamily.VIOLIN:
        vib_phase = 2.0 * np.pi * stream.uniform()
        inst_freq = f0 * (1.0 + VIBRATO_DEPTH * np.sin(2 * np.pi * VIBRATO_RATE_HZ * t + vib_phase))
        base_phase = 2.0 * np.pi * np.cumsum(inst_freq) / SAMPLE_RATE
    else:
        base_phase = 2.0 * np.pi * f0 * t

    wave = (np.sin(np.outer(k, base_phase) + phases[:, None]) * amps[:, None]).sum(axis=0)

    rms = np.sqrt(np.mean(wave**2))
    wave = LIMITER_CREST * rms * np.tanh(wave / (LIMITER_CREST * rms))

    n_attack = int(ATTACK_S * SAMPLE_RATE)
    n_release = int(RELEASE_S * SAMPLE_RATE)
    env = np.ones(n)
    env[:n_attack] = np.linspace(0.0, 1.0, n_attack, endpoint=False)
    env[n - n_release:] = np.linspace(1.0, 0.0, n_release)
    wave = wave * env

    target_peak = LOUD_PEAK if loudness is Loudness.LOUD else QUIET_PEAK
    wave = wave * (target_peak / np.abs(wave).max())

    sound_id = f"synth:{instrument.value}:{note.value}{octave}:{brightness.value}:{loudness.value}:{seed}"
    return ElementarySound(
        id=sound_id,
        instrument=instrument,
        note=note,
        brightness=brightness,
        loudness=loudness,
        duration_s=n / SAMPLE_RATE,
        waveform=wave,
    )


class SoundBank:
    """Sounds indexed by their (instrument, note, brightness, loudness) tuple."""

    def __init__(self, sounds: list[ElementarySound]):
        if not sounds:
            raise EmptyBankError("bank contains no sounds")
        self.sounds = list(sounds)
        self._index: dict[tuple, list[ElementarySound]] = {}
        for s in self.sounds:
            self._index.setdefault(s.attributes(), []).append(s)

    def __len__(self) -> int:
        return len(self.sounds)

    def attribute_tuples(self) -> list[tuple]:
        """Distinct covered attribute tuples, in a deterministic order."""
        return sorted(self._index, key=lambda t: tuple(v.value for v in t))

    def covers(self, instrument, note, brightness, loudness) -> bool:
        key = (InstrumentFamily(instrument), Note(note), Brightness(brightness), Loudness(loudness))
        return key in self._index

    def get(self, instrument, note, brightness, loudness) -> ElementarySound:
        key = (InstrumentFamily(instrument), Note(note), Brightness(brightness), Loudness(loudness))
        try:
            return self._index[key][0]
        except KeyError:
            raise MissingSoundError(
                f"bank has no sound for ({key[0].value}, {key[1].value}, {key[2].value}, {key[3].value})"
            ) from None


def _decode_wav(path: Path) -> np.ndarray:
    """Read a WAV file as mono float64 at 48 kHz (resampling if needed)."""
    from scipy.io import wavfile
    from scipy.signal import resample_poly

    rate, data = wavfile.read(path)
    data = np.asarray(data)
    if data.ndim == 2:  # downmix
        data = data.mean(axis=1)
    if data.dtype == np.int16:
        data = data.astype(np.float64) / 32768.0
    elif data.dtype == np.int32:
        data = data.astype(np.float64) / 2147483648.0
    elif data.dtype == np.uint8:
        data = (data.astype(np.float64) - 128.0) / 128.0
    else:
        data = data.astype(np.float64)
    if rate != SAMPLE_RATE:
        from math import gcd

        g = gcd(SAMPLE_RATE, int(rate))
        data = resample_poly(data, SAMPLE_RATE // g, int(rate) // g)
    return np.clip(data, -1.0, 1.0)


def load_bank(directory, manifest=None) -> SoundBank:
    """Load a bank of recordings described by a JSON manifest.

    The manifest is a JSON array of ``{path, instrument, note}`` entries with
    paths relative to ``directory``; brightness and loudness are annotated
    from the decoded audio.  Defaults to ``directory/manifest.json``.
    """
    directory = Path(directory)
    if manifest is None:
        manifest = directory / "manifest.json"
    if isinstance(manifest, (str, Path)):
        with open(manifest, encoding="utf-8") as fh:
            entries = json.load(fh)
    else:
        entries = list(manifest)

    if not entries:
        raise EmptyBankError("manifest lists no sounds")

    sounds = []
    for entry in entries:
        path = directory / entry.get("path", "")
        try:
            instrument = InstrumentFamily(entry["instrument"])
        except ValueError:
            raise BankEntryError(path, f"unknown instrument label {entry['instrument']!r}") from None
        try:
            note = Note(entry["note"])
        except ValueError:
            raise BankEntryError(path, f"unknown note label {entry['note']!r}") from None
        try:
            wave = _decode_wav(path)
        except OSError as exc:
            raise BankEntryError(path, f"cannot read file: {exc}") from None
        try:
            brightness = annotate_brightness(wave)
            loudness = annotate_loudness(wave)
        except UndefinedAttributeError as exc:
            raise BankEntryError(path, str(exc)) from None
        sounds.append(
            ElementarySound(
                id=str(entry["path"]),
                instrument=instrument,
                note=note,
                brightness=brightness,
                loudness=loudness,
                duration_s=wave.size / SAMPLE_RATE,
                waveform=wave,
            )
        )
    return SoundBank(sounds)


FULL_ATTRIBUTE_GRID = [
    (i, n, b, l)
    for i in InstrumentFamily
    for n in Note
    for b in Brightness
    for l in Loudness
]


class SynthesisSource:
    """Resolves attribute tuples to waveforms by on-demand synthesis.

    Each attribute tuple keeps one fixed timbre (seeded independently of
    duration), mirroring a bank that holds one recording per tuple.
    """

    def __init__(self, base_seed: int = 0):
        self.base_seed = base_seed

    def attribute_tuples(self) -> list[tuple]:
        return list(FULL_ATTRIBUTE_GRID)

    def resolve(self, instrument, note, brightness, loudness, duration_s: float) -> np.ndarray:
        seed = mix64(
            TIMBRE_SALT,
            self.base_seed,
            list(InstrumentFamily).index(InstrumentFamily(instrument)),
            list(Note).index(Note(note)),
            list(Brightness).index(Brightness(brightness)),
            list(Loudness).index(Loudness(loudness)),
        )
        return synthesize_sound(instrument, note, brightness, loudness, duration_s, seed).waveform


class BankSource:
    """Resolves attribute tuples against a loaded bank.

    Recordings longer than the requested duration are truncated with a short
    fade; shorter ones are left as-is (the remainder of the slot is silent).
    """

    FADE_S = 0.010

    def __init__(self, bank: SoundBank):
        self.bank = bank

    def attribute_tuples(self) -> list[tuple]:
        return self.bank.attribute_tuples()

    def resolve(self, instrument, note, brightness, loudness, duration_s: float) -> np.ndarray:
        sound = self.bank.get(instrument, note, brightness, loudness)
        wave = sound.waveform
        target = round(duration_s * SAMPLE_RATE)
        if wave.size > target:
            wave = wave[:target].copy()
            n_fade = min(int(self.FADE_S * SAMPLE_RATE), target)
            wave[target - n_fade:] *= np.linspace(1.0, 0.0, n_fade)
        return wave
