"""Scene rendering: waveform assembly, room reverberation, spectrograms.

The renderer turns a symbolic scene into a 2,400,000-sample mono waveform
(50 s at 48 kHz), convolves it with a synthetic exponential-decay impulse
response parameterized by the scene's RT60, and computes the fixed
480x320 spectrogram image consumed by downstream models.
"""

from __future__ import annotations

import struct
import wave as wavemod
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np
from scipy.signal import fftconvolve

from .errors import InvalidArgumentError, MissingSoundError
from .rng import SeedStream, REVERB_SALT, mix64
from .scene import Scene, REVERB_RANGE_MS
from .soundbank import SAMPLE_RATE

SCENE_SAMPLES = int(50.0 * SAMPLE_RATE)
RENDER_PEAK = 10 ** (-1 / 20)  # -1 dBFS after reverb

STFT_WINDOW = 1024
STFT_HOP = 512
SPEC_WIDTH = 480   # time axis
SPEC_HEIGHT = 320  # frequency axis
DB_FLOOR = -80.0

# Reverb impulse response: tail energy relative to the unit direct path.
# Keeping the ratio near 2 puts the Schroeder -60 dB crossing at ~0.97*RT60.
IR_TAIL_TO_DIRECT_ENERGY = 2.0
IR_LENGTH_FACTOR = 1.5
_DECAY_LN = 3.0 * np.log(10.0)  # 60 dB of energy decay, amplitude-domain


@dataclass(frozen=True)
class SpectrogramImage:
    """480x320 spectrogram with values in [0, 1].

    ``values`` has shape (320, 480); row 0 is the lowest frequency band.
    Writers that produce images flip vertically so low frequencies sit at
    the bottom of the picture.
    """

    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (SPEC_HEIGHT, SPEC_WIDTH):
            raise InvalidArgumentError(
                f"spectrogram must be {SPEC_HEIGHT}x{SPEC_WIDTH}, got {self.values.shape}"
            )

    def row_frequency_hz(self, row: int) -> float:
        """Center frequency of a row (rows span 0..24 kHz linearly)."""
        return (row + 0.5) * (SAMPLE_RATE / 2) / SPEC_HEIGHT


def reverb_impulse_response(rt60_ms: float, seed: int) -> np.ndarray:
    """Unit direct impulse followed by exponentially decaying white noise."""
    if not REVERB_RANGE_MS[0] <= rt60_ms <= REVERB_RANGE_MS[1]:
        raise InvalidArgumentError(
            f"rt60_ms must be in [{REVERB_RANGE_MS[0]:.0f}, {REVERB_RANGE_MS[1]:.0f}], got {rt60_ms}"
        )
    rt60_s = rt60_ms / 1000.0
    n = round(IR_LENGTH_FACTOR * rt60_s * SAMPLE_RATE)
    t = np.arange(n) / SAMPLE_RATE
    tail = SeedStream(seed).normal_array(n) * np.exp(-_DECAY_LN * t / rt60_s)
    tail[0] = 0.0
    tail *= np.sqrt(IR_TAIL_TO_DIRECT_ENERGY / np.sum(tail**2))
    ir = tail
    ir[0] = 1.0
    return ir


def apply_reverb(waveform: np.ndarray, rt60_ms: float, seed: int) -> np.ndarray:
    """Convolve with the synthetic room response; output includes the tail."""
    ir = reverb_impulse_response(rt60_ms, seed)
    return fftconvolve(np.asarray(waveform, dtype=np.float64), ir)


def render_scene(scene: Scene, source, with_reverb: bool = True) -> np.ndarray:
    """Mix a scene's sounds at their onsets and apply reverb.

    ``source`` must expose ``resolve(instrument, note, brightness, loudness,
    duration_s) -> waveform``.  The result is exactly 2,400,000 samples,
    peak-normalized to -1 dBFS.  ``with_reverb=False`` is a test hook.
    """
    out = np.zeros(SCENE_SAMPLES)
    for s in scene.sounds:
        try:
            wave = source.resolve(s.instrument, s.note, s.brightness, s.loudness, s.duration_s)
        except MissingSoundError:
            raise
        except Exception as exc:
            raise MissingSoundError(
                f"cannot resolve sound ({s.instrument.value}, {s.note.value}, "
                f"{s.brightness.value}, {s.loudness.value}): {exc}"
            ) from exc
        start = round(s.onset_s * SAMPLE_RATE)
        stop = min(start + wave.size, SCENE_SAMPLES)
        out[start:stop] += wave[: stop - start]

    if with_reverb:
        out = apply_reverb(out, scene.reverb_time_ms, mix64(REVERB_SALT, scene.seed))[:SCENE_SAMPLES]

    peak = np.abs(out).max()
    if peak > 0:
        out *= RENDER_PEAK / peak
    return out


@lru_cache(maxsize=8)
def _area_weights(n_in: int, n_out: int) -> np.ndarray:
    """(n_out, n_in) matrix averaging input cells into output cells by overlap."""
    scale = n_in / n_out
    w = np.zeros((n_out, n_in))
    for i in range(n_out):
        lo, hi = i * scale, (i + 1) * scale
        j0, j1 = int(np.floor(lo)), int(np.ceil(hi))
        for j in range(j0, min(j1, n_in)):
            w[i, j] = min(hi, j + 1) - max(lo, j)
        w[i] /= scale
    return w


def spectrogram(waveform: np.ndarray) -> SpectrogramImage:
    """STFT magnitude image: 1024-sample Hanning window, hop 512.

    Magnitudes (normalized by the window sum) are mapped to dB, floored at
    -80 dB, rescaled to [0, 1], and area-averaged from the native 513-bin by
    N-frame grid down to 320 frequency rows by 480 time columns.
    """
    w = np.asarray(waveform, dtype=np.float64)
    if w.size < STFT_WINDOW:
        raise InvalidArgumentError(f"waveform shorter than one window ({STFT_WINDOW} samples)")

    window = np.hanning(STFT_WINDOW)
    n_frames = 1 + (w.size - STFT_WINDOW) // STFT_HOP
    frames = np.lib.stride_tricks.sliding_window_view(w, STFT_WINDOW)[::STFT_HOP][:n_frames]
    mag = np.abs(np.fft.rfft(frames * window, axis=1)) / window.sum()

    db = 20.0 * np.log10(np.maximum(mag, 10 ** (DB_FLOOR / 20)))
    scaled = (np.clip(db, DB_FLOOR, 0.0) - DB_FLOOR) / -DB_FLOOR

    grid = scaled.T  # (513 freq bins, n_frames)
    wf = _area_weights(grid.shape[0], SPEC_HEIGHT)
    wt = _area_weights(grid.shape[1], SPEC_WIDTH)
    return SpectrogramImage(values=wf @ grid @ wt.T)


def write_wav(path, waveform: np.ndarray) -> None:
    """Mono 16-bit PCM at 48 kHz."""
    samples = np.clip(np.asarray(waveform), -1.0, 1.0)
    pcm = np.round(samples * 32767.0).astype("<i2")
    with wavemod.open(str(path), "wb") as fh:
        fh.setnchannels(1)
        fh.setsampwidth(2)
        fh.setframerate(SAMPLE_RATE)
        fh.writeframes(pcm.tobytes())


def read_wav(path) -> np.ndarray:
    from scipy.io import wavfile

    rate, data = wavfile.read(path)
    if rate != SAMPLE_RATE:
        raise InvalidArgumentError(f"expected {SAMPLE_RATE} Hz, got {rate}")
    if data.dtype == np.int16:
        return data.astype(np.float64) / 32767.0
    return data.astype(np.float64)


def write_spectrogram_png(path, image: SpectrogramImage) -> None:
    """8-bit grayscale PNG, low frequencies at the bottom row."""
    from PIL import Image

    pixels = np.round(image.values * 255.0).astype(np.uint8)
    Image.fromarray(np.flipud(pixels), mode="L").save(str(path), format="PNG")


SPEC_RAW_MAGIC = b"CLRSPEC1"


def write_spectrogram_raw(path, image: SpectrogramImage) -> None:
    """Raw float32 dump: 16-byte header (magic, u32 height, u32 width) + rows.

    Rows are written row-major in ``values`` order (row 0 = lowest band),
    little-endian.
    """
    with open(path, "wb") as fh:
        fh.write(SPEC_RAW_MAGIC)
        fh.write(struct.pack("<II", SPEC_HEIGHT, SPEC_WIDTH))
        fh.write(image.values.astype("<f4").tobytes(order="C"))


def read_spectrogram_raw(path) -> SpectrogramImage:
    raw = Path(path).read_bytes()
    if raw[:8] != SPEC_RAW_MAGIC:
        raise InvalidArgumentError("bad magic in raw spectrogram file")
    height, width = struct.unpack("<II", raw[8:16])
    values = np.frombuffer(raw[16:], dtype="<f4").reshape(height, width).astype(np.float64)
    return SpectrogramImage(values=values)
