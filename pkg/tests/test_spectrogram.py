"""Spectrogram image computation and its writers."""

import numpy as np
import pytest

from aqagen.errors import InvalidArgumentError
from aqagen.render import (
    SPEC_HEIGHT,
    SPEC_WIDTH,
    SpectrogramImage,
    read_spectrogram_raw,
    render_scene,
    spectrogram,
    write_spectrogram_png,
    write_spectrogram_raw,
)
from aqagen.scene import Scene, SceneSound, derive_positions
from aqagen.soundbank import (
    SAMPLE_RATE,
    Brightness,
    InstrumentFamily,
    Loudness,
    Note,
    SynthesisSource,
)

ROW_HZ = (SAMPLE_RATE / 2) / SPEC_HEIGHT  # 75 Hz per resampled bin


def _tone(freq_hz, duration_s=50.0, amplitude=0.8):
    t = np.arange(int(duration_s * SAMPLE_RATE)) / SAMPLE_RATE
    return amplitude * np.sin(2 * np.pi * freq_hz * t)


def test_dimensions_exact():
    image = spectrogram(_tone(440.0, duration_s=2.0))
    assert image.values.shape == (SPEC_HEIGHT, SPEC_WIDTH) == (320, 480)


def test_values_in_unit_interval():
    image = spectrogram(_tone(1000.0, duration_s=5.0))
    assert image.values.min() >= 0.0
    assert image.values.max() <= 1.0


def test_all_zero_waveform_maps_to_zero_pixels():
    image = spectrogram(np.zeros(2_400_000))
    assert np.all(image.values == 0.0)


def test_too_short_waveform_rejected():
    with pytest.raises(InvalidArgumentError):
        spectrogram(np.zeros(1023))


@pytest.mark.parametrize("freq", [150.0, 440.0, 1000.0, 4321.0, 12000.0, 20000.0])
def test_pure_tone_peak_row_maps_to_frequency(freq):
    image = spectrogram(_tone(freq, duration_s=3.0))
    row = int(np.argmax(image.values.sum(axis=1)))
    row_center = image.row_frequency_hz(row)
    assert abs(row_center - freq) <= ROW_HZ


def test_scaled_copies_monotone():
    base = _tone(800.0, duration_s=2.0, amplitude=0.2)
    small = spectrogram(base).values
    large = spectrogram(2.5 * base).values
    assert np.all(large >= small - 1e-12)
    assert large.sum() > small.sum()


def test_single_tone_scene_peak_row():
    # rendered through the full scene pipeline (mix, reverb, normalize)
    sounds = derive_positions([
        SceneSound(InstrumentFamily.FLUTE, Note.A, Brightness.DARK, Loudness.LOUD, 10.0, 2.5)
    ])
    scene = Scene(scene_id=0, sounds=tuple(sounds), duration_s=50.0,
                  reverb_time_ms=150.0, seed=3)
    wave = render_scene(scene, SynthesisSource(3))
    image = spectrogram(wave)
    row = int(np.argmax(image.values.sum(axis=1)))
    assert abs(image.row_frequency_hz(row) - 440.0) <= ROW_HZ


def test_png_writer_flips_low_frequency_to_bottom(tmp_path):
    from PIL import Image

    values = np.zeros((SPEC_HEIGHT, SPEC_WIDTH))
    values[0, :] = 1.0  # lowest band
    write_spectrogram_png(tmp_path / "s.png", SpectrogramImage(values=values))
    img = np.asarray(Image.open(tmp_path / "s.png"))
    assert img.shape == (SPEC_HEIGHT, SPEC_WIDTH)
    assert img[-1].min() == 255  # bottom row of the picture
    assert img[0].max() == 0


def test_raw_writer_round_trip(tmp_path):
    image = spectrogram(_tone(440.0, duration_s=2.0))
    write_spectrogram_raw(tmp_path / "s.bin", image)
    raw = (tmp_path / "s.bin").read_bytes()
    assert raw[:8] == b"CLRSPEC1"
    assert len(raw) == 16 + 4 * SPEC_HEIGHT * SPEC_WIDTH
    back = read_spectrogram_raw(tmp_path / "s.bin")
    assert np.abs(back.values - image.values).max() < 1e-6


def test_bad_shape_rejected():
    with pytest.raises(InvalidArgumentError):
        SpectrogramImage(values=np.zeros((10, 10)))
