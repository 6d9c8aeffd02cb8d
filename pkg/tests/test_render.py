"""Waveform rendering and reverberation."""

import numpy as np
import pytest

from aqagen.errors import InvalidArgumentError, MissingSoundError
from aqagen.render import (
    SCENE_SAMPLES,
    apply_reverb,
    read_wav,
    render_scene,
    reverb_impulse_response,
    write_wav,
)
from aqagen.scene import Scene, SceneSound, compose_scene, derive_positions
from aqagen.soundbank import (
    SAMPLE_RATE,
    Brightness,
    InstrumentFamily,
    Loudness,
    Note,
    SynthesisSource,
)

from dsp_oracles import band_energy, decay_time_s, schroeder_curve_db


def _single_flute_scene():
    sounds = derive_positions([
        SceneSound(InstrumentFamily.FLUTE, Note.A, Brightness.DARK, Loudness.LOUD, 20.0, 2.0)
    ])
    return Scene(scene_id=0, sounds=tuple(sounds), duration_s=50.0,
                 reverb_time_ms=300.0, seed=5)


def test_rendered_length_is_fixed():
    scene = compose_scene(0, 21)
    wave = render_scene(scene, SynthesisSource(21))
    assert wave.size == SCENE_SAMPLES == 2_400_000


def test_energy_confined_without_reverb():
    scene = _single_flute_scene()
    wave = render_scene(scene, SynthesisSource(0), with_reverb=False)
    total = band_energy(wave, 0.0, 50.0)
    inside = band_energy(wave, 20.0, 22.0)
    assert total - inside < 0.01 * total


def test_render_deterministic():
    scene = compose_scene(3, 8)
    a = render_scene(scene, SynthesisSource(8))
    b = render_scene(scene, SynthesisSource(8))
    assert np.array_equal(a, b)


def test_render_peak_normalized():
    scene = compose_scene(1, 5)
    wave = render_scene(scene, SynthesisSource(5))
    assert np.abs(wave).max() == pytest.approx(10 ** (-1 / 20), rel=1e-6)


def test_missing_sound_error():
    class EmptySource:
        def resolve(self, *args):
            raise KeyError("nothing here")

    scene = _single_flute_scene()
    with pytest.raises(MissingSoundError):
        render_scene(scene, EmptySource())


# --- reverb ---

def test_impulse_decays_60_db_at_rt60():
    # drive with a unit impulse: the output is the impulse response itself
    impulse = np.zeros(SAMPLE_RATE)
    impulse[0] = 1.0
    out = apply_reverb(impulse, 400.0, seed=13)
    # Schroeder curve at t = 400 ms reads -60 dB within 3 dB
    curve = schroeder_curve_db(out)
    at_rt60 = curve[int(0.400 * SAMPLE_RATE)]
    assert at_rt60 == pytest.approx(-60.0, abs=3.0)


@pytest.mark.parametrize("rt60_ms", [50.0, 200.0, 400.0])
def test_schroeder_decay_within_ten_percent(rt60_ms):
    ir = reverb_impulse_response(rt60_ms, seed=29)
    measured = decay_time_s(ir)
    assert measured == pytest.approx(rt60_ms / 1000.0, rel=0.10)


def test_longer_rt60_leaves_more_tail_energy():
    impulse = np.zeros(SAMPLE_RATE)
    impulse[0] = 1.0
    short = apply_reverb(impulse, 50.0, seed=4)
    long = apply_reverb(impulse, 400.0, seed=4)
    assert band_energy(long, 0.100, 1.0) > band_energy(short, 0.100, 1.0)


def test_rt60_out_of_range_rejected():
    with pytest.raises(InvalidArgumentError):
        apply_reverb(np.ones(100), 30.0, seed=1)
    with pytest.raises(InvalidArgumentError):
        apply_reverb(np.ones(100), 401.0, seed=1)


def test_direct_path_preserved():
    ir = reverb_impulse_response(200.0, seed=7)
    assert ir[0] == 1.0


def test_reverb_deterministic_per_seed():
    ir_a = reverb_impulse_response(250.0, seed=42)
    ir_b = reverb_impulse_response(250.0, seed=42)
    ir_c = reverb_impulse_response(250.0, seed=43)
    assert np.array_equal(ir_a, ir_b)
    assert not np.array_equal(ir_a, ir_c)


# --- wav io ---

def test_wav_round_trip(tmp_path):
    wave = 0.5 * np.sin(2 * np.pi * 440 * np.arange(4800) / SAMPLE_RATE)
    write_wav(tmp_path / "t.wav", wave)
    back = read_wav(tmp_path / "t.wav")
    assert back.size == wave.size
    assert np.abs(back - wave).max() < 1.0 / 32767
