"""aqagen: deterministic acoustic-scene QA dataset generator and evaluator.

The package builds synthetic acoustic scenes from attributed instrument
sounds, derives question/answer pairs by evaluating functional programs
against the symbolic scene, renders audio and spectrogram images, and
scores model predictions against the 47-word answer vocabulary.
"""

__version__ = "0.1.0"

from .soundbank import (
    BankSource,
    Brightness,
    ElementarySound,
    InstrumentFamily,
    Loudness,
    Note,
    SoundBank,
    SynthesisSource,
    annotate_brightness,
    annotate_loudness,
    load_bank,
    note_frequency,
    synthesize_sound,
)
from .scene import Scene, SceneSound, GlobalPosition, compose_scene, derive_positions
from .render import (
    SpectrogramImage,
    apply_reverb,
    render_scene,
    spectrogram,
    write_spectrogram_png,
    write_spectrogram_raw,
    write_wav,
)
from .programs import (
    ANSWER_VOCABULARY,
    ILL_POSED,
    Program,
    ProgramNode,
    QuestionType,
    execute,
    check_degenerate,
)
from .oracle import brute_force_answer
from .templates import Template, QuestionRecord, builtin_catalog, instantiate, generate_questions
from .pipeline import DatasetConfig, DatasetManifest, generate_dataset, verify_dataset
from .evaluate import EvalReport, score, baseline_random, baseline_majority

__all__ = [
    "InstrumentFamily", "Note", "Brightness", "Loudness", "ElementarySound",
    "SoundBank", "SynthesisSource", "BankSource",
    "note_frequency", "synthesize_sound", "annotate_brightness",
    "annotate_loudness", "load_bank",
    "Scene", "SceneSound", "GlobalPosition", "compose_scene", "derive_positions",
    "SpectrogramImage", "render_scene", "apply_reverb", "spectrogram",
    "write_wav", "write_spectrogram_png", "write_spectrogram_raw",
    "Program", "ProgramNode", "QuestionType", "ANSWER_VOCABULARY", "ILL_POSED",
    "execute", "check_degenerate", "brute_force_answer",
    "Template", "QuestionRecord", "builtin_catalog", "instantiate", "generate_questions",
    "DatasetConfig", "DatasetManifest", "generate_dataset", "verify_dataset",
    "EvalReport", "score", "baseline_random", "baseline_majority",
]
