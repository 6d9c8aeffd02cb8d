"""End-to-end dataset production and verification.

Orchestrates scene composition, question generation, optional audio and
spectrogram rendering, deterministic scene-level splitting, and the
on-disk layout::

    output_dir/
      manifest.json
      scenes.json
      questions_train.jsonl  questions_val.jsonl  questions_test.jsonl
      audio/scene_000000.wav ...
      spectrograms/scene_000000.png ...

Scene work is embarrassingly parallel; output bytes are identical for any
worker count because every randomized choice is keyed to (master_seed,
scene_id) and files are assembled in scene order by the parent process.
"""

from __future__ import annotations

import hashlib
import json
import logging
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict
from pathlib import Path

from . import __version__
from .errors import InvalidArgumentError
from .oracle import brute_force_answer
from .programs import ILL_POSED, ANSWER_VOCABULARY, ANSWERS_BY_TYPE, check_degenerate
from .rng import SeedStream, SPLIT_SALT, mix64
from .scene import Scene, compose_scene
from .soundbank import BankSource, SynthesisSource, load_bank
from .templates import QuestionRecord, builtin_catalog, generate_questions
from .render import render_scene, spectrogram, write_wav, write_spectrogram_png

log = logging.getLogger(__name__)


@dataclass
class DatasetConfig:
    n_scenes: int
    questions_per_scene: int = 20
    master_seed: int = 0
    split_fractions: tuple[float, float, float] = (0.70, 0.15, 0.15)
    render_audio: bool = True
    render_spectrograms: bool = True
    output_dir: str = "dataset"
    bank_manifest: str | None = None  # None: parametric synthesis
    cap_fraction: float = 0.5
    workers: int = 1

    def validate(self) -> None:
        if self.n_scenes < 10:
            raise InvalidArgumentError("n_scenes must be at least 10 so every split is non-empty")
        if self.questions_per_scene < 1:
            raise InvalidArgumentError("questions_per_scene must be positive")
        if len(self.split_fractions) != 3 or abs(sum(self.split_fractions) - 1.0) > 1e-9:
            raise InvalidArgumentError("split fractions must be three values summing to 1.0")
        if not 0.0 < self.cap_fraction <= 1.0:
            raise InvalidArgumentError("cap_fraction must be in (0, 1]")
        if self.workers < 1:
            raise InvalidArgumentError("workers must be positive")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["split_fractions"] = list(self.split_fractions)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "DatasetConfig":
        d = dict(d)
        if "split_fractions" in d:
            d["split_fractions"] = tuple(d["split_fractions"])
        return cls(**d)


@dataclass
class DatasetManifest:
    config: dict
    tool_version: str
    split_scene_ids: dict[str, list[int]]
    counts: dict[str, dict[str, int]]
    answer_frequencies: dict[str, dict[str, int]]
    warnings: list[str] = field(default_factory=list)
    digests: dict[str, str] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "DatasetManifest":
        return cls(**{k: d[k] for k in (
            "config", "tool_version", "split_scene_ids", "counts",
            "answer_frequencies", "warnings", "digests")})

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path) -> "DatasetManifest":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


SPLIT_NAMES = ("train", "val", "test")


def split_scene_ids(n_scenes: int, fractions, master_seed: int) -> dict[str, list[int]]:
    """Shuffle scene ids and cut at floor(train), floor(val); rest is test."""
    ids = list(range(n_scenes))
    stream = SeedStream(mix64(SPLIT_SALT, master_seed))
    for i in range(n_scenes - 1, 0, -1):  # Fisher-Yates
        j = stream.randint(i + 1)
        ids[i], ids[j] = ids[j], ids[i]
    n_train = int(fractions[0] * n_scenes)
    n_val = int(fractions[1] * n_scenes)
    return {
        "train": sorted(ids[:n_train]),
        "val": sorted(ids[n_train:n_train + n_val]),
        "test": sorted(ids[n_train + n_val:]),
    }


_WORKER_SOURCES: dict = {}


def _scene_source(config: DatasetConfig):
    """Per-process cached waveform source (bank loading is not free)."""
    key = (config.bank_manifest, config.master_seed)
    if key not in _WORKER_SOURCES:
        if config.bank_manifest is None:
            _WORKER_SOURCES[key] = SynthesisSource(config.master_seed)
        else:
            manifest = Path(config.bank_manifest)
            _WORKER_SOURCES[key] = BankSource(load_bank(manifest.parent, manifest))
    return _WORKER_SOURCES[key]


def _produce_scene(args) -> dict:
    """Compose, question, and optionally render one scene (worker task)."""
    config_dict, scene_id = args
    config = DatasetConfig.from_dict(config_dict)
    out_dir = Path(config.output_dir)

    if config.bank_manifest is None:
        tuple_space = None
    else:
        tuple_space = _scene_source(config).attribute_tuples()

    scene = compose_scene(scene_id, config.master_seed, tuple_space)

    scene_warnings: list[str] = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        records = generate_questions(
            scene,
            builtin_catalog(),
            config.questions_per_scene,
            config.master_seed,
            cap_fraction=config.cap_fraction,
        )
        scene_warnings.extend(str(w.message) for w in caught)

    questions = []
    for i, rec in enumerate(records):
        d = rec.to_dict()
        d["question_id"] = scene_id * config.questions_per_scene + i
        questions.append(d)

    digests: dict[str, str] = {}
    if config.render_audio or config.render_spectrograms:
        source = _scene_source(config)
        wave = render_scene(scene, source)
        if config.render_audio:
            rel = f"audio/scene_{scene_id:06d}.wav"
            write_wav(out_dir / rel, wave)
            digests[rel] = _sha256_file(out_dir / rel)
        if config.render_spectrograms:
            rel = f"spectrograms/scene_{scene_id:06d}.png"
            write_spectrogram_png(out_dir / rel, spectrogram(wave))
            digests[rel] = _sha256_file(out_dir / rel)

    return {
        "scene": scene.to_dict(),
        "questions": questions,
        "warnings": scene_warnings,
        "digests": digests,
    }


def _sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_jsonl(path, rows) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, separators=(",", ":")) + "\n")


def read_jsonl(path) -> list[dict]:
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


def generate_dataset(config: DatasetConfig) -> DatasetManifest:
    """Produce a complete dataset; fully deterministic per config values."""
    config.validate()
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if config.render_audio:
        (out_dir / "audio").mkdir(exist_ok=True)
    if config.render_spectrograms:
        (out_dir / "spectrograms").mkdir(exist_ok=True)

    log.info("generating %d scenes x %d questions into %s (workers=%d)",
             config.n_scenes, config.questions_per_scene, out_dir, config.workers)
    tasks = [(config.to_dict(), scene_id) for scene_id in range(config.n_scenes)]
    if config.workers == 1:
        results = [_produce_scene(t) for t in tasks]
    else:
        chunk = max(1, config.n_scenes // (config.workers * 8))
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(_produce_scene, tasks, chunksize=chunk))
    results.sort(key=lambda r: r["scene"]["scene_id"])

    digests: dict[str, str] = {}
    all_warnings: list[str] = []
    for r in results:
        digests.update(r["digests"])
        all_warnings.extend(r["warnings"])

    scenes_payload = {"scenes": [r["scene"] for r in results]}
    (out_dir / "scenes.json").write_text(
        json.dumps(scenes_payload, separators=(",", ":")) + "\n", encoding="utf-8"
    )
    digests["scenes.json"] = _sha256_file(out_dir / "scenes.json")

    splits = split_scene_ids(config.n_scenes, config.split_fractions, config.master_seed)
    counts: dict[str, dict[str, int]] = {}
    frequencies: dict[str, dict[str, int]] = {}
    for name in SPLIT_NAMES:
        members = set(splits[name])
        rows = [q for r in results if r["scene"]["scene_id"] in members for q in r["questions"]]
        rel = f"questions_{name}.jsonl"
        _write_jsonl(out_dir / rel, rows)
        digests[rel] = _sha256_file(out_dir / rel)
        counts[name] = {"scenes": len(splits[name]), "questions": len(rows)}
        freq: dict[str, int] = {}
        for q in rows:
            freq[q["answer"]] = freq.get(q["answer"], 0) + 1
        frequencies[name] = dict(sorted(freq.items()))

    manifest = DatasetManifest(
        config=config.to_dict(),
        tool_version=__version__,
        split_scene_ids=splits,
        counts=counts,
        answer_frequencies=frequencies,
        warnings=all_warnings,
        digests=dict(sorted(digests.items())),
    )
    manifest.save(out_dir / "manifest.json")
    log.info("dataset complete: %s questions, %d warnings",
             {k: v["questions"] for k, v in counts.items()}, len(all_warnings))
    return manifest


def _render_existing_scene(args) -> dict:
    """Render media for one stored scene (worker task for render_dataset)."""
    config_dict, scene_dict, do_audio, do_spec = args
    config = DatasetConfig.from_dict(config_dict)
    out_dir = Path(config.output_dir)
    scene = Scene.from_dict(scene_dict)
    source = _scene_source(config)
    wave = render_scene(scene, source)
    digests = {}
    if do_audio:
        rel = f"audio/scene_{scene.scene_id:06d}.wav"
        write_wav(out_dir / rel, wave)
        digests[rel] = _sha256_file(out_dir / rel)
    if do_spec:
        rel = f"spectrograms/scene_{scene.scene_id:06d}.png"
        write_spectrogram_png(out_dir / rel, spectrogram(wave))
        digests[rel] = _sha256_file(out_dir / rel)
    return digests


def render_dataset(
    dataset_dir, workers: int = 1, render_audio: bool = True, render_spectrograms: bool = True
) -> DatasetManifest:
    """Render WAV/PNG files for the scenes of an existing dataset."""
    dataset_dir = Path(dataset_dir)
    manifest = DatasetManifest.load(dataset_dir / "manifest.json")
    config = DatasetConfig.from_dict(manifest.config)
    config.output_dir = str(dataset_dir)
    scenes_doc = json.loads((dataset_dir / "scenes.json").read_text(encoding="utf-8"))

    if render_audio:
        (dataset_dir / "audio").mkdir(exist_ok=True)
    if render_spectrograms:
        (dataset_dir / "spectrograms").mkdir(exist_ok=True)

    tasks = [
        (config.to_dict(), sd, render_audio, render_spectrograms)
        for sd in scenes_doc["scenes"]
    ]
    if workers == 1:
        results = [_render_existing_scene(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_render_existing_scene, tasks, chunksize=1))

    for digests in results:
        manifest.digests.update(digests)
    manifest.digests = dict(sorted(manifest.digests.items()))
    manifest.config["render_audio"] = manifest.config["render_audio"] or render_audio
    manifest.config["render_spectrograms"] = (
        manifest.config["render_spectrograms"] or render_spectrograms
    )
    manifest.save(dataset_dir / "manifest.json")
    return manifest


def _requestion_scene(args) -> list[dict]:
    config_dict, scene_dict = args
    config = DatasetConfig.from_dict(config_dict)
    scene = Scene.from_dict(scene_dict)
    records = generate_questions(
        scene,
        builtin_catalog(),
        config.questions_per_scene,
        config.master_seed,
        cap_fraction=config.cap_fraction,
    )
    out = []
    for i, rec in enumerate(records):
        d = rec.to_dict()
        d["question_id"] = scene.scene_id * config.questions_per_scene + i
        out.append(d)
    return out


def regenerate_questions(
    dataset_dir,
    questions_per_scene: int | None = None,
    seed: int | None = None,
    cap_fraction: float | None = None,
    workers: int = 1,
) -> DatasetManifest:
    """Rewrite the question files of an existing dataset (splits unchanged)."""
    dataset_dir = Path(dataset_dir)
    manifest = DatasetManifest.load(dataset_dir / "manifest.json")
    config = DatasetConfig.from_dict(manifest.config)
    config.output_dir = str(dataset_dir)
    if questions_per_scene is not None:
        config.questions_per_scene = questions_per_scene
    if seed is not None:
        config.master_seed = seed
    if cap_fraction is not None:
        config.cap_fraction = cap_fraction
    scenes_doc = json.loads((dataset_dir / "scenes.json").read_text(encoding="utf-8"))

    tasks = [(config.to_dict(), sd) for sd in scenes_doc["scenes"]]
    if workers == 1:
        results = [_requestion_scene(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_requestion_scene, tasks, chunksize=8))
    by_scene = {rows[0]["scene_id"]: rows for rows in results if rows}

    for name in SPLIT_NAMES:
        rows = [q for sid in manifest.split_scene_ids[name] for q in by_scene.get(sid, [])]
        rel = f"questions_{name}.jsonl"
        _write_jsonl(dataset_dir / rel, rows)
        manifest.digests[rel] = _sha256_file(dataset_dir / rel)
        manifest.counts[name]["questions"] = len(rows)
        freq: dict[str, int] = {}
        for q in rows:
            freq[q["answer"]] = freq.get(q["answer"], 0) + 1
        manifest.answer_frequencies[name] = dict(sorted(freq.items()))

    manifest.config = config.to_dict()
    manifest.digests = dict(sorted(manifest.digests.items()))
    manifest.save(dataset_dir / "manifest.json")
    return manifest


@dataclass
class Violation:
    kind: str
    message: str
    question_id: int | None = None
    scene_id: int | None = None

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class VerificationReport:
    n_scenes: int
    n_questions: int
    violations: list[Violation]

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "n_scenes": self.n_scenes,
            "n_questions": self.n_questions,
            "n_violations": len(self.violations),
            "violations": [v.to_dict() for v in self.violations],
        }


def verify_dataset(dataset_dir) -> VerificationReport:
    """Re-check every stored answer with the brute-force oracle.

    Also re-runs the degeneracy check, confirms vocabulary closure and
    per-type answer domains, and validates split disjointness/coverage.
    """
    dataset_dir = Path(dataset_dir)
    manifest = DatasetManifest.load(dataset_dir / "manifest.json")
    scenes_doc = json.loads((dataset_dir / "scenes.json").read_text(encoding="utf-8"))
    scenes = {d["scene_id"]: Scene.from_dict(d) for d in scenes_doc["scenes"]}

    violations: list[Violation] = []

    seen: dict[int, str] = {}
    for name in SPLIT_NAMES:
        for sid in manifest.split_scene_ids.get(name, []):
            if sid in seen:
                violations.append(Violation(
                    "split_overlap",
                    f"scene {sid} appears in splits {seen[sid]!r} and {name!r}",
                    scene_id=sid,
                ))
            seen[sid] = name
    if set(seen) != set(scenes):
        missing = sorted(set(scenes) - set(seen))
        extra = sorted(set(seen) - set(scenes))
        violations.append(Violation(
            "split_coverage",
            f"splits do not partition the scene set (missing={missing[:5]}, unknown={extra[:5]})",
        ))

    vocabulary = set(ANSWER_VOCABULARY)
    n_questions = 0
    for name in SPLIT_NAMES:
        path = dataset_dir / f"questions_{name}.jsonl"
        if not path.exists():
            continue
        members = set(manifest.split_scene_ids.get(name, ()))
        for row in read_jsonl(path):
            n_questions += 1
            qid = row["question_id"]
            record = QuestionRecord.from_dict(row)
            scene = scenes.get(record.scene_id)
            if scene is None:
                violations.append(Violation(
                    "unknown_scene", f"question {qid} references missing scene {record.scene_id}",
                    question_id=qid, scene_id=record.scene_id))
                continue
            if record.scene_id not in members:
                violations.append(Violation(
                    "split_mismatch",
                    f"question {qid} sits in split {name!r} but its scene is not",
                    question_id=qid, scene_id=record.scene_id))
            if record.answer not in vocabulary:
                violations.append(Violation(
                    "vocabulary", f"question {qid} answer {record.answer!r} is outside the 47-word vocabulary",
                    question_id=qid))
                continue
            if record.answer not in ANSWERS_BY_TYPE[record.question_type]:
                violations.append(Violation(
                    "type_domain",
                    f"question {qid} answer {record.answer!r} is outside the "
                    f"{record.question_type.value} answer row",
                    question_id=qid))
                continue
            oracle_answer = brute_force_answer(record.program, scene)
            if oracle_answer is ILL_POSED:
                violations.append(Violation(
                    "ill_posed", f"question {qid} is ill-posed against its scene",
                    question_id=qid, scene_id=record.scene_id))
                continue
            if oracle_answer != record.answer:
                violations.append(Violation(
                    "answer_mismatch",
                    f"question {qid}: stored answer {record.answer!r} but oracle says {oracle_answer!r}",
                    question_id=qid, scene_id=record.scene_id))
                continue
            if check_degenerate(record.program, scene):
                violations.append(Violation(
                    "degenerate", f"question {qid} is degenerate against its scene",
                    question_id=qid, scene_id=record.scene_id))

    return VerificationReport(n_scenes=len(scenes), n_questions=n_questions, violations=violations)
