"""Command-line entry point.

Subcommands: generate, render, questions, verify, evaluate, baselines.
Options given on the command line override values from an optional JSON
config file (--config); the effective configuration is echoed into the
dataset manifest.  The CLEAR_LOG environment variable sets the log level.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .errors import AqagenError, InvalidArgumentError
from .evaluate import baseline_majority, baseline_random, score
from .pipeline import (
    DatasetConfig,
    generate_dataset,
    regenerate_questions,
    render_dataset,
    verify_dataset,
)

log = logging.getLogger("aqagen")


def _setup_logging() -> None:
    level = os.environ.get("CLEAR_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _parse_split(text: str) -> tuple[float, float, float]:
    parts = [float(p) for p in text.split(",")]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("--split needs three comma-separated fractions")
    return tuple(parts)  # type: ignore[return-value]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aqagen", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    gen = sub.add_parser("generate", help="generate a complete dataset")
    gen.add_argument("--config", help="JSON config file with DatasetConfig fields")
    gen.add_argument("--scenes", type=int, help="number of scenes")
    gen.add_argument("--questions-per-scene", type=int, help="questions per scene (20 or 40 are the usual choices)")
    gen.add_argument("--seed", type=int, help="master seed")
    gen.add_argument("--out", help="output directory")
    gen.add_argument("--workers", type=int, help="scene-level parallelism")
    gen.add_argument("--no-audio", action="store_true", help="skip WAV rendering")
    gen.add_argument("--no-spectrograms", action="store_true", help="skip PNG rendering")
    gen.add_argument("--bank-manifest", help="JSON manifest of a recording bank (default: synthesis)")
    gen.add_argument("--split", type=_parse_split, help="train,val,test fractions, e.g. 0.7,0.15,0.15")
    gen.add_argument("--cap-fraction", type=float, help="per-type modal answer cap during generation")

    ren = sub.add_parser("render", help="render audio/spectrograms for an existing dataset")
    ren.add_argument("--out", required=True, help="dataset directory")
    ren.add_argument("--workers", type=int, default=1)
    ren.add_argument("--no-audio", action="store_true")
    ren.add_argument("--no-spectrograms", action="store_true")

    que = sub.add_parser("questions", help="regenerate question files for an existing dataset")
    que.add_argument("--out", required=True, help="dataset directory")
    que.add_argument("--questions-per-scene", type=int)
    que.add_argument("--seed", type=int)
    que.add_argument("--cap-fraction", type=float)
    que.add_argument("--workers", type=int, default=1)

    ver = sub.add_parser("verify", help="re-check a dataset with the brute-force oracle")
    ver.add_argument("dataset_dir", help="dataset directory")

    ev = sub.add_parser("evaluate", help="score predictions against gold questions")
    ev.add_argument("--gold", required=True, help="gold questions JSONL")
    ev.add_argument("--pred", required=True, help="predictions JSONL ({question_id, answer} per line)")

    base = sub.add_parser("baselines", help="chance level and majority-class baselines")
    base.add_argument("--gold", required=True, help="gold questions JSONL")
    base.add_argument("--train", help="training questions JSONL (enables the majority baseline)")
    base.add_argument("--trials", type=int, default=10)
    base.add_argument("--seed", type=int, default=0)

    return parser


def _effective_config(args: argparse.Namespace) -> DatasetConfig:
    values: dict = {}
    if args.config:
        path = Path(args.config)
        if not path.exists():
            raise InvalidArgumentError(f"config file not found: {path}")
        values.update(json.loads(path.read_text(encoding="utf-8")))
    overrides = {
        "n_scenes": args.scenes,
        "questions_per_scene": args.questions_per_scene,
        "master_seed": args.seed,
        "output_dir": args.out,
        "workers": args.workers,
        "bank_manifest": args.bank_manifest,
        "split_fractions": args.split,
        "cap_fraction": args.cap_fraction,
    }
    values.update({k: v for k, v in overrides.items() if v is not None})
    if args.no_audio:
        values["render_audio"] = False
    if args.no_spectrograms:
        values["render_spectrograms"] = False
    if "n_scenes" not in values:
        raise InvalidArgumentError("number of scenes is required (--scenes or config file)")
    return DatasetConfig.from_dict(values)


def run(argv: list[str] | None = None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        if args.subcommand == "generate":
            config = _effective_config(args)
            config.validate()
            manifest = generate_dataset(config)
            total_q = sum(c["questions"] for c in manifest.counts.values())
            print(f"generated {config.n_scenes} scenes / {total_q} questions in {config.output_dir}")
            if manifest.warnings:
                print(f"{len(manifest.warnings)} warning(s); see manifest.json")
            return 0

        if args.subcommand == "render":
            manifest = render_dataset(
                args.out,
                workers=args.workers,
                render_audio=not args.no_audio,
                render_spectrograms=not args.no_spectrograms,
            )
            n_scenes = sum(len(v) for v in manifest.split_scene_ids.values())
            print(f"rendered media for {n_scenes} scenes in {args.out}")
            return 0

        if args.subcommand == "questions":
            manifest = regenerate_questions(
                args.out,
                questions_per_scene=args.questions_per_scene,
                seed=args.seed,
                cap_fraction=args.cap_fraction,
                workers=args.workers,
            )
            total_q = sum(c["questions"] for c in manifest.counts.values())
            print(f"regenerated {total_q} questions in {args.out}")
            return 0

        if args.subcommand == "verify":
            report = verify_dataset(args.dataset_dir)
            print(f"checked {report.n_questions} questions across {report.n_scenes} scenes")
            for v in report.violations:
                print(f"VIOLATION [{v.kind}] {v.message}")
            print(f"{len(report.violations)} violation(s)")
            return 0 if report.ok else 1

        if args.subcommand == "evaluate":
            report = score(args.pred, args.gold)
            print(report.format_table())
            print()
            print(json.dumps(report.to_dict(), indent=2))
            return 0

        if args.subcommand == "baselines":
            chance = baseline_random(args.gold, seed=args.seed, n_trials=args.trials)
            print(f"chance level ({args.trials} trials): {chance:.4f}")
            if args.train:
                result = baseline_majority(args.train, args.gold)
                print(f"majority answer: {result.majority_answer!r}")
                print(f"majority accuracy: {result.report.overall_accuracy:.4f}")
                print(f"per-type majority accuracy: {result.per_type_majority_accuracy:.4f}")
            return 0

    except InvalidArgumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (AqagenError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    parser.error(f"unknown subcommand {args.subcommand!r}")
    return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
