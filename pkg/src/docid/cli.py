"""Command-line interface.

Exit codes: 0 success, 2 validation error (bad input, files, schemas),
3 runtime/provider failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import pipeline, synth
from .calibration import load_model
from .errors import DocidError, ValidationError

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_RUNTIME = 3


def _config_from_args(args) -> pipeline.PipelineConfig:
    path = getattr(args, "config", None) or os.environ.get("DOCID_CONFIG")
    overrides = {}
    for key in ("strategy", "fusion_rule", "review_threshold", "workers"):
        val = getattr(args, key, None)
        if val is not None:
            overrides[key] = val
    if getattr(args, "fixture", None):
        overrides["provider_kind"] = "fixture"
        overrides["provider_path"] = args.fixture
    return pipeline.load_config(path, **overrides)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="pipeline config JSON (or $DOCID_CONFIG)")
    p.add_argument("--strategy", choices=pipeline.STRATEGIES)
    p.add_argument("--fusion-rule", dest="fusion_rule",
                   choices=pipeline.FUSION_RULES)
    p.add_argument("--review-threshold", dest="review_threshold", type=float)
    p.add_argument("--workers", type=int)
    p.add_argument("--fixture", help="OCR fixture JSON (hash -> text)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="docid",
        description="Identity-document image classification by fused "
                    "keypoint and keyword matching.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-synthetic", help="render a synthetic card corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--samples", type=int, default=5, help="samples per class")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--kind", choices=("clean", "degraded", "invariance"),
                   default="clean")

    p = sub.add_parser("enroll", help="extract and cache class features")
    p.add_argument("--manifest", required=True)
    p.add_argument("--registry", required=True)
    _add_common(p)

    p = sub.add_parser("train-calibration",
                       help="fit the z-score logistic model on a labeled corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--registry", required=True)
    p.add_argument("--out", required=True)
    _add_common(p)

    p = sub.add_parser("classify", help="classify one image")
    p.add_argument("image")
    p.add_argument("--registry", required=True)
    p.add_argument("--model", help="calibration model JSON")
    _add_common(p)

    p = sub.add_parser("evaluate", help="classify a labeled corpus and report")
    p.add_argument("--corpus", required=True)
    p.add_argument("--registry", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--model", help="calibration model JSON")
    _add_common(p)

    p = sub.add_parser("export-review-queue",
                       help="re-export flagged decisions of an evaluate run")
    p.add_argument("--eval-dir", required=True)
    p.add_argument("--out", required=True)
    return parser


def run(args) -> int:
    if args.command == "gen-synthetic":
        summary = synth.gen_corpus(args.out, samples_per_class=args.samples,
                                   seed=args.seed, kind=args.kind)
        print(json.dumps(summary, sort_keys=True))
        return EXIT_OK

    if args.command == "enroll":
        config = _config_from_args(args)
        summary = pipeline.enroll(args.manifest, args.registry, config)
        print(json.dumps(summary, sort_keys=True))
        return EXIT_OK

    if args.command == "train-calibration":
        config = _config_from_args(args)
        registry = pipeline.load_registry(args.registry)
        model = pipeline.train_calibration(args.corpus, registry, args.out, config)
        print(json.dumps({"w": model.w, "b": model.b, "epochs": model.epochs,
                          "final_loss": model.final_loss,
                          "trained_on": model.trained_on}, sort_keys=True))
        return EXIT_OK

    if args.command == "classify":
        config = _config_from_args(args)
        registry = pipeline.load_registry(args.registry)
        model = load_model(args.model) if args.model else None
        detail = pipeline.classify(args.image, registry, config, model=model)
        print(json.dumps(detail, indent=1, sort_keys=True))
        return EXIT_OK

    if args.command == "evaluate":
        config = _config_from_args(args)
        registry = pipeline.load_registry(args.registry)
        model = load_model(args.model) if args.model else None
        report = pipeline.evaluate(args.corpus, registry, config, model=model,
                                   out_dir=args.out)
        print(json.dumps(report, indent=1, sort_keys=True))
        return EXIT_OK

    if args.command == "export-review-queue":
        n = pipeline.export_review_queue(args.eval_dir, args.out)
        print(json.dumps({"exported": n, "out": args.out}, sort_keys=True))
        return EXIT_OK

    raise ValidationError(f"unknown command {args.command!r}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return run(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except DocidError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
