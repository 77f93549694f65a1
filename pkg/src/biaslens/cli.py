"""Command-line front end: validate, iias, accdiff, zeroshot, synth, replicate.

Exit codes: 0 success, 1 data or domain error, 2 usage error. All randomness
flows from the --seed flag, and identical invocations write byte-identical
outputs.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .core import DomainError, Gender, validate_manifest
from .ingest import (
    IngestError,
    default_vocabulary,
    load_accuracy_runs,
    load_embeddings,
    load_manifest,
    load_predictions,
    load_vocabulary,
    write_embeddings,
    write_manifest,
)
from .metrics import iias_protocol_run, summarize_accuracy_runs
from .report import (
    build_accuracy_difference_table,
    build_iias_table,
    build_occurrence_table,
    build_skewness_table,
    render,
    replicate_reference,
)
from .synth import SynthConfig, generate_pool, pool_manifest
from .zeroshot import build_distribution, skewness, topk_occurrence


def _u64(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("seed must be a non-negative integer")
    return value


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="biaslens",
        description="Audit gender-bias amplification in vision models from "
        "exported embeddings, accuracy tables, and zero-shot prediction logs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="check an embedding file against a manifest")
    p_validate.add_argument("--embeddings", required=True, help="path to an .embj file")
    p_validate.add_argument("--manifest", required=True, help="path to a manifest file")

    p_iias = sub.add_parser("iias", help="run the sampled association-score protocol")
    p_iias.add_argument("--embeddings", required=True)
    p_iias.add_argument("--manifest", required=True)
    p_iias.add_argument("--seed", required=True, type=_u64, help="sampling seed (required)")
    p_iias.add_argument("--format", choices=("md", "csv"), default="md")
    p_iias.add_argument("--out", help="output path (default: stdout)")

    p_acc = sub.add_parser("accdiff", help="accuracy differences from an accuracy table")
    p_acc.add_argument("--accuracy", required=True, help="path to the accuracy CSV")
    p_acc.add_argument("--format", choices=("md", "csv"), default="md")
    p_acc.add_argument("--out")

    p_zs = sub.add_parser("zeroshot", help="concentration and skewness of a prediction log")
    p_zs.add_argument("--predictions", required=True, help="path to the prediction CSV")
    p_zs.add_argument("--vocab", help="vocabulary file (default: bundled occupation list)")
    p_zs.add_argument("--k", type=int, default=3, help="top-k size (default 3)")
    p_zs.add_argument(
        "--skew-mode", choices=("full", "observed"), default="full",
        help="measure skewness over the full vocabulary (default) or only observed labels",
    )
    p_zs.add_argument("--format", choices=("md", "csv"), default="md")
    p_zs.add_argument(
        "--out",
        help="base output path; writes <stem>.occurrence.<ext> and <stem>.skewness.<ext>",
    )

    p_synth = sub.add_parser("synth", help="generate a synthetic embedding pool")
    p_synth.add_argument("--out", required=True, help="output .embj path")
    p_synth.add_argument("--seed", required=True, type=_u64)
    p_synth.add_argument("--dim", type=int, default=8)
    p_synth.add_argument("--bias", type=float, default=1.0)
    p_synth.add_argument("--noise", type=float, default=0.0)
    p_synth.add_argument("--attribute-count", type=int, default=10, help="pool size per gender")
    p_synth.add_argument("--target-count", type=int, default=10, help="pool size per gender per class")
    p_synth.add_argument("--iterations", type=int, default=1, help="iterations the manifest declares")
    p_synth.add_argument("--manifest-out", help="manifest path (default: <out>.manifest)")

    p_rep = sub.add_parser("replicate", help="recompute the bundled reference-study aggregates")
    p_rep.add_argument("--out", help="write the machine-readable summary CSV here")

    return parser


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _cmd_validate(args) -> int:
    records = load_embeddings(args.embeddings)
    manifest = load_manifest(args.manifest)
    report = validate_manifest(manifest, records)
    print(report.summary())
    return 0 if report.ok else 1


def _cmd_iias(args) -> int:
    records = load_embeddings(args.embeddings)
    manifest = load_manifest(args.manifest)
    report = validate_manifest(manifest, records)
    if not report.ok:
        print(report.summary(), file=sys.stderr)
        return 1
    results = iias_protocol_run(records, manifest, seed=args.seed)
    _emit(render(build_iias_table(results), args.format), args.out)
    return 0


def _cmd_accdiff(args) -> int:
    runs = load_accuracy_runs(args.accuracy)
    table = build_accuracy_difference_table(summarize_accuracy_runs(runs))
    _emit(render(table, args.format), args.out)
    return 0


def _zeroshot_paths(out: str, fmt: str) -> tuple[Path, Path]:
    base = Path(out)
    stem = base.name[: -len(base.suffix)] if base.suffix else base.name
    return (
        base.with_name(f"{stem}.occurrence.{fmt}"),
        base.with_name(f"{stem}.skewness.{fmt}"),
    )


def _cmd_zeroshot(args) -> int:
    vocab = load_vocabulary(args.vocab) if args.vocab else default_vocabulary()
    log = load_predictions(args.predictions, vocab)
    if not log.records:
        print("prediction log is empty; nothing to analyse", file=sys.stderr)
        return 1
    include_zeros = args.skew_mode == "full"

    occurrence_cells = []
    skew_cells = []
    for encoder in log.encoders():
        family = log.encoder_family(encoder)
        per_gender = {}
        skew_pair = {}
        for gender in (Gender.MAN, Gender.WOMAN):
            dist = build_distribution(log, encoder, gender, vocab)
            per_gender[gender] = topk_occurrence(dist, k=args.k)
            skew_pair[gender] = skewness(dist, include_zero_counts=include_zeros)
        occurrence_cells.append((encoder, family, per_gender[Gender.MAN], per_gender[Gender.WOMAN]))
        skew_cells.append((encoder, family, skew_pair[Gender.MAN], skew_pair[Gender.WOMAN]))

    occurrence_text = render(build_occurrence_table(occurrence_cells), args.format)
    skew_text = render(build_skewness_table(skew_cells), args.format)
    if args.out is None:
        sys.stdout.write(occurrence_text)
        sys.stdout.write("\n")
        sys.stdout.write(skew_text)
    else:
        occ_path, skew_path = _zeroshot_paths(args.out, args.format)
        occ_path.write_text(occurrence_text, encoding="utf-8")
        skew_path.write_text(skew_text, encoding="utf-8")
        print(f"wrote {occ_path} and {skew_path}")
    return 0


def _cmd_synth(args) -> int:
    config = SynthConfig(
        dim=args.dim,
        bias=args.bias,
        noise=args.noise,
        attribute_count=args.attribute_count,
        target_count=args.target_count,
        seed=args.seed,
    )
    records = generate_pool(config)
    manifest = pool_manifest(config, iterations=args.iterations)
    write_embeddings(records, args.out)
    manifest_path = args.manifest_out or f"{args.out}.manifest"
    write_manifest(manifest, manifest_path)
    print(f"wrote {len(records)} records to {args.out} and manifest to {manifest_path}")
    return 0


def _cmd_replicate(args) -> int:
    summary = replicate_reference()
    sys.stdout.write(summary.to_text())
    if args.out:
        Path(args.out).write_text(summary.to_csv(), encoding="utf-8")
    return 0 if summary.ok else 1


_COMMANDS = {
    "validate": _cmd_validate,
    "iias": _cmd_iias,
    "accdiff": _cmd_accdiff,
    "zeroshot": _cmd_zeroshot,
    "synth": _cmd_synth,
    "replicate": _cmd_replicate,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except IngestError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (DomainError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
