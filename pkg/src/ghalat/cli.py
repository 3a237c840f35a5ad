"""Command line interface.

Subcommands mirror the pipeline stages:

    ghalat clean  --input dump.jsonl --output candidates.txt
    ghalat filter --input candidates.txt --output clean.txt
    ghalat split  --input clean.txt --output-dir splits --test-size 1000
    ghalat inject --input splits/train.txt --output train.tsv --psi 0.05
    ghalat mix    --inputs a.tsv b.tsv --output mixed.tsv
    ghalat stats  --input train.tsv
    ghalat eval   --ref ref.txt --hyp hyp.txt --src src.txt

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from . import __version__
from .filtering import FilterConfig
from .inject import CorruptionConfig, Fixed, Mixed, Varied
from .metrics import EmptyCorpus, EmptyReference
from .normalize import NormalizerConfig
from .pipeline import (
    DataError,
    SplitSpec,
    clean_stage,
    eval_report,
    filter_stage,
    format_rate_table,
    inject_stage,
    mix_stage,
    split_stage,
    stats_report,
)


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; remap to 1 per the contract."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="stage config JSON file")
    common.add_argument("--seed", type=int, help="64-bit RNG seed")
    common.add_argument("--workers", type=int, default=1, help="parallel workers")
    common.add_argument("--manifest", type=Path, help="write a provenance manifest")
    return common


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part]
    except ValueError:
        raise DataError(f"expected comma-separated numbers, got {text!r}")


def _write_manifest(manifest, args) -> None:
    if args.manifest is not None:
        manifest.write(args.manifest)


def cmd_clean(args) -> int:
    config = (
        NormalizerConfig.from_file(args.config) if args.config else NormalizerConfig()
    )
    manifest = clean_stage(args.input, args.output, config, fmt=args.format)
    _write_manifest(manifest, args)
    print(
        f"clean: {manifest.counts_in} articles -> {manifest.counts_out} lines"
        f" ({manifest.extra['skipped_records']} records skipped)",
        file=sys.stderr,
    )
    return 0


def cmd_filter(args) -> int:
    config = FilterConfig.from_file(args.config) if args.config else FilterConfig()
    manifest = filter_stage(args.input, args.output, config, report_path=args.report)
    _write_manifest(manifest, args)
    print(
        f"filter: kept {manifest.counts_out} of {manifest.counts_in} lines",
        file=sys.stderr,
    )
    return 0


def cmd_inject(args) -> int:
    config = (
        CorruptionConfig.from_file(args.config) if args.config else CorruptionConfig()
    )
    if args.psi is not None:
        values = _parse_floats(args.psi)
        policy = Fixed(values[0]) if len(values) == 1 else Mixed(tuple(values))
        config = dataclasses.replace(config, psi_policy=policy)
    elif args.psi_range is not None:
        values = _parse_floats(args.psi_range)
        if len(values) != 2:
            raise DataError("--psi-range needs exactly two numbers: lo,hi")
        config = dataclasses.replace(config, psi_policy=Varied(values[0], values[1]))
    if args.seed is not None:
        config = config.with_seed(args.seed)
    manifest = inject_stage(
        args.input,
        args.output,
        config,
        workers=args.workers,
        oplog_path=args.oplog,
    )
    _write_manifest(manifest, args)
    print(
        f"inject: {manifest.counts_in} lines -> {manifest.counts_out} pairs"
        f" ({manifest.extra['discarded_empty']} discarded)",
        file=sys.stderr,
    )
    return 0


def cmd_mix(args) -> int:
    manifest = mix_stage(args.inputs, args.output)
    _write_manifest(manifest, args)
    print(f"mix: {manifest.counts_out} pairs", file=sys.stderr)
    return 0


def cmd_split(args) -> int:
    spec = SplitSpec(
        test_size=args.test_size,
        dev_size=args.dev_size,
        seed=args.seed if args.seed is not None else 0,
    )
    manifest = split_stage(args.input, args.output_dir, spec)
    _write_manifest(manifest, args)
    print(
        "split: train {train} / dev {dev} / test {test}".format(**manifest.extra),
        file=sys.stderr,
    )
    return 0


def cmd_stats(args) -> int:
    report = stats_report(args.input, average=args.average)
    data = {"cer": report.cer, "wer": report.wer, "counts": report.to_dict()}
    if args.json:
        print(json.dumps(data, indent=2, sort_keys=True))
    else:
        print(format_rate_table(data))
    return 0


def cmd_eval(args) -> int:
    report = eval_report(args.ref, args.hyp, args.src)
    if args.json:
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        print(format_rate_table(report))
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="ghalat", description=__doc__.strip().splitlines()[0])
    parser.add_argument("--version", action="version", version=f"ghalat {__version__}")
    common = _common_flags()
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("clean", parents=[common], help="normalize article dumps")
    p.add_argument("--input", required=True, type=Path)
    p.add_argument("--output", required=True, type=Path)
    p.add_argument("--format", choices=("jsonl", "plain"), default="jsonl")
    p.set_defaults(func=cmd_clean)

    p = sub.add_parser("filter", parents=[common], help="drop low-quality lines")
    p.add_argument("--input", required=True, type=Path)
    p.add_argument("--output", required=True, type=Path)
    p.add_argument("--report", type=Path, help="drop report TSV path")
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("inject", parents=[common], help="synthesize error pairs")
    p.add_argument("--input", required=True, type=Path)
    p.add_argument("--output", required=True, type=Path)
    p.add_argument("--psi", help="corruption ratio, or comma list for a mixed set")
    p.add_argument("--psi-range", help="lo,hi for per-line uniform ratios")
    p.add_argument("--oplog", type=Path, help="write a JSONL operation log")
    p.set_defaults(func=cmd_inject)

    p = sub.add_parser("mix", parents=[common], help="concatenate pair files")
    p.add_argument("--inputs", required=True, nargs="+", type=Path)
    p.add_argument("--output", required=True, type=Path)
    p.set_defaults(func=cmd_mix)

    p = sub.add_parser("split", parents=[common], help="train/dev/test partition")
    p.add_argument("--input", required=True, type=Path)
    p.add_argument("--output-dir", required=True, type=Path)
    p.add_argument("--test-size", type=int, default=100000)
    p.add_argument("--dev-size", type=int, default=10000)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("stats", parents=[common], help="corruption level of a pair file")
    p.add_argument("--input", required=True, type=Path)
    p.add_argument("--average", choices=("micro", "macro"), default="micro")
    p.add_argument("--json", action="store_true", help="emit JSON instead of a table")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("eval", parents=[common], help="score hypotheses against references")
    p.add_argument("--ref", required=True, type=Path)
    p.add_argument("--hyp", required=True, type=Path)
    p.add_argument("--src", type=Path, help="corrupted source, enables reduction rates")
    p.add_argument("--json", action="store_true", help="emit JSON instead of a table")
    p.set_defaults(func=cmd_eval)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DataError, EmptyCorpus, EmptyReference, ValueError, OSError) as exc:
        print(f"ghalat: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
