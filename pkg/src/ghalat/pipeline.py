"""End-to-end orchestration: file formats, stage drivers, manifests.

Stages are pure functions from input files plus a config to output files.
Every stage can write a Manifest (JSON) recording inputs, outputs, a
digest of the exact config used, the seed, and line counts, so a chain of
manifests reconstructs the full provenance of any artifact.

Formats:
- article dumps: JSONL records with a "text" field, or plain text files
  with blank-line-separated articles
- corpora: one sentence per line, UTF-8, LF
- pair files: TSV `corrupted<TAB>clean<LF>`
- op logs: JSONL, one record per pair (line index, psi_used, ops)
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field
from multiprocessing import Pool
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from . import inject as inj
from .filtering import (
    DropReport,
    FilterConfig,
    build_lexicon,
    iter_filtered,
)
from .metrics import RateReport, corpus_rates, err
from .normalize import NormalizerConfig, RawArticle, segment_article

_INJECT_CHUNK = 512


class DataError(Exception):
    """Bad input data: unreadable, malformed, or inconsistent files."""


class InsufficientCorpus(DataError):
    """Corpus smaller than the requested split sizes."""


def digest_of(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class Manifest:
    stage: str
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    config_digest: str
    seed: int | None
    counts_in: int
    counts_out: int
    extra: dict = field(default_factory=dict)

    def to_json(self) -> str:
        data = {
            "stage": self.stage,
            "inputs": list(self.inputs),
            "outputs": list(self.outputs),
            "config_digest": self.config_digest,
            "seed": self.seed,
            "counts_in": self.counts_in,
            "counts_out": self.counts_out,
            "extra": self.extra,
        }
        return json.dumps(data, ensure_ascii=True, indent=2, sort_keys=True)

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")


@dataclass(frozen=True)
class SplitSpec:
    test_size: int = 100000
    dev_size: int = 10000
    seed: int = 0

    def __post_init__(self) -> None:
        if self.test_size < 0 or self.dev_size < 0:
            raise ValueError("split sizes must be >= 0")


# ---------------------------------------------------------------- readers

def _article_files(path: Path) -> list[Path]:
    if path.is_dir():
        return sorted(p for p in path.rglob("*") if p.is_file())
    if not path.exists():
        raise DataError(f"no such input: {path}")
    return [path]


def read_articles(
    path: str | Path,
    fmt: str = "jsonl",
    skipped: list | None = None,
) -> Iterator[RawArticle]:
    """Yield articles in deterministic order (path, then record order).

    Malformed JSONL records are skipped; pass a list to receive one entry
    per skip. A missing path is fatal.
    """
    if fmt not in ("jsonl", "plain"):
        raise DataError(f"unknown article format: {fmt!r}")
    for file in _article_files(Path(path)):
        if fmt == "jsonl":
            with file.open(encoding="utf-8") as handle:
                for lineno, raw in enumerate(handle, 1):
                    if not raw.strip():
                        continue
                    try:
                        record = json.loads(raw)
                        text = record["text"]
                        if not isinstance(text, str):
                            raise TypeError("text is not a string")
                    except (json.JSONDecodeError, KeyError, TypeError):
                        if skipped is not None:
                            skipped.append(f"{file}:{lineno}")
                        continue
                    ident = str(record.get("id", f"{file.name}:{lineno}"))
                    yield RawArticle(ident, text)
        else:
            chunks = file.read_text(encoding="utf-8").split("\n\n")
            for k, chunk in enumerate(c for c in chunks if c.strip()):
                yield RawArticle(f"{file.name}:{k}", chunk)


def read_lines(path: str | Path) -> Iterator[str]:
    with Path(path).open(encoding="utf-8") as handle:
        for raw in handle:
            yield raw.rstrip("\n")


def write_lines(path: str | Path, lines: Iterable[str]) -> int:
    count = 0
    with Path(path).open("w", encoding="utf-8", newline="\n") as handle:
        for line in lines:
            handle.write(line + "\n")
            count += 1
    return count


def read_pairs(path: str | Path) -> Iterator[tuple[str, str]]:
    """Yield (corrupted, clean) rows; any malformed row is fatal."""
    with Path(path).open(encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, 1):
            row = raw.rstrip("\n").split("\t")
            if len(row) != 2:
                raise DataError(f"{path}:{lineno}: expected 2 TSV fields, got {len(row)}")
            yield row[0], row[1]


def write_pairs(path: str | Path, pairs: Iterable[tuple[str, str]]) -> int:
    count = 0
    with Path(path).open("w", encoding="utf-8", newline="\n") as handle:
        for corrupted, clean in pairs:
            handle.write(f"{corrupted}\t{clean}\n")
            count += 1
    return count


# ----------------------------------------------------------------- stages

def clean_stage(
    input_path: str | Path,
    output_path: str | Path,
    config: NormalizerConfig = NormalizerConfig(),
    fmt: str = "jsonl",
) -> Manifest:
    """Articles in, normalized candidate lines out."""
    skipped: list = []
    articles = 0
    written = 0
    with Path(output_path).open("w", encoding="utf-8", newline="\n") as out:
        for article in read_articles(input_path, fmt, skipped):
            articles += 1
            for line in segment_article(article, config):
                out.write(line.text + "\n")
                written += 1
    return Manifest(
        stage="clean",
        inputs=(str(input_path),),
        outputs=(str(output_path),),
        config_digest=digest_of(config.to_json()),
        seed=None,
        counts_in=articles,
        counts_out=written,
        extra={"skipped_records": len(skipped)},
    )


def filter_stage(
    input_path: str | Path,
    output_path: str | Path,
    config: FilterConfig = FilterConfig(),
    report_path: str | Path | None = None,
) -> Manifest:
    """Two passes over the candidate file; kept lines plus a drop report."""
    lexicon = build_lexicon(read_lines(input_path))
    report = DropReport()
    kept = iter_filtered(read_lines(input_path), lexicon, config, report)
    written = write_lines(output_path, (line.text for line in kept))
    if report_path is None:
        report_path = str(output_path) + ".report.tsv"
    Path(report_path).write_text(report.to_tsv(), encoding="utf-8")
    return Manifest(
        stage="filter",
        inputs=(str(input_path),),
        outputs=(str(output_path), str(report_path)),
        config_digest=digest_of(config.to_json()),
        seed=None,
        counts_in=report.total,
        counts_out=written,
        extra={reason: count for reason, count in report.rows()},
    )


_WORKER_CONFIG: inj.CorruptionConfig | None = None


def _init_worker(config_json: str) -> None:
    global _WORKER_CONFIG
    _WORKER_CONFIG = inj.CorruptionConfig.from_json(config_json)


def _inject_chunk(task: tuple[int, list[str]]) -> tuple[list[str], list[str], int, int]:
    """Corrupt one chunk; returns TSV rows, log rows, discards, no-ops."""
    start, lines = task
    config = _WORKER_CONFIG
    rows: list[str] = []
    logs: list[str] = []
    discarded = 0
    noops = 0
    for offset, text in enumerate(lines):
        index = start + offset
        for pair in inj.corrupt_indexed(index, text, config):
            noops += sum(1 for op in pair.ops if not op.applied)
            if pair.corrupted == "":
                discarded += 1
                continue
            rows.append(f"{pair.corrupted}\t{pair.clean}\n")
            logs.append(
                json.dumps(pair.to_log_record(index), ensure_ascii=True, sort_keys=True)
                + "\n"
            )
    return rows, logs, discarded, noops


def _chunked(lines: Sequence[str], size: int) -> Iterator[tuple[int, list[str]]]:
    for start in range(0, len(lines), size):
        yield start, list(lines[start:start + size])


def inject_stage(
    input_path: str | Path,
    output_path: str | Path,
    config: inj.CorruptionConfig = inj.CorruptionConfig(),
    workers: int = 1,
    oplog_path: str | Path | None = None,
) -> Manifest:
    """Clean corpus in, corrupted/clean TSV out.

    Output depends only on (corpus, config): per-line seeds make chunk
    and worker boundaries invisible in the result.
    """
    lines = list(read_lines(input_path))
    config_json = config.to_json()
    tasks = _chunked(lines, _INJECT_CHUNK)
    if workers > 1:
        pool = Pool(workers, initializer=_init_worker, initargs=(config_json,))
        with pool:
            results = pool.imap(_inject_chunk, tasks, chunksize=1)
            chunks = list(results)
    else:
        _init_worker(config_json)
        chunks = [_inject_chunk(task) for task in tasks]
    written = 0
    discarded = 0
    noops = 0
    log_handle = None
    if oplog_path is not None:
        log_handle = Path(oplog_path).open("w", encoding="utf-8", newline="\n")
    try:
        with Path(output_path).open("w", encoding="utf-8", newline="\n") as out:
            for rows, logs, chunk_discards, chunk_noops in chunks:
                out.writelines(rows)
                written += len(rows)
                discarded += chunk_discards
                noops += chunk_noops
                if log_handle is not None:
                    log_handle.writelines(logs)
    finally:
        if log_handle is not None:
            log_handle.close()
    outputs = [str(output_path)]
    if oplog_path is not None:
        outputs.append(str(oplog_path))
    return Manifest(
        stage="inject",
        inputs=(str(input_path),),
        outputs=tuple(outputs),
        config_digest=digest_of(config_json),
        seed=config.seed,
        counts_in=len(lines),
        counts_out=written,
        extra={"discarded_empty": discarded, "noop_ops": noops},
    )


def split_corpus(
    lines: Sequence[str],
    spec: SplitSpec = SplitSpec(),
) -> tuple[list[str], list[str], list[str]]:
    """Deterministic shuffle by seed, then partition into train/dev/test."""
    if spec.test_size + spec.dev_size >= len(lines):
        raise InsufficientCorpus(
            f"need more than {spec.test_size + spec.dev_size} lines, have {len(lines)}"
        )
    order = list(range(len(lines)))
    random.Random(spec.seed).shuffle(order)
    test = [lines[i] for i in order[:spec.test_size]]
    dev = [lines[i] for i in order[spec.test_size:spec.test_size + spec.dev_size]]
    train = [lines[i] for i in order[spec.test_size + spec.dev_size:]]
    return train, dev, test


def split_stage(
    input_path: str | Path,
    output_dir: str | Path,
    spec: SplitSpec = SplitSpec(),
) -> Manifest:
    lines = list(read_lines(input_path))
    train, dev, test = split_corpus(lines, spec)
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = (out / "train.txt", out / "dev.txt", out / "test.txt")
    for path, part in zip(paths, (train, dev, test)):
        write_lines(path, part)
    spec_json = json.dumps(
        {"test_size": spec.test_size, "dev_size": spec.dev_size, "seed": spec.seed},
        sort_keys=True,
    )
    return Manifest(
        stage="split",
        inputs=(str(input_path),),
        outputs=tuple(str(p) for p in paths),
        config_digest=digest_of(spec_json),
        seed=spec.seed,
        counts_in=len(lines),
        counts_out=len(lines),
        extra={"train": len(train), "dev": len(dev), "test": len(test)},
    )


def mix_stage(
    input_paths: Sequence[str | Path],
    output_path: str | Path,
) -> Manifest:
    """Concatenate pair files in stable (file, then line) order."""
    if not input_paths:
        raise DataError("mix needs at least one input file")

    def all_pairs() -> Iterator[tuple[str, str]]:
        for path in input_paths:
            yield from read_pairs(path)

    written = write_pairs(output_path, all_pairs())
    return Manifest(
        stage="mix",
        inputs=tuple(str(p) for p in input_paths),
        outputs=(str(output_path),),
        config_digest=digest_of("null"),
        seed=None,
        counts_in=written,
        counts_out=written,
        extra={},
    )


# ---------------------------------------------------------------- reports

def stats_report(pair_path: str | Path, average: str = "micro") -> RateReport:
    """Corruption level of a pair file: clean side is the reference."""
    return corpus_rates(
        ((clean, corrupted) for corrupted, clean in read_pairs(pair_path)),
        average=average,
    )


def eval_report(
    ref_path: str | Path,
    hyp_path: str | Path,
    src_path: str | Path | None = None,
) -> dict:
    """Score hypothesis lines against references; with the corrupted
    source given, also report the relative error reduction."""
    refs = list(read_lines(ref_path))
    hyps = list(read_lines(hyp_path))
    if len(refs) != len(hyps):
        raise DataError(
            f"line count mismatch: {ref_path} has {len(refs)}, {hyp_path} has {len(hyps)}"
        )
    after = corpus_rates(zip(refs, hyps))
    report = {
        "cer": after.cer,
        "wer": after.wer,
        "counts": after.to_dict(),
    }
    if src_path is not None:
        srcs = list(read_lines(src_path))
        if len(srcs) != len(refs):
            raise DataError(
                f"line count mismatch: {ref_path} has {len(refs)}, {src_path} has {len(srcs)}"
            )
        before = corpus_rates(zip(refs, srcs))
        report.update(
            {
                "cer_before": before.cer,
                "wer_before": before.wer,
                "cerr": err(before.cer, after.cer),
                "werr": err(before.wer, after.wer),
            }
        )
    return report


def format_rate_table(report: dict) -> str:
    """Aligned plain-text table of the eval/stats report values."""
    rows = [("metric", "value")]
    for key in ("cer", "wer", "cer_before", "wer_before", "cerr", "werr"):
        if key in report:
            rows.append((key, f"{report[key] * 100:.2f}%"))
    width = max(len(name) for name, _ in rows)
    lines = [f"{name.ljust(width)}  {value}" for name, value in rows]
    return "\n".join(lines)
