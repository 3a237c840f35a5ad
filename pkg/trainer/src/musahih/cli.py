"""Command line for training, correcting, and attention export.

    musahih train --pairs train.tsv --family transformer --steps 2000 \
        --out-dir runs/base --schedule warmup
    musahih correct --checkpoint runs/base/checkpoint.pt \
        --input corrupted.txt --output hyps.txt
    musahih attention --checkpoint runs/base/checkpoint.pt \
        --line "..." --output grid.txt --png grid.png

Exit codes: 0 success, 1 usage error, 2 data error.
"""

import argparse
import json
import sys
from pathlib import Path

from .attention import FamilyError, export_attention
from .data import DataError, load_lines
from .decode import MAX_DECODE_LEN, greedy_decode
from .models import Family, ModelSpec
from .schedules import Exponential, WarmupInverseSqrt
from .train import Curriculum, TrainConfig, TrainingError, load_checkpoint, train
from .vocab import VocabularyError


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


_SPEC_DEFAULTS = {
    Family.VANILLA_RNN: ModelSpec.vanilla_rnn,
    Family.RNN_BLOCKS: ModelSpec.rnn_blocks,
    Family.TRANSFORMER: ModelSpec.transformer,
}


def _build_spec(args) -> ModelSpec:
    family = Family(args.family)
    spec = _SPEC_DEFAULTS[family]()
    overrides = {}
    if args.layers is not None:
        overrides["layers"] = args.layers
    if args.hidden is not None:
        overrides["hidden_size"] = args.hidden
    if args.embedding is not None:
        overrides["embedding_size"] = args.embedding
    if args.dim is not None:
        overrides["model_dim"] = args.dim
    if args.heads is not None:
        overrides["heads"] = args.heads
    if args.dropout is not None:
        overrides["dropout"] = args.dropout
    if not overrides:
        return spec
    data = spec.to_dict()
    data.update(overrides)
    return ModelSpec.from_dict(data)


def _build_schedule(args, spec: ModelSpec):
    if args.schedule == "exponential":
        return Exponential(init=args.init_lr, decay=args.decay)
    return WarmupInverseSqrt(
        warmup_steps=args.warmup_steps, model_dim=spec.model_dim
    )


def _cmd_train(args) -> int:
    spec = _build_spec(args)
    curriculum = None
    if args.pretrain is not None:
        if args.pretrain_steps is None:
            raise DataError("--pretrain requires --pretrain-steps")
        curriculum = Curriculum(str(args.pretrain), args.pretrain_steps)
    config = TrainConfig(
        steps=args.steps,
        batch_size=args.batch_size,
        epsilon=args.epsilon,
        grad_clip_norm=args.clip,
        schedule=_build_schedule(args, spec),
        seed=args.seed,
        curriculum=curriculum,
        log_every=args.log_every,
        checkpoint_every=args.checkpoint_every,
    )
    result = train(args.pairs, spec, config, args.out_dir)
    print(
        f"train: {args.steps} steps, final loss {result.final_loss:.4f}, "
        f"checkpoint {result.checkpoint_path}"
    )
    return 0


def _cmd_correct(args) -> int:
    model, vocab, _spec, _step = load_checkpoint(args.checkpoint)
    lines = load_lines(args.input, vocab)
    results = greedy_decode(
        model, vocab, lines, max_len=args.max_len, batch_size=args.batch_size
    )
    with Path(args.output).open("w", encoding="utf-8", newline="\n") as out:
        for result in results:
            out.write(result.text + "\n")
    truncated = sum(r.truncated for r in results)
    if args.meta is not None:
        Path(args.meta).write_text(
            json.dumps({"lines": len(results), "truncated": truncated},
                       indent=2) + "\n",
            encoding="utf-8",
        )
    print(f"correct: {len(results)} lines ({truncated} truncated)")
    return 0


def _cmd_attention(args) -> int:
    model, vocab, _spec, _step = load_checkpoint(args.checkpoint)
    weights = export_attention(
        model, vocab, args.line, out_path=args.output, png_path=args.png,
        max_len=args.max_len,
    )
    print(
        f"attention: {weights.size(0)} heads, "
        f"{weights.size(1)}x{weights.size(2)} grid -> {args.output}"
    )
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="musahih", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=type(parser))

    p = sub.add_parser("train", help="train a corrector on a pair file")
    p.add_argument("--pairs", required=True, type=Path)
    p.add_argument("--out-dir", required=True, type=Path)
    p.add_argument("--family", required=True,
                   choices=[f.value for f in Family])
    p.add_argument("--steps", required=True, type=int)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--schedule", choices=("exponential", "warmup"),
                   default="warmup")
    p.add_argument("--init-lr", type=float, default=1e-4)
    p.add_argument("--decay", type=float, default=15e-4)
    p.add_argument("--warmup-steps", type=int, default=4000)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--clip", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--layers", type=int)
    p.add_argument("--hidden", type=int)
    p.add_argument("--embedding", type=int)
    p.add_argument("--dim", type=int)
    p.add_argument("--heads", type=int)
    p.add_argument("--dropout", type=float)
    p.add_argument("--pretrain", type=Path,
                   help="easier pair file for the first training phase")
    p.add_argument("--pretrain-steps", type=int)
    p.add_argument("--log-every", type=int, default=10)
    p.add_argument("--checkpoint-every", type=int, default=0)
    p.set_defaults(handler=_cmd_train)

    p = sub.add_parser("correct", help="decode corrupted lines")
    p.add_argument("--checkpoint", required=True, type=Path)
    p.add_argument("--input", required=True, type=Path)
    p.add_argument("--output", required=True, type=Path)
    p.add_argument("--max-len", type=int, default=MAX_DECODE_LEN)
    p.add_argument("--batch-size", type=int, default=64)
    p.add_argument("--meta", type=Path, help="write decode metadata JSON")
    p.set_defaults(handler=_cmd_correct)

    p = sub.add_parser("attention", help="export last-layer attention")
    p.add_argument("--checkpoint", required=True, type=Path)
    p.add_argument("--line", required=True)
    p.add_argument("--output", required=True, type=Path)
    p.add_argument("--png", type=Path)
    p.add_argument("--max-len", type=int, default=MAX_DECODE_LEN)
    p.set_defaults(handler=_cmd_attention)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not getattr(args, "handler", None):
        parser.error("a command is required")
    try:
        return args.handler(args)
    except (DataError, VocabularyError, TrainingError, FamilyError,
            OSError) as exc:
        print(f"musahih: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
