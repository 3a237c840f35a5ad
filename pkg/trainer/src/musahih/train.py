"""Teacher-forced training loop.

Adam with per-update learning rates from the configured schedule,
gradient-norm clipping, label-smoothed divergence loss, optional
curriculum phase (first N updates drawn from an easier pair file), a
line-delimited JSON metrics log, and checkpoints embedding the model
spec, train config, vocabulary, and step count.
"""

import json
from dataclasses import dataclass
from pathlib import Path

import torch
from torch import nn

from .data import batch_stream, load_pairs
from .loss import smoothed_kl_loss
from .models import ModelSpec, build_model
from .schedules import Exponential, Schedule, schedule_from_dict
from .vocab import Vocabulary


class TrainingError(RuntimeError):
    """Training became numerically invalid."""


@dataclass(frozen=True)
class Curriculum:
    """Spend the first pretrain_steps updates on an easier pair file
    before switching to the main one."""

    pretrain_path: str
    pretrain_steps: int

    def to_dict(self) -> dict:
        return {"pretrain_path": str(self.pretrain_path),
                "pretrain_steps": self.pretrain_steps}


@dataclass(frozen=True)
class TrainConfig:
    steps: int
    batch_size: int = 32
    epsilon: float = 0.1
    grad_clip_norm: float = 1.0
    schedule: Schedule = Exponential()
    seed: int = 0
    curriculum: Curriculum | None = None
    log_every: int = 1
    checkpoint_every: int = 0   # 0 means final checkpoint only
    device: str = "cpu"

    def to_dict(self) -> dict:
        return {
            "steps": self.steps,
            "batch_size": self.batch_size,
            "epsilon": self.epsilon,
            "grad_clip_norm": self.grad_clip_norm,
            "schedule": self.schedule.to_dict(),
            "seed": self.seed,
            "curriculum": self.curriculum.to_dict() if self.curriculum else None,
            "log_every": self.log_every,
            "checkpoint_every": self.checkpoint_every,
            "device": self.device,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TrainConfig":
        data = dict(data)
        data["schedule"] = schedule_from_dict(data["schedule"])
        if data.get("curriculum"):
            data["curriculum"] = Curriculum(**data["curriculum"])
        return cls(**data)


@dataclass(frozen=True)
class TrainResult:
    checkpoint_path: Path
    log_path: Path
    losses: list[float]
    final_loss: float


def save_checkpoint(path: Path, model: nn.Module, spec: ModelSpec,
                    config: TrainConfig, vocab: Vocabulary,
                    step: int) -> None:
    torch.save(
        {
            "model_spec": spec.to_dict(),
            "train_config": config.to_dict(),
            "vocabulary": list(vocab.symbols),
            "step": step,
            "model_state": model.state_dict(),
        },
        path,
    )


def load_checkpoint(path: str | Path, device: str = "cpu"):
    """Rebuild (model, vocab, spec, step) from a checkpoint file."""
    data = torch.load(path, map_location=device, weights_only=True)
    spec = ModelSpec.from_dict(data["model_spec"])
    vocab = Vocabulary(tuple(data["vocabulary"]))
    model = build_model(spec, len(vocab)).to(device)
    model.load_state_dict(data["model_state"])
    model.eval()
    return model, vocab, spec, data["step"]


def train(pairs_path: str | Path, spec: ModelSpec, config: TrainConfig,
          out_dir: str | Path, vocab: Vocabulary | None = None) -> TrainResult:
    vocab = vocab or Vocabulary.from_alphabet()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    torch.manual_seed(config.seed)
    device = torch.device(config.device)
    model = build_model(spec, len(vocab)).to(device)
    model.train()
    optimizer = torch.optim.Adam(
        model.parameters(), lr=config.schedule.lr_for_update(1)
    )

    main = batch_stream(
        load_pairs(pairs_path, vocab), vocab, config.batch_size, config.seed
    )
    pretrain = None
    if config.curriculum is not None:
        pretrain = batch_stream(
            load_pairs(config.curriculum.pretrain_path, vocab),
            vocab, config.batch_size, config.seed + 1,
        )

    log_path = out / "train_log.jsonl"
    checkpoint_path = out / "checkpoint.pt"
    losses = []
    with log_path.open("w", encoding="utf-8") as log:
        for update in range(1, config.steps + 1):
            in_pretrain = (
                pretrain is not None
                and update <= config.curriculum.pretrain_steps
            )
            batch = next(pretrain if in_pretrain else main)
            lr = config.schedule.lr_for_update(update)
            for group in optimizer.param_groups:
                group["lr"] = lr
            logits = model(batch.src.to(device), batch.tgt_in.to(device))
            loss = smoothed_kl_loss(
                torch.log_softmax(logits, dim=-1),
                batch.tgt_out.to(device),
                epsilon=config.epsilon,
                check_normalized=False,
            )
            if not torch.isfinite(loss):
                raise TrainingError(f"non-finite loss at step {update}")
            optimizer.zero_grad()
            loss.backward()
            nn.utils.clip_grad_norm_(model.parameters(), config.grad_clip_norm)
            optimizer.step()
            value = loss.item()
            losses.append(value)
            if update % config.log_every == 0 or update == config.steps:
                record = {
                    "step": update,
                    "loss": value,
                    "lr": lr,
                    "phase": "pretrain" if in_pretrain else "main",
                }
                log.write(json.dumps(record) + "\n")
                log.flush()    # keep the log live for long runs
            if (
                config.checkpoint_every
                and update % config.checkpoint_every == 0
                and update != config.steps
            ):
                save_checkpoint(
                    out / f"checkpoint_{update:07d}.pt",
                    model, spec, config, vocab, update,
                )
        save_checkpoint(checkpoint_path, model, spec, config, vocab,
                        config.steps)
    return TrainResult(checkpoint_path, log_path, losses, losses[-1])
