"""Seq2seq spelling correctors trained on corrupted/clean pair files."""

__version__ = "0.1.0"

from .attention import FamilyError, attention_matrices, export_attention
from .data import Batch, DataError, batch_stream, load_lines, load_pairs, make_batch, pad_block
from .decode import MAX_DECODE_LEN, DecodeResult, greedy_decode
from .loss import smoothed_kl_loss
from .models import Family, Memory, ModelSpec, build_model
from .schedules import Exponential, WarmupInverseSqrt, schedule_from_dict
from .train import (
    Curriculum,
    TrainConfig,
    TrainResult,
    TrainingError,
    load_checkpoint,
    save_checkpoint,
    train,
)
from .vocab import EOS, PAD, SOS, Vocabulary, VocabularyError

__all__ = [
    "Batch",
    "Curriculum",
    "DataError",
    "DecodeResult",
    "EOS",
    "Exponential",
    "Family",
    "FamilyError",
    "MAX_DECODE_LEN",
    "Memory",
    "ModelSpec",
    "PAD",
    "SOS",
    "TrainConfig",
    "TrainResult",
    "TrainingError",
    "Vocabulary",
    "VocabularyError",
    "WarmupInverseSqrt",
    "attention_matrices",
    "batch_stream",
    "build_model",
    "export_attention",
    "greedy_decode",
    "load_checkpoint",
    "load_lines",
    "load_pairs",
    "make_batch",
    "pad_block",
    "save_checkpoint",
    "schedule_from_dict",
    "smoothed_kl_loss",
    "train",
]
