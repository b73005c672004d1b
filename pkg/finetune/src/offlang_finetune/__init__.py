"""Transformer fine-tuning for offensive-language detection (subtask A)."""

from .config import CONFIG_KEYS, VARIANTS, FinetuneConfig, apply_pairs, parse_config_text
from .data import LABELS, TaskAInstance, labeled_only, read_task_a, write_predictions
from .encode import encode, encode_batch, load_tokenizer, read_vocab
from .errors import FinetuneError
from .model import build_model, checkpoint_config, load_checkpoint, save_checkpoint
from .predict import predict_file
from .train import finetune, oom_hint, warmup_factor

__version__ = "0.1.0"

__all__ = [
    "CONFIG_KEYS",
    "VARIANTS",
    "FinetuneConfig",
    "apply_pairs",
    "parse_config_text",
    "LABELS",
    "TaskAInstance",
    "labeled_only",
    "read_task_a",
    "write_predictions",
    "encode",
    "encode_batch",
    "load_tokenizer",
    "read_vocab",
    "FinetuneError",
    "build_model",
    "checkpoint_config",
    "load_checkpoint",
    "save_checkpoint",
    "predict_file",
    "finetune",
    "oom_hint",
    "warmup_factor",
    "__version__",
]
