"""Model construction and the on-disk checkpoint layout.

A checkpoint directory holds everything needed to predict:

    config.json        transformer configuration (2-label head)
    model.safetensors  fine-tuned weights
    vocab.txt          the tokenizer vocabulary used at training time
    finetune.cfg       the run's hyperparameters, key = value
    training.log       one "step TAB loss" line per optimization step

assets_dir for a fresh run needs vocab.txt and config.json; when weight
files (model.safetensors / pytorch_model.bin) are present they are
loaded, otherwise the transformer starts from random initialization,
which is only useful for smoke runs.
"""

from __future__ import annotations

import os
import shutil

import torch
from transformers import BertConfig, BertForSequenceClassification, BertTokenizer

from .config import CONFIG_KEYS, FinetuneConfig, apply_pairs, read_config_file
from .data import LABELS
from .encode import load_tokenizer
from .errors import FinetuneError

_WEIGHT_FILES = ("model.safetensors", "pytorch_model.bin")
_HYPERPARAMETER_KEYS = (
    "model_variant",
    "max_seq_len",
    "batch_size",
    "epochs",
    "learning_rate",
    "dropout",
    "seed",
)


def build_model(config: FinetuneConfig) -> BertForSequenceClassification:
    """Transformer with a 2-way classification head on the [CLS] vector."""
    if not config.assets_dir:
        raise FinetuneError("config key 'assets_dir' is required to build a model")
    config_path = os.path.join(config.assets_dir, "config.json")
    if not os.path.exists(config_path):
        raise FinetuneError(f"model assets missing: {config_path} does not exist")
    bert_config = BertConfig.from_json_file(config_path)
    bert_config.num_labels = len(LABELS)
    bert_config.id2label = dict(enumerate(LABELS))
    bert_config.label2id = {label: i for i, label in enumerate(LABELS)}
    bert_config.hidden_dropout_prob = config.dropout
    bert_config.attention_probs_dropout_prob = config.dropout
    bert_config.classifier_dropout = config.dropout
    if bert_config.max_position_embeddings < config.max_seq_len:
        raise FinetuneError(
            f"max_seq_len {config.max_seq_len} exceeds the model's position limit "
            f"{bert_config.max_position_embeddings}"
        )
    if any(
        os.path.exists(os.path.join(config.assets_dir, name))
        for name in _WEIGHT_FILES
    ):
        return BertForSequenceClassification.from_pretrained(
            config.assets_dir, config=bert_config
        )
    return BertForSequenceClassification(bert_config)


def save_checkpoint(
    model: BertForSequenceClassification,
    config: FinetuneConfig,
    log: list[tuple[int, float]],
    directory: str,
) -> None:
    os.makedirs(directory, exist_ok=True)
    model.save_pretrained(directory)
    shutil.copyfile(
        os.path.join(config.assets_dir, "vocab.txt"),
        os.path.join(directory, "vocab.txt"),
    )
    cfg_lines = [
        f"{key} = {getattr(config, key)}" for key in _HYPERPARAMETER_KEYS
    ]
    with open(
        os.path.join(directory, "finetune.cfg"), "w", encoding="utf-8", newline=""
    ) as fh:
        fh.write("\n".join(cfg_lines) + "\n")
    with open(
        os.path.join(directory, "training.log"), "w", encoding="utf-8", newline=""
    ) as fh:
        for step, loss in log:
            fh.write(f"{step}\t{loss!r}\n")


def checkpoint_config(directory: str) -> FinetuneConfig:
    """The hyperparameters a checkpoint was fine-tuned with."""
    cfg_path = os.path.join(directory, "finetune.cfg")
    if not os.path.exists(cfg_path):
        raise FinetuneError(f"not a checkpoint directory: {cfg_path} does not exist")
    pairs = read_config_file(cfg_path)
    unknown = set(pairs) - set(CONFIG_KEYS)
    if unknown:
        raise FinetuneError(
            f"checkpoint config {cfg_path} has unknown keys: {sorted(unknown)}"
        )
    return apply_pairs(FinetuneConfig(assets_dir=directory), pairs)


def load_checkpoint(
    directory: str,
) -> tuple[BertForSequenceClassification, BertTokenizer, FinetuneConfig]:
    """Reload a saved checkpoint for prediction or continued inspection."""
    config = checkpoint_config(directory)
    if not any(
        os.path.exists(os.path.join(directory, name)) for name in _WEIGHT_FILES
    ):
        raise FinetuneError(f"checkpoint {directory} has no weight file")
    tokenizer = load_tokenizer(config)
    model = BertForSequenceClassification.from_pretrained(directory)
    if model.config.num_labels != len(LABELS):
        raise FinetuneError(
            f"checkpoint {directory} has a {model.config.num_labels}-way head, "
            f"expected {len(LABELS)}"
        )
    model.eval()
    return model, tokenizer, config
