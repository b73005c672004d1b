"""WordPiece encoding: lowercase (uncased variants), sub-word split, fixed length.

Every sequence starts with the classification token and is padded or
truncated to exactly max_seq_len ids; only single-segment ids are
emitted, so the segment-embedding input is all zeros.
"""

from __future__ import annotations

import os
from typing import Sequence

import torch
from transformers import BertTokenizer

from .config import FinetuneConfig
from .errors import FinetuneError

SPECIAL_TOKENS = ("[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]")


def read_vocab(path: str) -> dict[str, int]:
    """One token per line, index = line position."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().split("\n")
    except OSError as exc:
        raise FinetuneError(f"cannot read vocabulary file {path}: {exc}") from exc
    if lines and lines[-1] == "":
        lines.pop()
    vocab: dict[str, int] = {}
    for index, token in enumerate(lines):
        if not token:
            raise FinetuneError(f"{path} line {index + 1}: empty vocabulary entry")
        if token in vocab:
            raise FinetuneError(f"{path} line {index + 1}: duplicate token {token!r}")
        vocab[token] = index
    missing = [tok for tok in SPECIAL_TOKENS if tok not in vocab]
    if missing:
        raise FinetuneError(f"{path} is missing special tokens: {', '.join(missing)}")
    return vocab


def load_tokenizer(config: FinetuneConfig) -> BertTokenizer:
    """Tokenizer for the configured variant from local assets; fails eagerly."""
    if not config.assets_dir:
        raise FinetuneError("config key 'assets_dir' is required to load a tokenizer")
    vocab_path = os.path.join(config.assets_dir, "vocab.txt")
    if not os.path.exists(vocab_path):
        raise FinetuneError(f"tokenizer assets missing: {vocab_path} does not exist")
    return BertTokenizer(
        vocab=read_vocab(vocab_path), do_lower_case=config.do_lower_case
    )


def encode(text: str, tokenizer: BertTokenizer, max_seq_len: int) -> list[int]:
    """Token ids of length exactly max_seq_len; classification token first."""
    encoded = tokenizer(
        text, padding="max_length", truncation=True, max_length=max_seq_len
    )
    return encoded["input_ids"]


def encode_batch(
    tokenizer: BertTokenizer, texts: Sequence[str], max_seq_len: int
) -> dict[str, torch.Tensor]:
    """Batch encoding as model-ready tensors (ids, attention mask, segment ids)."""
    encoded = tokenizer(
        list(texts),
        padding="max_length",
        truncation=True,
        max_length=max_seq_len,
        return_tensors="pt",
    )
    return {
        "input_ids": encoded["input_ids"],
        "attention_mask": encoded["attention_mask"],
        "token_type_ids": encoded["token_type_ids"],
    }
