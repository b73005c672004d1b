"""Batch prediction from a checkpoint into the id,label exchange format."""

from __future__ import annotations

import torch

from .data import LABELS, read_task_a, write_predictions
from .encode import encode_batch
from .model import load_checkpoint
from .train import oom_hint


def predict_file(
    checkpoint: str, input_path: str, out_path: str, batch_size: int | None = None
) -> int:
    """Score every row of input_path; returns the number of rows written."""
    model, tokenizer, config = load_checkpoint(checkpoint)
    instances = read_task_a(input_path)
    rows: list[tuple[str, str]] = []
    size = batch_size or config.batch_size
    with torch.no_grad():
        for start in range(0, len(instances), size):
            chunk = instances[start : start + size]
            encoded = encode_batch(
                tokenizer, [inst.text for inst in chunk], config.max_seq_len
            )
            with oom_hint(size):
                logits = model(**encoded).logits
            for inst, index in zip(chunk, logits.argmax(dim=1).tolist()):
                rows.append((inst.id, LABELS[index]))
    write_predictions(rows, out_path)
    return len(rows)
