"""The fine-tuning loop: Adam, linear warmup, per-step loss log.

The warmup schedule is an assumption the source hyperparameters leave
open: the learning rate ramps linearly over the first 10% of steps and
then decays linearly to zero, the customary schedule for this model
family.  All randomness (parameter init, batch order, dropout) is
seeded from the config, so identical runs produce identical loss
curves on the same hardware.
"""

from __future__ import annotations

import contextlib
from typing import Iterator

import torch

from .config import FinetuneConfig
from .data import LABELS, labeled_only, read_task_a
from .encode import encode_batch, load_tokenizer
from .errors import FinetuneError
from .model import build_model, save_checkpoint


@contextlib.contextmanager
def oom_hint(batch_size: int) -> Iterator[None]:
    """Translate out-of-memory failures into an actionable message."""
    try:
        yield
    except RuntimeError as exc:
        if "out of memory" in str(exc).lower():
            raise FinetuneError(
                f"out of memory during fine-tuning; reduce batch_size "
                f"(currently {batch_size}) or max_seq_len and retry"
            ) from exc
        raise


def warmup_factor(step: int, total_steps: int) -> float:
    """LR multiplier: linear ramp over the first 10% of steps, then decay."""
    warmup = max(1, total_steps // 10)
    if step < warmup:
        return (step + 1) / warmup
    return max(0.0, (total_steps - step) / max(1, total_steps - warmup))


def finetune(config: FinetuneConfig) -> list[tuple[int, float]]:
    """Fine-tune on the labeled task-A rows of config.train.

    Writes the checkpoint directory named by config.checkpoint and
    returns the training log as (step, loss) pairs.
    """
    if not config.train:
        raise FinetuneError("config key 'train' is required for fine-tuning")
    if not config.checkpoint:
        raise FinetuneError("config key 'checkpoint' is required for fine-tuning")
    instances = labeled_only(read_task_a(config.train))
    if not instances:
        raise FinetuneError(f"{config.train} has no rows labeled for subtask A")

    torch.manual_seed(config.seed)
    tokenizer = load_tokenizer(config)
    model = build_model(config)
    model.train()

    encoded = encode_batch(
        tokenizer, [inst.text for inst in instances], config.max_seq_len
    )
    targets = torch.tensor([LABELS.index(inst.label) for inst in instances])

    n = len(instances)
    batches_per_epoch = (n + config.batch_size - 1) // config.batch_size
    total_steps = batches_per_epoch * config.epochs
    optimizer = torch.optim.Adam(model.parameters(), lr=config.learning_rate)
    scheduler = torch.optim.lr_scheduler.LambdaLR(
        optimizer, lambda step: warmup_factor(step, total_steps)
    )

    order_rng = torch.Generator().manual_seed(config.seed)
    log: list[tuple[int, float]] = []
    step = 0
    for _ in range(config.epochs):
        order = torch.randperm(n, generator=order_rng)
        for start in range(0, n, config.batch_size):
            idx = order[start : start + config.batch_size]
            with oom_hint(config.batch_size):
                output = model(
                    input_ids=encoded["input_ids"][idx],
                    attention_mask=encoded["attention_mask"][idx],
                    token_type_ids=encoded["token_type_ids"][idx],
                    labels=targets[idx],
                )
                optimizer.zero_grad()
                output.loss.backward()
                optimizer.step()
            scheduler.step()
            step += 1
            log.append((step, output.loss.detach().item()))

    save_checkpoint(model, config, log, config.checkpoint)
    return log
