"""Fixtures for the fine-tuning suite; plain builders live in ft_helpers.py."""

from __future__ import annotations

import pytest
from transformers.utils import logging as hf_logging

from ft_helpers import smoke_rows, write_assets, write_tsv

from offlang_finetune import FinetuneConfig

# keep tqdm save/load bars out of captured test output
hf_logging.disable_progress_bar()


@pytest.fixture(scope="session")
def assets_dir(tmp_path_factory) -> str:
    return write_assets(tmp_path_factory.mktemp("assets"))


@pytest.fixture(scope="session")
def smoke_train_tsv(tmp_path_factory) -> str:
    return write_tsv(tmp_path_factory.mktemp("corpus") / "train.tsv", smoke_rows(50))


@pytest.fixture
def smoke_config(tmp_path, assets_dir, smoke_train_tsv):
    """Config factory for fast CPU runs; checkpoint dir is per-test."""

    def _make(**overrides) -> FinetuneConfig:
        settings = dict(
            model_variant="base-uncased",
            max_seq_len=16,
            batch_size=2,
            epochs=1,
            learning_rate=5e-3,
            dropout=0.0,
            seed=1,
            assets_dir=assets_dir,
            train=smoke_train_tsv,
            checkpoint=str(tmp_path / "checkpoint"),
        )
        settings.update(overrides)
        return FinetuneConfig(**settings)

    return _make
