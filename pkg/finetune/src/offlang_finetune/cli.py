"""Command-line entry point: train (fine-tune) and predict."""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from .config import CONFIG_KEYS, FinetuneConfig, apply_pairs, read_config_file
from .errors import FinetuneError
from .model import checkpoint_config
from .predict import predict_file
from .train import finetune

# Settings baked into a checkpoint; overriding them at predict time is a
# contradiction, not a knob.
_FROZEN_AT_PREDICT = ("model_variant", "max_seq_len")


def _collect_pairs(args: argparse.Namespace) -> dict[str, str]:
    pairs: dict[str, str] = {}
    for source in args.config:
        pairs.update(read_config_file(source))
    for key in CONFIG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            pairs[key] = value
    return pairs


def cmd_train(args: argparse.Namespace) -> None:
    config = apply_pairs(FinetuneConfig(), _collect_pairs(args))
    log = finetune(config)
    final_loss = log[-1][1] if log else float("nan")
    print(
        f"wrote checkpoint {config.checkpoint} "
        f"({len(log)} steps, final loss {final_loss:.4f})"
    )


def cmd_predict(args: argparse.Namespace) -> None:
    pairs = _collect_pairs(args)
    if "checkpoint" not in pairs or not pairs["checkpoint"]:
        raise FinetuneError("config key 'checkpoint' is required for prediction")
    base = checkpoint_config(pairs["checkpoint"])
    for key in _FROZEN_AT_PREDICT:
        if key in pairs and pairs[key] != str(getattr(base, key)):
            raise FinetuneError(
                f"checkpoint was fine-tuned with {key}={getattr(base, key)}; "
                f"cannot predict with {key}={pairs[key]}"
            )
    config = apply_pairs(base, pairs)
    if not config.input:
        raise FinetuneError("config key 'input' is required for prediction")
    if not config.predictions:
        raise FinetuneError("config key 'predictions' is required for prediction")
    count = predict_file(
        config.checkpoint, config.input, config.predictions, config.batch_size
    )
    print(f"wrote predictions {config.predictions} ({count} rows)")


def _add_config_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--config",
        action="append",
        default=[],
        metavar="PATH",
        help="config file of key = value lines; repeatable, later files win",
    )
    for key in CONFIG_KEYS:
        parser.add_argument(f"--{key}", dest=key, default=None, metavar="VALUE")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="offlang-finetune",
        description="Fine-tune a pretrained transformer for offensive-language detection.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p_train = sub.add_parser("train", help="fine-tune and write a checkpoint directory")
    _add_config_arguments(p_train)
    p_predict = sub.add_parser("predict", help="score a TSV with a saved checkpoint")
    _add_config_arguments(p_predict)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "train":
            cmd_train(args)
        else:
            cmd_predict(args)
        return 0
    except FinetuneError as exc:
        print(f"offlang-finetune: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"offlang-finetune: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
