"""Fine-tuning configuration and the flat key = value file format.

The file format matches the primary toolkit's config files: one
`key = value` per line, `#` starts a comment, duplicate keys are an
error.  Defaults are the official run settings; everything is exposed
so ablations (learning rate, sequence length, variant) need no code
changes.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Mapping, get_type_hints

from .errors import FinetuneError

VARIANTS = (
    "base-uncased",
    "base-cased",
    "base-multilingual-uncased",
    "base-multilingual-cased",
)

_TRUE = frozenset({"true", "1", "yes", "on"})
_FALSE = frozenset({"false", "0", "no", "off"})


@dataclass(frozen=True)
class FinetuneConfig:
    """Every knob of a fine-tuning or prediction run; empty paths mean unset."""

    model_variant: str = "base-uncased"
    max_seq_len: int = 80
    batch_size: int = 32
    epochs: int = 2
    learning_rate: float = 2e-5
    dropout: float = 0.1
    seed: int = 0
    assets_dir: str = ""
    train: str = ""
    input: str = ""
    checkpoint: str = ""
    predictions: str = ""

    def __post_init__(self) -> None:
        if self.model_variant not in VARIANTS:
            raise FinetuneError(
                f"config key 'model_variant': must be one of {', '.join(VARIANTS)}, "
                f"got {self.model_variant!r}"
            )
        if self.max_seq_len < 2:
            raise FinetuneError(
                "config key 'max_seq_len': must be >= 2 (room for the "
                f"classification token), got {self.max_seq_len}"
            )
        if self.batch_size < 1:
            raise FinetuneError(
                f"config key 'batch_size': must be >= 1, got {self.batch_size}"
            )
        if self.epochs < 1:
            raise FinetuneError(f"config key 'epochs': must be >= 1, got {self.epochs}")
        if not self.learning_rate > 0:
            raise FinetuneError(
                f"config key 'learning_rate': must be positive, got {self.learning_rate}"
            )
        if not 0.0 <= self.dropout < 1.0:
            raise FinetuneError(
                f"config key 'dropout': must be in [0, 1), got {self.dropout}"
            )

    @property
    def do_lower_case(self) -> bool:
        return "uncased" in self.model_variant


_FIELD_TYPES: dict[str, type] = get_type_hints(FinetuneConfig)
CONFIG_KEYS: tuple[str, ...] = tuple(f.name for f in dataclasses.fields(FinetuneConfig))


def _coerce(key: str, value: str, target: type):
    if target is str:
        return value
    if target is bool:
        low = value.strip().lower()
        if low in _TRUE:
            return True
        if low in _FALSE:
            return False
        raise FinetuneError(
            f"config key {key!r}: expected a boolean (true/false), got {value!r}"
        )
    try:
        return target(value)
    except ValueError:
        raise FinetuneError(
            f"config key {key!r}: expected {target.__name__}, got {value!r}"
        ) from None


def parse_config_text(text: str, source: str = "<config>") -> dict[str, str]:
    """Parse `key = value` lines; `#` starts a comment, blank lines skipped."""
    pairs: dict[str, str] = {}
    seen_at: dict[str, int] = {}
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise FinetuneError(f"{source} line {lineno}: expected 'key = value'")
        key = key.strip()
        value = value.strip()
        if not key:
            raise FinetuneError(f"{source} line {lineno}: empty key")
        if key in seen_at:
            raise FinetuneError(
                f"{source} line {lineno}: duplicate key {key!r} "
                f"(first set on line {seen_at[key]})"
            )
        seen_at[key] = lineno
        pairs[key] = value
    return pairs


def apply_pairs(base: FinetuneConfig, pairs: Mapping[str, str]) -> FinetuneConfig:
    """Overlay string key/value pairs onto a config, with type coercion."""
    updates = {}
    for key, value in pairs.items():
        if key not in _FIELD_TYPES:
            raise FinetuneError(f"unknown config key {key!r}")
        updates[key] = _coerce(key, value, _FIELD_TYPES[key])
    return dataclasses.replace(base, **updates)


def read_config_file(path: str) -> dict[str, str]:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise FinetuneError(f"cannot read config file {path}: {exc}") from exc
    return parse_config_text(text, source=path)
