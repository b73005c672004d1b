"""Run configuration: a flat key = value file format plus typed coercion.

The same keys are exposed as command-line flags; flags override file
values.  Shipped presets (official-a-svm, official-b, official-c) are
config files resolved from package data when the --config argument names
no file on disk.
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass
from importlib import resources
from typing import Mapping, get_type_hints

from .errors import OfflangError

PRESET_NAMES = ("official-a-svm", "official-b", "official-c")

_TRUE = frozenset({"true", "1", "yes", "on"})
_FALSE = frozenset({"false", "0", "no", "off"})


@dataclass(frozen=True)
class RunConfig:
    """Every knob of a run; empty-string paths mean "not set"."""

    task: str = "A"
    use_ngrams: bool = True
    use_linguistic: bool = False
    use_emoticon: bool = False
    use_emoji: bool = False
    use_entity: bool = False
    n_min: int = 2
    n_max: int = 7
    k: int = 1000
    min_df: int = 2
    C: float = 0.1
    tolerance: float = 1e-6
    max_epochs: int = 1000
    seed: int = 0
    threads: int = 0
    train: str = ""
    eval: str = ""
    input: str = ""
    entities: str = ""
    emoji_lexicon: str = ""
    connectives: str = ""
    model: str = ""
    space: str = ""
    predictions: str = ""
    output: str = ""
    report: str = ""

    def __post_init__(self) -> None:
        if self.task not in ("A", "B", "C"):
            raise OfflangError(f"config key 'task': must be A, B, or C, got {self.task!r}")
        if not (1 <= self.n_min <= self.n_max):
            raise OfflangError(
                f"config keys 'n_min'/'n_max': need 1 <= n_min <= n_max, "
                f"got [{self.n_min}, {self.n_max}]"
            )
        if self.k < 1:
            raise OfflangError(f"config key 'k': must be >= 1, got {self.k}")
        if self.min_df < 1:
            raise OfflangError(f"config key 'min_df': must be >= 1, got {self.min_df}")
        if not self.C > 0:
            raise OfflangError(f"config key 'C': must be positive, got {self.C}")
        if not self.tolerance > 0:
            raise OfflangError(
                f"config key 'tolerance': must be positive, got {self.tolerance}"
            )
        if self.max_epochs < 1:
            raise OfflangError(
                f"config key 'max_epochs': must be >= 1, got {self.max_epochs}"
            )
        if self.threads < 0:
            raise OfflangError(f"config key 'threads': must be >= 0, got {self.threads}")


_FIELD_TYPES: dict[str, type] = get_type_hints(RunConfig)
CONFIG_KEYS: tuple[str, ...] = tuple(f.name for f in dataclasses.fields(RunConfig))


def _coerce(key: str, value: str, target: type):
    if target is str:
        return value
    if target is bool:
        low = value.strip().lower()
        if low in _TRUE:
            return True
        if low in _FALSE:
            return False
        raise OfflangError(
            f"config key {key!r}: expected a boolean (true/false), got {value!r}"
        )
    try:
        return target(value)
    except ValueError:
        raise OfflangError(
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
            raise OfflangError(f"{source} line {lineno}: expected 'key = value'")
        key = key.strip()
        value = value.strip()
        if not key:
            raise OfflangError(f"{source} line {lineno}: empty key")
        if key in seen_at:
            raise OfflangError(
                f"{source} line {lineno}: duplicate key {key!r} "
                f"(first set on line {seen_at[key]})"
            )
        seen_at[key] = lineno
        pairs[key] = value
    return pairs


def apply_pairs(base: RunConfig, pairs: Mapping[str, str]) -> RunConfig:
    """Overlay string key/value pairs onto a config, with type coercion."""
    updates = {}
    for key, value in pairs.items():
        if key not in _FIELD_TYPES:
            raise OfflangError(f"unknown config key {key!r}")
        updates[key] = _coerce(key, value, _FIELD_TYPES[key])
    return dataclasses.replace(base, **updates)


def read_config_file(path: str) -> dict[str, str]:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise OfflangError(f"cannot read config file {path}: {exc}") from exc
    return parse_config_text(text, source=path)


def load_preset(name: str) -> dict[str, str]:
    """Read a shipped preset by name (with or without the .cfg suffix)."""
    stem = name[:-4] if name.endswith(".cfg") else name
    if stem not in PRESET_NAMES:
        raise OfflangError(
            f"unknown preset {name!r}; shipped presets: {', '.join(PRESET_NAMES)}"
        )
    text = (
        resources.files("offlang").joinpath(f"presets/{stem}.cfg").read_text("utf-8")
    )
    return parse_config_text(text, source=f"preset {stem}")


def resolve_config(path_or_preset: str) -> dict[str, str]:
    """A --config argument: a file on disk, else a shipped preset name."""
    if os.path.exists(path_or_preset):
        return read_config_file(path_or_preset)
    stem = path_or_preset[:-4] if path_or_preset.endswith(".cfg") else path_or_preset
    if stem in PRESET_NAMES:
        return load_preset(stem)
    raise OfflangError(
        f"config file {path_or_preset!r} not found and it is not a shipped preset "
        f"({', '.join(PRESET_NAMES)})"
    )
