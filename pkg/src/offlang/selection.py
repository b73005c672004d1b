"""Information-gain ranking of n-gram candidates and the frozen feature space.

Gain is computed from binary document presence: IG = H(C) - [P(t) H(C|t) +
P(not t) H(C|not t)], with base-2 entropies and the 0 log 0 = 0 convention.
Only ranking matters downstream, so the unit (bits) is conventional.
"""

from __future__ import annotations

import hashlib
import math
import warnings
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import OfflangError

NgramBag = Mapping[str, int]

SPACE_HEADER_PREFIX = "offlang-space v1"


@dataclass(frozen=True)
class FeatureSpace:
    """Frozen, ordered feature layout: n-gram slots, auxiliary slots, bias last."""

    ngram_slots: tuple[str, ...]
    aux_slots: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if len(set(self.ngram_slots)) != len(self.ngram_slots):
            raise OfflangError("feature space contains duplicate n-gram slots")
        if len(set(self.aux_slots)) != len(self.aux_slots):
            raise OfflangError("feature space contains duplicate auxiliary slots")

    @property
    def bias_index(self) -> int:
        return len(self.ngram_slots) + len(self.aux_slots)

    @property
    def size(self) -> int:
        return self.bias_index + 1

    @cached_property
    def ngram_index(self) -> dict[str, int]:
        return {ng: i for i, ng in enumerate(self.ngram_slots)}

    @cached_property
    def aux_index(self) -> dict[str, int]:
        base = len(self.ngram_slots)
        return {slot: base + i for i, slot in enumerate(self.aux_slots)}

    @cached_property
    def fingerprint(self) -> str:
        return hashlib.sha256(serialize_space(self).encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class IgScore:
    feature: str
    gain: float
    document_frequency: int


def _entropy(counts: Iterable[int]) -> float:
    total = sum(counts)
    if total == 0:
        return 0.0
    h = 0.0
    for c in counts:
        if c > 0:
            p = c / total
            h -= p * math.log2(p)
    return h


def _ig_from_counts(
    present: Mapping[str, int], class_counts: Mapping[str, int]
) -> float:
    """IG of a binary presence feature given per-class presence counts."""
    total = sum(class_counts.values())
    n_present = sum(present.values())
    absent = {c: class_counts[c] - present.get(c, 0) for c in class_counts}
    h_prior = _entropy(class_counts.values())
    h_cond = (n_present / total) * _entropy(present.values()) + (
        (total - n_present) / total
    ) * _entropy(absent.values())
    return h_prior - h_cond


def information_gain(presence: Sequence[int] | np.ndarray, labels: Sequence[str]) -> float:
    """Entropy reduction (bits) from conditioning the class on feature presence."""
    if len(presence) != len(labels) or len(labels) == 0:
        raise OfflangError("presence vector and label list must have equal, nonzero length")
    class_counts: Counter[str] = Counter(labels)
    present: Counter[str] = Counter()
    for bit, label in zip(presence, labels):
        if bit:
            present[label] += 1
    return _ig_from_counts(present, class_counts)


def document_presence(
    bags: Sequence[NgramBag], min_df: int = 1
) -> dict[str, np.ndarray]:
    """Binary presence vectors for every n-gram meeting the document-frequency cut."""
    if min_df < 1:
        raise OfflangError(f"min_df must be >= 1, got {min_df}")
    df: Counter[str] = Counter()
    for bag in bags:
        df.update(bag.keys())
    keep = {ng for ng, count in df.items() if count >= min_df}
    vectors = {ng: np.zeros(len(bags), dtype=bool) for ng in keep}
    for doc, bag in enumerate(bags):
        for ng in bag:
            if ng in keep:
                vectors[ng][doc] = True
    return vectors


def rank_ngrams(
    bags: Sequence[NgramBag], labels: Sequence[str], min_df: int = 1
) -> list[IgScore]:
    """Score every n-gram with document frequency >= min_df, best first.

    Works from per-class presence counts rather than explicit presence
    vectors, so the full training corpus fits in memory.  Ordering is
    descending gain, ties broken by higher document frequency and then the
    lexicographically smaller n-gram.
    """
    if len(bags) != len(labels):
        raise OfflangError("bags and labels must align")
    if min_df < 1:
        raise OfflangError(f"min_df must be >= 1, got {min_df}")
    class_counts: Counter[str] = Counter(labels)
    per_feature: dict[str, Counter[str]] = {}
    df: Counter[str] = Counter()
    for bag, label in zip(bags, labels):
        for ng in bag:
            df[ng] += 1
            per_feature.setdefault(ng, Counter())[label] += 1
    scores = [
        IgScore(ng, _ig_from_counts(per_feature[ng], class_counts), df[ng])
        for ng in per_feature
        if df[ng] >= min_df
    ]
    scores.sort(key=lambda s: (-s.gain, -s.document_frequency, s.feature))
    return scores


def select_top_k(scores: Sequence[IgScore], k: int) -> FeatureSpace:
    """Freeze the k best-ranked n-grams into a FeatureSpace (n-gram slots only)."""
    if k <= 0:
        raise OfflangError(f"selection size k must be >= 1, got {k}")
    ranked = sorted(scores, key=lambda s: (-s.gain, -s.document_frequency, s.feature))
    if len(ranked) < k:
        warnings.warn(
            f"only {len(ranked)} candidate n-grams available, requested k={k}; taking all",
            stacklevel=2,
        )
    return FeatureSpace(tuple(s.feature for s in ranked[:k]))


def escape_payload(payload: str) -> str:
    return payload.replace("\\", "\\\\").replace("\t", "\\t").replace("\n", "\\n")


def unescape_payload(payload: str) -> str:
    out: list[str] = []
    i = 0
    while i < len(payload):
        ch = payload[i]
        if ch == "\\":
            if i + 1 >= len(payload):
                raise OfflangError("dangling escape in feature-space payload")
            nxt = payload[i + 1]
            if nxt == "\\":
                out.append("\\")
            elif nxt == "t":
                out.append("\t")
            elif nxt == "n":
                out.append("\n")
            else:
                raise OfflangError(f"unknown escape sequence \\{nxt} in feature-space payload")
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def serialize_space(space: FeatureSpace) -> str:
    lines = [f"{SPACE_HEADER_PREFIX} k={len(space.ngram_slots)}"]
    idx = 0
    for ng in space.ngram_slots:
        lines.append(f"{idx}\tngram\t{escape_payload(ng)}")
        idx += 1
    for slot in space.aux_slots:
        lines.append(f"{idx}\taux\t{slot}")
        idx += 1
    lines.append(f"{idx}\tbias\t")
    return "\n".join(lines) + "\n"


def write_space(space: FeatureSpace, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(serialize_space(space))


def parse_space(text: str) -> FeatureSpace:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or not lines[0].startswith(SPACE_HEADER_PREFIX):
        raise OfflangError("not a feature-space file (missing 'offlang-space v1' header)")
    ngrams: list[str] = []
    aux: list[str] = []
    saw_bias = False
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split("\t", 2)
        if len(parts) != 3:
            raise OfflangError(f"feature-space line {lineno}: expected 'index\\tkind\\tpayload'")
        idx_str, kind, payload = parts
        try:
            idx = int(idx_str)
        except ValueError:
            raise OfflangError(f"feature-space line {lineno}: bad index {idx_str!r}") from None
        if idx != lineno - 2:
            raise OfflangError(
                f"feature-space line {lineno}: index {idx} out of order (expected {lineno - 2})"
            )
        if saw_bias:
            raise OfflangError(f"feature-space line {lineno}: slots after the bias slot")
        if kind == "ngram":
            if aux:
                raise OfflangError(f"feature-space line {lineno}: n-gram slot after aux slots")
            ngrams.append(unescape_payload(payload))
        elif kind == "aux":
            aux.append(payload)
        elif kind == "bias":
            saw_bias = True
        else:
            raise OfflangError(f"feature-space line {lineno}: unknown slot kind {kind!r}")
    if not saw_bias:
        raise OfflangError("feature-space file has no bias slot")
    return FeatureSpace(tuple(ngrams), tuple(aux))


def read_space(path: str) -> FeatureSpace:
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            return parse_space(fh.read())
    except OSError as exc:
        raise OfflangError(f"cannot read feature-space file {path}: {exc}") from exc
