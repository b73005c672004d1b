"""Featurizers: character n-gram bags plus the four auxiliary groups.

The auxiliary groups are linguistic surface statistics (9 slots), an
emoticon count, emoji sentiment sums, and named-entity group counts.
All featurizers are pure functions; lexicons and annotations are loaded
once and shared read-only.
"""

from __future__ import annotations

import csv
import re
import unicodedata
import warnings
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import OfflangError
from .selection import FeatureSpace

NgramBag = dict[str, int]

# Per-codepoint emoji -> (p_positive, p_negative, sentiment_score).
EmojiLexicon = Mapping[str, tuple[float, float, float]]

LINGUISTIC_SLOTS = (
    "token_count",
    "char_count",
    "avg_token_length",
    "punctuation_count",
    "capitalized_token_count",
    "one_char_token_count",
    "url_count",
    "mention_count",
    "discourse_connective_count",
)
EMOTICON_SLOTS = ("count",)
EMOJI_SLOTS = ("sum_positive", "sum_negative", "sum_overall")
ENTITY_SLOTS = ("person_count", "group_count", "other_entity_count")

# Group order is fixed; aux slot ids are "<group>:<slot>" so a frozen space
# records which groups were active when it was built.
GROUP_SLOTS: dict[str, tuple[str, ...]] = {
    "linguistic": LINGUISTIC_SLOTS,
    "emoticon": EMOTICON_SLOTS,
    "emoji": EMOJI_SLOTS,
    "entity": ENTITY_SLOTS,
}

DEFAULT_CONNECTIVES = (
    "because",
    "but",
    "however",
    "therefore",
    "so",
    "although",
    "since",
    "though",
    "moreover",
    "thus",
)

# Christopher Potts' emoticon grammar: optional sideways prefix, eyes,
# optional nose, mouth, in both left-to-right and right-to-left orientation.
_EMOTICON = re.compile(
    r"""
    (?:
      [<>]?
      [:;=8]                     # eyes
      [\-o\*\']?                 # optional nose
      [\)\]\(\[dDpP/\:\}\{@\|\\] # mouth
      |
      [\)\]\(\[dDpP/\:\}\{@\|\\] # mouth
      [\-o\*\']?                 # optional nose
      [:;=8]                     # eyes
      [<>]?
    )""",
    re.VERBOSE,
)

# OntoNotes 5 entity tag set; anything else is counted in the third group
# with a warning.  "NORG" is accepted as an alias for NORP.
PERSON_TYPES = frozenset({"PERSON"})
GROUP_TYPES = frozenset({"ORG", "NORP", "GPE"})
ONTONOTES_TYPES = frozenset(
    {
        "PERSON", "NORP", "FAC", "ORG", "GPE", "LOC", "PRODUCT", "EVENT",
        "WORK_OF_ART", "LAW", "LANGUAGE", "DATE", "TIME", "PERCENT",
        "MONEY", "QUANTITY", "ORDINAL", "CARDINAL",
    }
)


@dataclass(frozen=True)
class AuxFeatures:
    """Values for every auxiliary group; assemble() picks the active ones."""

    linguistic: tuple[float, ...] = (0.0,) * len(LINGUISTIC_SLOTS)
    emoticon_count: int = 0
    emoji_sentiment: tuple[float, float, float] = (0.0, 0.0, 0.0)
    entity_groups: tuple[int, int, int] = (0, 0, 0)

    def __post_init__(self) -> None:
        if len(self.linguistic) != len(LINGUISTIC_SLOTS):
            raise OfflangError(
                f"linguistic group needs {len(LINGUISTIC_SLOTS)} values, got {len(self.linguistic)}"
            )

    def group_values(self, group: str) -> tuple[float, ...]:
        if group == "linguistic":
            return self.linguistic
        if group == "emoticon":
            return (float(self.emoticon_count),)
        if group == "emoji":
            return self.emoji_sentiment
        if group == "entity":
            return tuple(float(v) for v in self.entity_groups)
        raise OfflangError(f"unknown auxiliary feature group {group!r}")


@dataclass(frozen=True)
class EntityAnnotation:
    """Character-offset entity spans for one instance, OntoNotes-typed."""

    instance_id: str
    spans: tuple[tuple[int, int, str], ...]

    def validate_against(self, text: str) -> None:
        for start, end, etype in self.spans:
            if not (0 <= start < end <= len(text)):
                raise OfflangError(
                    f"entity span ({start}, {end}) for instance {self.instance_id} "
                    f"out of bounds for text of length {len(text)}"
                )


@dataclass(frozen=True)
class FeatureConfig:
    """Which feature groups are active, and the n-gram length range."""

    use_ngrams: bool = True
    use_linguistic: bool = False
    use_emoticon: bool = False
    use_emoji: bool = False
    use_entity: bool = False
    n_min: int = 2
    n_max: int = 7

    def __post_init__(self) -> None:
        if not (1 <= self.n_min <= self.n_max):
            raise OfflangError(
                f"n-gram range must satisfy 1 <= n_min <= n_max, got [{self.n_min}, {self.n_max}]"
            )

    @property
    def active_groups(self) -> tuple[str, ...]:
        flags = {
            "linguistic": self.use_linguistic,
            "emoticon": self.use_emoticon,
            "emoji": self.use_emoji,
            "entity": self.use_entity,
        }
        return tuple(g for g in GROUP_SLOTS if flags[g])

    def aux_slot_names(self) -> tuple[str, ...]:
        return tuple(
            f"{group}:{slot}"
            for group in self.active_groups
            for slot in GROUP_SLOTS[group]
        )


@dataclass(frozen=True)
class SparseVector:
    """Sparse coordinates of one instance in a frozen feature space."""

    indices: tuple[int, ...]
    values: tuple[float, ...]
    dimension: int
    space_fingerprint: str

    def __post_init__(self) -> None:
        if len(self.indices) != len(self.values):
            raise OfflangError("sparse vector indices and values must align")
        if any(b <= a for a, b in zip(self.indices, self.indices[1:])):
            raise OfflangError("sparse vector indices must be strictly increasing")
        if self.indices and not (0 <= self.indices[0] and self.indices[-1] < self.dimension):
            raise OfflangError("sparse vector index out of range")


def normalize(text: str) -> str:
    """Lowercase, collapse whitespace runs to single spaces, strip the ends."""
    return " ".join(text.lower().split())


def char_ngrams(text: str, n_min: int = 2, n_max: int = 7) -> NgramBag:
    """Count every contiguous character window of length n_min..n_max.

    Windows overlap and include spaces; a string shorter than n yields no
    n-grams of that length.
    """
    if not (1 <= n_min <= n_max):
        raise OfflangError(
            f"n-gram range must satisfy 1 <= n_min <= n_max, got [{n_min}, {n_max}]"
        )
    bag: Counter[str] = Counter()
    for n in range(n_min, n_max + 1):
        for i in range(len(text) - n + 1):
            bag[text[i : i + n]] += 1
    return dict(bag)


def _is_punctuation(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def _strip_punctuation(token: str) -> str:
    start, end = 0, len(token)
    while start < end and _is_punctuation(token[start]):
        start += 1
    while end > start and _is_punctuation(token[end - 1]):
        end -= 1
    return token[start:end]


def linguistic_features(
    text: str, connectives: Iterable[str] = DEFAULT_CONNECTIVES
) -> tuple[float, ...]:
    """The 9 surface statistics, in LINGUISTIC_SLOTS order.

    Tokenization is whitespace splitting.  char_count is the raw text
    length; a token is a connective when its lowercased, punctuation-
    stripped form is in the lexicon.
    """
    connective_set = {c.lower() for c in connectives}
    tokens = text.split()
    token_count = len(tokens)
    char_count = len(text)
    avg_token_length = (
        sum(len(t) for t in tokens) / token_count if token_count else 0.0
    )
    punctuation_count = sum(1 for ch in text if _is_punctuation(ch))
    capitalized = sum(1 for t in tokens if t[:1].isupper())
    one_char = sum(1 for t in tokens if len(t) == 1)
    urls = sum(1 for t in tokens if t.startswith("http") or t == "URL")
    mentions = sum(1 for t in tokens if t.startswith("@"))
    connective_count = sum(
        1 for t in tokens if _strip_punctuation(t).lower() in connective_set
    )
    return (
        float(token_count),
        float(char_count),
        float(avg_token_length),
        float(punctuation_count),
        float(capitalized),
        float(one_char),
        float(urls),
        float(mentions),
        float(connective_count),
    )


def emoticon_count(text: str) -> int:
    """Non-overlapping emoticon matches, scanned left to right."""
    return len(_EMOTICON.findall(text))


def load_connectives(path: str) -> tuple[str, ...]:
    """One connective per line; blank lines and # comments ignored."""
    try:
        with open(path, encoding="utf-8") as fh:
            words = [
                line.strip()
                for line in fh
                if line.strip() and not line.lstrip().startswith("#")
            ]
    except OSError as exc:
        raise OfflangError(f"cannot read connective lexicon {path}: {exc}") from exc
    return tuple(words)


def load_emoji_lexicon(path: str) -> EmojiLexicon:
    """Load `codepoint_hex,p_negative,p_neutral,p_positive,sentiment_score` CSV.

    An optional header row is detected by a non-hex first field.  Returns a
    map from the single-character emoji to (p_positive, p_negative,
    sentiment_score).
    """
    lexicon: dict[str, tuple[float, float, float]] = {}
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise OfflangError(f"cannot read emoji lexicon {path}: {exc}") from exc
    for lineno, row in enumerate(rows, start=1):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != 5:
            raise OfflangError(
                f"emoji lexicon {path} line {lineno}: expected 5 fields, got {len(row)}"
            )
        cp_field = row[0].strip()
        try:
            codepoint = int(cp_field, 16)
        except ValueError:
            if lineno == 1:
                continue
            raise OfflangError(
                f"emoji lexicon {path} line {lineno}: bad codepoint {cp_field!r}"
            ) from None
        try:
            p_negative, _p_neutral, p_positive, score = (float(v) for v in row[1:])
        except ValueError:
            raise OfflangError(
                f"emoji lexicon {path} line {lineno}: non-numeric probability field"
            ) from None
        lexicon[chr(codepoint)] = (p_positive, p_negative, score)
    return lexicon


def emoji_sentiment(
    text: str, lexicon: EmojiLexicon
) -> tuple[float, float, float]:
    """Per-occurrence sums of (p_positive, p_negative, sentiment_score)."""
    pos = neg = overall = 0.0
    for ch in text:
        entry = lexicon.get(ch)
        if entry is not None:
            pos += entry[0]
            neg += entry[1]
            overall += entry[2]
    return (pos, neg, overall)


def load_entity_annotations(path: str) -> dict[str, EntityAnnotation]:
    """Load the `id TAB start TAB end TAB type` sidecar, grouped by id."""
    spans: dict[str, list[tuple[int, int, str]]] = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().split("\n")
    except OSError as exc:
        raise OfflangError(f"cannot read entity sidecar {path}: {exc}") from exc
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 4:
            raise OfflangError(
                f"entity sidecar {path} line {lineno}: expected 4 tab-separated fields"
            )
        instance_id, start_s, end_s, etype = (p.strip() for p in parts)
        try:
            start, end = int(start_s), int(end_s)
        except ValueError:
            raise OfflangError(
                f"entity sidecar {path} line {lineno}: non-integer span offsets"
            ) from None
        if not (0 <= start < end):
            raise OfflangError(
                f"entity sidecar {path} line {lineno}: span must satisfy 0 <= start < end"
            )
        spans.setdefault(instance_id, []).append((start, end, etype))
    return {
        iid: EntityAnnotation(iid, tuple(sp)) for iid, sp in spans.items()
    }


def entity_group_counts(annotation: EntityAnnotation) -> tuple[int, int, int]:
    """(person, group, other) span counts; unknown types fall in "other"."""
    person = group = other = 0
    for _start, _end, etype in annotation.spans:
        if etype == "NORG":
            etype = "NORP"
        if etype in PERSON_TYPES:
            person += 1
        elif etype in GROUP_TYPES:
            group += 1
        else:
            if etype not in ONTONOTES_TYPES:
                warnings.warn(
                    f"unknown entity type {etype!r} for instance "
                    f"{annotation.instance_id}; counted as other",
                    stacklevel=2,
                )
            other += 1
    return (person, group, other)


def aux_features(
    text: str,
    *,
    connectives: Iterable[str] = DEFAULT_CONNECTIVES,
    emoji_lexicon: EmojiLexicon | None = None,
    annotation: EntityAnnotation | None = None,
) -> AuxFeatures:
    """Compute every auxiliary group for one tweet."""
    if annotation is not None:
        annotation.validate_against(text)
    return AuxFeatures(
        linguistic=linguistic_features(text, connectives),
        emoticon_count=emoticon_count(text),
        emoji_sentiment=(
            emoji_sentiment(text, emoji_lexicon) if emoji_lexicon else (0.0, 0.0, 0.0)
        ),
        entity_groups=(
            entity_group_counts(annotation) if annotation is not None else (0, 0, 0)
        ),
    )


def assemble(
    text: str,
    space: FeatureSpace,
    aux: AuxFeatures,
    config: FeatureConfig,
) -> SparseVector:
    """Project one tweet into the frozen space: n-grams, active aux, bias.

    N-grams outside the space are dropped; zero-valued auxiliary
    coordinates are omitted from the sparse form; the bias coordinate is
    always present with value 1.0.
    """
    coords: list[tuple[int, float]] = []
    if config.use_ngrams and space.ngram_slots:
        bag = char_ngrams(normalize(text), config.n_min, config.n_max)
        index = space.ngram_index
        for ng, count in bag.items():
            slot = index.get(ng)
            if slot is not None:
                coords.append((slot, float(count)))
    aux_index = space.aux_index
    for group in config.active_groups:
        values = aux.group_values(group)
        for slot_name, value in zip(GROUP_SLOTS[group], values):
            full_name = f"{group}:{slot_name}"
            slot = aux_index.get(full_name)
            if slot is None:
                raise OfflangError(
                    f"feature group {group!r} is active but slot {full_name!r} "
                    "is not in the feature space"
                )
            if value != 0.0:
                coords.append((slot, float(value)))
    coords.append((space.bias_index, 1.0))
    coords.sort()
    return SparseVector(
        indices=tuple(i for i, _ in coords),
        values=tuple(v for _, v in coords),
        dimension=space.size,
        space_fingerprint=space.fingerprint,
    )


def stack_vectors(vectors: Sequence[SparseVector]) -> sp.csr_matrix:
    """Stack per-instance vectors into one CSR matrix (rows in input order)."""
    if not vectors:
        raise OfflangError("cannot stack an empty list of vectors")
    fingerprint = vectors[0].space_fingerprint
    dimension = vectors[0].dimension
    for v in vectors[1:]:
        if v.space_fingerprint != fingerprint or v.dimension != dimension:
            raise OfflangError("cannot stack vectors from different feature spaces")
    indptr = np.zeros(len(vectors) + 1, dtype=np.int64)
    for row, v in enumerate(vectors):
        indptr[row + 1] = indptr[row] + len(v.indices)
    indices = np.concatenate([np.asarray(v.indices, dtype=np.int64) for v in vectors])
    data = np.concatenate([np.asarray(v.values, dtype=np.float64) for v in vectors])
    return sp.csr_matrix((data, indices, indptr), shape=(len(vectors), dimension))
