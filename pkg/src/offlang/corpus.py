"""OLID-format corpora: parsing, validation, splits, and the prediction exchange format.

A corpus file is UTF-8 TSV with columns ``id, tweet, subtask_a, subtask_b,
subtask_c`` (header optional) or the two-column ``id, tweet`` layout used for
unlabeled test inputs.  The literal string ``NULL`` (case-sensitive) marks an
absent label.  Predictions travel as headerless ``id,label`` CSV.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass
from typing import Iterator, Mapping, Optional, Sequence

import numpy as np

from .errors import OfflangError

NULL = "NULL"

# Fixed class orders per subtask; these drive one-vs-rest ordering,
# tie-breaking, and report layout.
CLASS_ORDER = {
    "A": ("OFF", "NOT"),
    "B": ("TIN", "UNT"),
    "C": ("GRP", "IND", "OTH"),
}

_LABEL_SETS = {
    "subtask_a": frozenset({"OFF", "NOT"}),
    "subtask_b": frozenset({"TIN", "UNT"}),
    "subtask_c": frozenset({"IND", "GRP", "OTH"}),
}

_TASK_FIELD = {"A": "label_a", "B": "label_b", "C": "label_c"}


@dataclass(frozen=True)
class Instance:
    """One tweet with its (possibly partial) gold labels."""

    id: str
    text: str
    label_a: Optional[str] = None
    label_b: Optional[str] = None
    label_c: Optional[str] = None

    def label_for(self, task: str) -> Optional[str]:
        return getattr(self, _TASK_FIELD[task])


@dataclass(frozen=True)
class Corpus:
    """An ordered, immutable collection of instances declared for one subtask."""

    instances: tuple[Instance, ...]
    task: str

    def __post_init__(self) -> None:
        if self.task not in CLASS_ORDER:
            raise OfflangError(f"unknown task {self.task!r}; expected one of A, B, C")

    def __len__(self) -> int:
        return len(self.instances)

    def __iter__(self) -> Iterator[Instance]:
        return iter(self.instances)

    @property
    def classes(self) -> tuple[str, ...]:
        return CLASS_ORDER[self.task]

    @property
    def is_labeled(self) -> bool:
        """True when every instance carries this task's gold label."""
        return bool(self.instances) and all(
            inst.label_for(self.task) is not None for inst in self.instances
        )

    def labels(self) -> list[str]:
        """Gold labels for the declared task; requires a fully labeled corpus."""
        if not self.is_labeled:
            raise OfflangError(
                f"corpus is not fully labeled for task {self.task}"
            )
        return [inst.label_for(self.task) for inst in self.instances]

    def filter_labeled(self) -> "Corpus":
        """Instances that carry this task's label, in original order.

        The distributed OLID training file mixes tasks in one TSV; training
        for B or C starts by selecting the rows labeled for that task.
        """
        kept = tuple(
            inst for inst in self.instances if inst.label_for(self.task) is not None
        )
        return Corpus(kept, self.task)


def _check_hierarchy(inst: Instance, lineno: int) -> None:
    if inst.label_c is not None and inst.label_b is not None and inst.label_b != "TIN":
        raise OfflangError(
            f"line {lineno}: subtask_c label {inst.label_c!r} requires subtask_b TIN, "
            f"got {inst.label_b!r}"
        )
    if inst.label_b is not None and inst.label_a is not None and inst.label_a != "OFF":
        raise OfflangError(
            f"line {lineno}: subtask_b label {inst.label_b!r} requires subtask_a OFF, "
            f"got {inst.label_a!r}"
        )


def _parse_label(raw: str, column: str, lineno: int) -> Optional[str]:
    if raw == NULL:
        return None
    if raw not in _LABEL_SETS[column]:
        raise OfflangError(
            f"line {lineno}: unknown {column} label {raw!r}"
        )
    return raw


def parse_olid(path: str, task: str) -> Corpus:
    """Read an OLID TSV into a Corpus for the given task.

    Keeps one instance per data row in file order; rows may lack the task's
    label (see :meth:`Corpus.filter_labeled`).  Rows must have 5 columns, or
    2 for unlabeled inputs.
    """
    if task not in CLASS_ORDER:
        raise OfflangError(f"unknown task {task!r}; expected one of A, B, C")
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            lines = fh.read().split("\n")
    except OSError as exc:
        raise OfflangError(f"cannot read corpus file {path}: {exc}") from exc
    if lines and lines[-1] == "":
        lines.pop()

    instances: list[Instance] = []
    seen_ids: set[str] = set()
    for lineno, line in enumerate(lines, start=1):
        fields = line.split("\t")
        if lineno == 1 and fields[0] == "id":
            continue
        if len(fields) == 2:
            row_id, text = fields
            labels = (None, None, None)
        elif len(fields) == 5:
            row_id, text = fields[0], fields[1]
            labels = (
                _parse_label(fields[2], "subtask_a", lineno),
                _parse_label(fields[3], "subtask_b", lineno),
                _parse_label(fields[4], "subtask_c", lineno),
            )
        else:
            raise OfflangError(
                f"line {lineno}: expected 2 or 5 tab-separated fields, got {len(fields)}"
            )
        if not row_id:
            raise OfflangError(f"line {lineno}: empty id")
        if not text:
            raise OfflangError(f"line {lineno}: empty tweet text for id {row_id}")
        if row_id in seen_ids:
            raise OfflangError(f"line {lineno}: duplicate id {row_id!r}")
        seen_ids.add(row_id)
        inst = Instance(row_id, text, *labels)
        _check_hierarchy(inst, lineno)
        instances.append(inst)

    if not instances:
        warnings.warn(f"corpus file {path} contains no data rows", stacklevel=2)
    return Corpus(tuple(instances), task)


def serialize_olid(corpus: Corpus, path: str) -> None:
    """Write a corpus back to the 5-column OLID TSV layout (with header)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("id\ttweet\tsubtask_a\tsubtask_b\tsubtask_c\n")
        for inst in corpus:
            for field in (inst.id, inst.text):
                if "\t" in field or "\n" in field:
                    raise OfflangError(
                        f"id {inst.id!r}: tab/newline in field cannot be represented in TSV"
                    )
            fh.write(
                "\t".join(
                    (
                        inst.id,
                        inst.text,
                        inst.label_a or NULL,
                        inst.label_b or NULL,
                        inst.label_c or NULL,
                    )
                )
                + "\n"
            )


def class_distribution(corpus: Corpus) -> dict[str, int]:
    """Label counts for the corpus task, keyed in the fixed class order."""
    labels = corpus.labels()
    counts = {cls: 0 for cls in corpus.classes}
    for label in labels:
        counts[label] += 1
    return counts


def split(
    corpus: Corpus, held_out_fraction: float, seed: int
) -> tuple[Corpus, Corpus]:
    """Deterministic stratified split into (train, held_out).

    Per class, round(fraction * class_size) instances go to the held-out
    part; every class must leave at least one instance on each side.
    """
    if not 0.0 < held_out_fraction < 1.0:
        raise OfflangError(
            f"held_out_fraction must be in (0,1), got {held_out_fraction}"
        )
    labels = corpus.labels()
    by_class: dict[str, list[int]] = {cls: [] for cls in corpus.classes}
    for i, label in enumerate(labels):
        by_class[label].append(i)

    rng = np.random.default_rng(seed)
    held_idx: set[int] = set()
    for cls in corpus.classes:
        members = by_class[cls]
        if not members:
            continue
        n_held = round(held_out_fraction * len(members))
        if n_held < 1 or n_held > len(members) - 1:
            raise OfflangError(
                f"class {cls!r} has {len(members)} instances; cannot hold out "
                f"{n_held} and keep a nonempty training side"
            )
        order = rng.permutation(len(members))
        held_idx.update(members[j] for j in order[:n_held])

    held = tuple(inst for i, inst in enumerate(corpus.instances) if i in held_idx)
    train = tuple(inst for i, inst in enumerate(corpus.instances) if i not in held_idx)
    return Corpus(train, corpus.task), Corpus(held, corpus.task)


def read_predictions(path: str) -> dict[str, str]:
    """Read a headerless ``id,label`` prediction CSV, preserving row order."""
    predictions: dict[str, str] = {}
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            for lineno, row in enumerate(csv.reader(fh), start=1):
                if not row:
                    continue
                if len(row) != 2:
                    raise OfflangError(
                        f"line {lineno}: expected 'id,label', got {len(row)} fields"
                    )
                row_id, label = row
                if row_id in predictions:
                    raise OfflangError(f"line {lineno}: duplicate prediction for id {row_id!r}")
                predictions[row_id] = label
    except OSError as exc:
        raise OfflangError(f"cannot read predictions file {path}: {exc}") from exc
    return predictions


def write_predictions(rows: Sequence[tuple[str, str]] | Mapping[str, str], path: str) -> None:
    """Write ``id,label`` rows in the shared-task submission format."""
    if isinstance(rows, Mapping):
        rows = list(rows.items())
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        for row_id, label in rows:
            writer.writerow([row_id, label])
