"""OLID TSV reading (subtask A only) and the id,label prediction format.

Both formats are the exchange contract shared with the n-gram toolkit:
tab-separated corpus rows `id, tweet[, subtask_a, subtask_b, subtask_c]`
with NULL for absent labels and an optional header, and headerless
comma-separated `id,label` prediction rows with LF line endings.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Sequence

from .errors import FinetuneError

NULL = "NULL"

# Head output index per label: column 0 scores NOT, column 1 scores OFF.
LABELS = ("NOT", "OFF")


@dataclass(frozen=True)
class TaskAInstance:
    id: str
    text: str
    label: str | None = None


def read_task_a(path: str) -> list[TaskAInstance]:
    """Read a corpus TSV, keeping only the subtask-A column of the labels."""
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            lines = fh.read().split("\n")
    except OSError as exc:
        raise FinetuneError(f"cannot read corpus file {path}: {exc}") from exc
    if lines and lines[-1] == "":
        lines.pop()

    instances: list[TaskAInstance] = []
    seen: set[str] = set()
    for lineno, line in enumerate(lines, start=1):
        fields = line.split("\t")
        if lineno == 1 and fields and fields[0] == "id":
            continue
        if len(fields) not in (2, 5):
            raise FinetuneError(
                f"line {lineno}: expected 2 or 5 tab-separated fields, got {len(fields)}"
            )
        row_id, text = fields[0], fields[1]
        if not row_id:
            raise FinetuneError(f"line {lineno}: empty id")
        if not text:
            raise FinetuneError(f"line {lineno}: empty tweet text for id {row_id}")
        if row_id in seen:
            raise FinetuneError(f"line {lineno}: duplicate id {row_id!r}")
        seen.add(row_id)
        label: str | None = None
        if len(fields) == 5 and fields[2] != NULL:
            if fields[2] not in LABELS:
                raise FinetuneError(
                    f"line {lineno}: unknown subtask_a label {fields[2]!r}"
                )
            label = fields[2]
        instances.append(TaskAInstance(row_id, text, label))
    return instances


def labeled_only(instances: Sequence[TaskAInstance]) -> list[TaskAInstance]:
    return [inst for inst in instances if inst.label is not None]


def write_predictions(rows: Sequence[tuple[str, str]], path: str) -> None:
    """Write headerless id,label rows with LF endings."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        for row_id, label in rows:
            writer.writerow([row_id, label])
