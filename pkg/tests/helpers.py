"""Shared builders for the test suite."""

from __future__ import annotations

import random
from pathlib import Path

from offlang.corpus import Corpus, Instance

OLID_HEADER = "id\ttweet\tsubtask_a\tsubtask_b\tsubtask_c"

# Vocabulary pools with disjoint character content, so a corpus drawn from
# them is linearly separable on character n-grams.
SEPARABLE_WORDS = {
    "GRP": ["crowd", "mob", "horde", "faction", "union"],
    "IND": ["person", "fellow", "individual", "buddy", "mate"],
    "OTH": ["thing", "object", "entity", "item", "widget"],
}


def write_text(path: Path, text: str) -> str:
    path.write_text(text, encoding="utf-8", newline="")
    return str(path)


def write_olid(path: Path, rows: list[str], header: bool = True) -> str:
    lines = ([OLID_HEADER] if header else []) + rows
    return write_text(path, "\n".join(lines) + "\n")


def olid_row(
    row_id: str,
    text: str,
    label_a: str = "NULL",
    label_b: str = "NULL",
    label_c: str = "NULL",
) -> str:
    return "\t".join((row_id, text, label_a, label_b, label_c))


def task_c_row(row_id: str, text: str, cls: str) -> str:
    return olid_row(row_id, text, "OFF", "TIN", cls)


def separable_task_c_rows(
    n_per_class: int, seed: int, words_per_tweet: int = 6, start_id: int = 1000
) -> list[str]:
    """Task-C rows whose class is recoverable from character content alone."""
    rng = random.Random(seed)
    rows = []
    next_id = start_id
    for i in range(n_per_class):
        for cls in ("GRP", "IND", "OTH"):
            text = " ".join(
                rng.choice(SEPARABLE_WORDS[cls]) for _ in range(words_per_tweet)
            )
            rows.append(task_c_row(str(next_id), text, cls))
            next_id += 1
    return rows


def gold_corpus_from_counts(counts: dict[str, int], task: str) -> Corpus:
    """A labeled corpus realizing an exact class distribution."""
    instances = []
    i = 0
    for cls, n in counts.items():
        for _ in range(n):
            if task == "A":
                labels = {"label_a": cls}
            elif task == "B":
                labels = {"label_a": "OFF", "label_b": cls}
            else:
                labels = {"label_a": "OFF", "label_b": "TIN", "label_c": cls}
            instances.append(Instance(id=str(i), text=f"tweet {i}", **labels))
            i += 1
    return Corpus(tuple(instances), task)
