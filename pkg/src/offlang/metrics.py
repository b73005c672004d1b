"""Scoring: confusion matrices, per-class P/R/F1, macro F1, accuracy.

Conventions that the constant baselines depend on: a zero-denominator
precision or recall is 0, and a class nobody predicted and nobody holds
still contributes an F1 of 0 to the macro average.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .corpus import Corpus
from .errors import OfflangError


@dataclass(frozen=True)
class ConfusionMatrix:
    """Rows are gold classes, columns predicted, in the task's class order."""

    classes: tuple[str, ...]
    cells: np.ndarray

    def __post_init__(self) -> None:
        k = len(self.classes)
        if self.cells.shape != (k, k):
            raise OfflangError(
                f"confusion matrix for {k} classes must be {k}x{k}, got {self.cells.shape}"
            )
        if np.any(self.cells < 0):
            raise OfflangError("confusion matrix cells must be nonnegative")

    @property
    def total(self) -> int:
        return int(self.cells.sum())

    def index(self, cls: str) -> int:
        try:
            return self.classes.index(cls)
        except ValueError:
            raise OfflangError(f"label {cls!r} is not among classes {self.classes}") from None


@dataclass(frozen=True)
class EvalReport:
    confusion: ConfusionMatrix
    per_class: Mapping[str, tuple[float, float, float]]
    macro_f1: float
    accuracy: float


def _prf(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = (
        2 * precision * recall / (precision + recall) if precision + recall else 0.0
    )
    return precision, recall, f1


def report_from_confusion(confusion: ConfusionMatrix) -> EvalReport:
    """Recompute all metrics from the matrix alone."""
    cells = confusion.cells
    total = confusion.total
    if total == 0:
        raise OfflangError("cannot score an empty confusion matrix")
    per_class: dict[str, tuple[float, float, float]] = {}
    for i, cls in enumerate(confusion.classes):
        tp = int(cells[i, i])
        fp = int(cells[:, i].sum()) - tp
        fn = int(cells[i, :].sum()) - tp
        per_class[cls] = _prf(tp, fp, fn)
    macro_f1 = sum(prf[2] for prf in per_class.values()) / len(confusion.classes)
    accuracy = float(np.trace(cells)) / total
    return EvalReport(confusion, per_class, macro_f1, accuracy)


def confusion_from_pairs(
    pairs: Sequence[tuple[str, str]], classes: Sequence[str]
) -> ConfusionMatrix:
    """Count (gold, predicted) pairs into a matrix over the given class order."""
    classes = tuple(classes)
    index = {cls: i for i, cls in enumerate(classes)}
    cells = np.zeros((len(classes), len(classes)), dtype=np.int64)
    for gold, pred in pairs:
        if gold not in index:
            raise OfflangError(f"gold label {gold!r} outside the class set {classes}")
        if pred not in index:
            raise OfflangError(f"predicted label {pred!r} outside the class set {classes}")
        cells[index[gold], index[pred]] += 1
    return ConfusionMatrix(classes, cells)


def evaluate(gold: Corpus, predictions: Mapping[str, str]) -> EvalReport:
    """Score a prediction map against a fully labeled gold corpus.

    Every gold id needs a prediction; prediction ids with no gold row are
    ignored, so one prediction file can serve several gold subsets.
    """
    missing = [inst.id for inst in gold if inst.id not in predictions]
    if missing:
        shown = ", ".join(missing[:5])
        more = f" (and {len(missing) - 5} more)" if len(missing) > 5 else ""
        raise OfflangError(f"no prediction for gold ids: {shown}{more}")
    gold_labels = gold.labels()
    pairs = [
        (gold_label, predictions[inst.id])
        for inst, gold_label in zip(gold, gold_labels)
    ]
    return report_from_confusion(confusion_from_pairs(pairs, gold.classes))


def constant_baseline(gold: Corpus, cls: str) -> EvalReport:
    """Score the predictor that answers `cls` for every instance."""
    if cls not in gold.classes:
        raise OfflangError(
            f"baseline label {cls!r} is not a task-{gold.task} class {gold.classes}"
        )
    return evaluate(gold, {inst.id: cls for inst in gold})


def permute_labels(
    confusion: ConfusionMatrix, mapping: Mapping[str, str]
) -> ConfusionMatrix:
    """Relabel predictions by a bijection; gold rows stay put."""
    classes = confusion.classes
    if set(mapping.keys()) != set(classes) or set(mapping.values()) != set(classes):
        raise OfflangError(
            f"label mapping must be a bijection over {classes}, got {dict(mapping)}"
        )
    cells = np.zeros_like(confusion.cells)
    for cls in classes:
        cells[:, confusion.index(mapping[cls])] = confusion.cells[:, confusion.index(cls)]
    return ConfusionMatrix(classes, cells)


def render_report(report: EvalReport) -> str:
    """Aligned plain-text table, floats at 4 decimal places."""
    classes = report.confusion.classes
    width = max(9, *(len(c) for c in classes))
    lines = [f"{'class':<{width}}  precision  recall  f1"]
    for cls in classes:
        p, r, f1 = report.per_class[cls]
        lines.append(f"{cls:<{width}}  {p:>9.4f}  {r:>6.4f}  {f1:.4f}")
    lines.append("")
    lines.append(f"{'accuracy':<{width}}  {report.accuracy:.4f}")
    lines.append(f"{'macro_f1':<{width}}  {report.macro_f1:.4f}")
    lines.append("")
    header = "  ".join(f"{c:>{width}}" for c in classes)
    corner = "gold\\pred"
    lines.append(f"{corner:<{width}}  {header}")
    for i, cls in enumerate(classes):
        row = "  ".join(
            f"{int(v):>{width}}" for v in report.confusion.cells[i]
        )
        lines.append(f"{cls:<{width}}  {row}")
    return "\n".join(lines) + "\n"


def render_structured(report: EvalReport) -> str:
    """Machine-readable key-value lines; floats at full precision."""
    lines = [
        f"accuracy\t{report.accuracy!r}",
        f"macro_f1\t{report.macro_f1!r}",
    ]
    for cls in report.confusion.classes:
        p, r, f1 = report.per_class[cls]
        lines.append(f"precision\t{cls}\t{p!r}")
        lines.append(f"recall\t{cls}\t{r!r}")
        lines.append(f"f1\t{cls}\t{f1!r}")
    for i, cls in enumerate(report.confusion.classes):
        row = "\t".join(str(int(v)) for v in report.confusion.cells[i])
        lines.append(f"confusion\t{cls}\t{row}")
    return "\n".join(lines) + "\n"
