"""Linear SVM with squared-hinge loss, trained by dual coordinate descent.

Primal problem per binary task:

    f(w) = 1/2 ||w||^2 + C * sum_i max(0, 1 - y_i <w, x_i>)^2

The dual has no upper box constraint; each coordinate step maximizes the
dual exactly, with the 1/(2C) diagonal term keeping every step well
defined even for zero-norm rows.  Multiclass is one-vs-rest over a fixed
class order; the bias is an augmented constant feature, so the solver
itself is bias-free.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import OfflangError
from .features import SparseVector

MODEL_HEADER = "offlang-svm v1"


@dataclass(frozen=True)
class SvmConfig:
    """Solver settings; the duality gap drives convergence."""

    C: float = 0.1
    tolerance: float = 1e-6
    max_epochs: int = 1000
    seed: int = 0
    shuffle: bool = True

    def __post_init__(self) -> None:
        if not self.C > 0:
            raise OfflangError(f"C must be positive, got {self.C}")
        if not self.tolerance > 0:
            raise OfflangError(f"tolerance must be positive, got {self.tolerance}")
        if self.max_epochs < 1:
            raise OfflangError(f"max_epochs must be >= 1, got {self.max_epochs}")


@dataclass(frozen=True)
class EpochStats:
    epoch: int
    primal: float
    dual: float

    @property
    def gap(self) -> float:
        return self.primal - self.dual


@dataclass(frozen=True)
class SvmModel:
    """One weight vector per one-vs-rest problem, tied to a feature space.

    Binary tasks store a single vector for the first class in class order;
    the second class scores as its negation.
    """

    classes: tuple[str, ...]
    weights: np.ndarray
    config: SvmConfig
    space_fingerprint: str

    def __post_init__(self) -> None:
        expected = 1 if len(self.classes) == 2 else len(self.classes)
        if self.weights.ndim != 2 or self.weights.shape[0] != expected:
            raise OfflangError(
                f"model for {len(self.classes)} classes needs {expected} weight "
                f"vectors, got shape {self.weights.shape}"
            )

    @property
    def dimension(self) -> int:
        return self.weights.shape[1]

    def class_scores(self, X: sp.csr_matrix) -> np.ndarray:
        """Decision values, one column per class in class order."""
        raw = X @ self.weights.T
        if len(self.classes) == 2:
            return np.column_stack([raw[:, 0], -raw[:, 0]])
        return raw


def _validate_problem(X: sp.csr_matrix, y: np.ndarray) -> None:
    if X.shape[0] != y.shape[0]:
        raise OfflangError("feature matrix and labels must have equal row counts")
    if not np.all(np.isfinite(X.data)):
        raise OfflangError("feature matrix contains NaN or Inf values")
    signs = set(np.unique(y).tolist())
    if signs != {-1.0, 1.0}:
        raise OfflangError(
            "binary training needs labels in {+1, -1} with both signs present, "
            f"got {sorted(signs)}"
        )


def objective(
    w: np.ndarray, X: sp.csr_matrix, y: np.ndarray, C: float
) -> float:
    """Primal squared-hinge objective at w."""
    margins = 1.0 - y * (X @ w)
    hinge = np.maximum(margins, 0.0)
    return 0.5 * float(w @ w) + C * float(hinge @ hinge)


def _dual_objective(alpha: np.ndarray, w: np.ndarray, C: float) -> float:
    return float(alpha.sum() - 0.5 * (w @ w) - (alpha @ alpha) / (4.0 * C))


def solve_binary(
    X: sp.csr_matrix, y: np.ndarray, config: SvmConfig
) -> tuple[np.ndarray, list[EpochStats], bool]:
    """Run dual coordinate descent; returns (w, per-epoch stats, converged).

    The retained iterate is the best (lowest-primal) end-of-epoch w seen so
    far, so the reported objective is non-increasing across epochs and the
    returned w carries the certificate: primal(w) - dual(alpha) <=
    tolerance * (1 + |primal(w)|) on convergence.  The dual objective must
    never decrease; a decrease beyond float noise is an internal error.
    """
    X = sp.csr_matrix(X)
    y = np.asarray(y, dtype=np.float64)
    _validate_problem(X, y)
    n, dim = X.shape
    C = config.C
    inv_2c = 1.0 / (2.0 * C)

    w = np.zeros(dim)
    alpha = np.zeros(n)
    rows = [
        (X.indices[X.indptr[i] : X.indptr[i + 1]], X.data[X.indptr[i] : X.indptr[i + 1]])
        for i in range(n)
    ]
    q_diag = np.array([float(d @ d) + inv_2c for _, d in rows])

    rng = np.random.default_rng(config.seed)
    order = np.arange(n)
    history: list[EpochStats] = []
    prev_dual = -np.inf
    best_w = w.copy()
    best_primal = objective(w, X, y, C)
    for epoch in range(1, config.max_epochs + 1):
        if config.shuffle:
            rng.shuffle(order)
        for i in order:
            idx, data = rows[i]
            g = y[i] * float(w[idx] @ data) - 1.0 + alpha[i] * inv_2c
            if alpha[i] == 0.0 and g >= 0.0:
                continue
            new_alpha = max(alpha[i] - g / q_diag[i], 0.0)
            delta = new_alpha - alpha[i]
            if delta != 0.0:
                alpha[i] = new_alpha
                w[idx] += (delta * y[i]) * data
        primal = objective(w, X, y, C)
        if primal < best_primal:
            best_primal = primal
            best_w = w.copy()
        dual = _dual_objective(alpha, w, C)
        if dual < prev_dual - 1e-9 * (1.0 + abs(prev_dual)):
            raise OfflangError(
                f"internal solver error: dual objective decreased at epoch {epoch}"
            )
        prev_dual = dual
        history.append(EpochStats(epoch, best_primal, dual))
        if best_primal - dual <= config.tolerance * (1.0 + abs(best_primal)):
            return best_w, history, True
    return best_w, history, False


def train_binary(
    X: sp.csr_matrix, y: Sequence[float] | np.ndarray, config: SvmConfig
) -> np.ndarray:
    """Weight vector for one +1/-1 problem; warns if max_epochs ran out."""
    w, history, converged = solve_binary(X, np.asarray(y, dtype=np.float64), config)
    if not converged:
        last = history[-1]
        warnings.warn(
            f"solver stopped at max_epochs={config.max_epochs} with duality gap "
            f"{last.gap:.3e} (tolerance {config.tolerance:.1e})",
            stacklevel=2,
        )
    return w


def train_ovr(
    X: sp.csr_matrix,
    labels: Sequence[str],
    classes: Sequence[str],
    config: SvmConfig,
    space_fingerprint: str = "",
) -> SvmModel:
    """One binary problem per class; binary tasks collapse to a single one."""
    classes = tuple(classes)
    if len(classes) < 2:
        raise OfflangError("one-vs-rest training needs at least 2 classes")
    labels = list(labels)
    present = set(labels)
    for cls in classes:
        if cls not in present:
            raise OfflangError(f"class {cls!r} is absent from the training labels")
    unknown = present - set(classes)
    if unknown:
        raise OfflangError(f"training labels outside the class set: {sorted(unknown)}")

    targets = classes[:1] if len(classes) == 2 else classes
    weight_rows = []
    for cls in targets:
        y = np.array([1.0 if lab == cls else -1.0 for lab in labels])
        weight_rows.append(train_binary(X, y, config))
    return SvmModel(
        classes=classes,
        weights=np.vstack(weight_rows),
        config=config,
        space_fingerprint=space_fingerprint,
    )


def predict(model: SvmModel, x: SparseVector) -> tuple[str, dict[str, float]]:
    """Argmax of the per-class decision values; ties go to class order."""
    if x.space_fingerprint != model.space_fingerprint:
        raise OfflangError(
            "feature vector was built against a different feature space than the model"
        )
    if x.dimension != model.dimension:
        raise OfflangError(
            f"feature vector dimension {x.dimension} != model dimension {model.dimension}"
        )
    dense = np.zeros(x.dimension)
    dense[list(x.indices)] = x.values
    raw = model.weights @ dense
    if len(model.classes) == 2:
        scores = {model.classes[0]: float(raw[0]), model.classes[1]: float(-raw[0])}
    else:
        scores = {cls: float(raw[i]) for i, cls in enumerate(model.classes)}
    best = model.classes[int(np.argmax([scores[c] for c in model.classes]))]
    return best, scores


def predict_labels(model: SvmModel, X: sp.csr_matrix) -> list[str]:
    """Batch form of predict; np.argmax keeps the class-order tie-break."""
    if X.shape[1] != model.dimension:
        raise OfflangError(
            f"feature matrix width {X.shape[1]} != model dimension {model.dimension}"
        )
    scores = model.class_scores(X)
    return [model.classes[i] for i in np.argmax(scores, axis=1)]


def serialize_model(model: SvmModel) -> str:
    """Versioned text form; weights at full round-trip decimal precision."""
    cfg = model.config
    lines = [
        MODEL_HEADER,
        "classes\t" + "\t".join(model.classes),
        f"config\tC={cfg.C!r}\ttolerance={cfg.tolerance!r}\tmax_epochs={cfg.max_epochs}\tseed={cfg.seed}",
        f"space\t{model.space_fingerprint}",
    ]
    targets = model.classes[:1] if len(model.classes) == 2 else model.classes
    for cls, row in zip(targets, model.weights):
        lines.append(f"weights\t{cls}\t" + " ".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def write_model(model: SvmModel, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(serialize_model(model))


def _parse_config_fields(fields: Sequence[str]) -> SvmConfig:
    parsed: dict[str, str] = {}
    for field_str in fields:
        key, sep, value = field_str.partition("=")
        if not sep:
            raise OfflangError(f"malformed model config field {field_str!r}")
        parsed[key] = value
    try:
        return SvmConfig(
            C=float(parsed["C"]),
            tolerance=float(parsed["tolerance"]),
            max_epochs=int(parsed["max_epochs"]),
            seed=int(parsed["seed"]),
        )
    except KeyError as exc:
        raise OfflangError(f"model config line is missing key {exc.args[0]!r}") from None
    except ValueError as exc:
        raise OfflangError(f"model config line has a non-numeric value: {exc}") from None


def parse_model(text: str) -> SvmModel:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0] != MODEL_HEADER:
        raise OfflangError("not a model file (missing 'offlang-svm v1' header)")
    if len(lines) < 5:
        raise OfflangError("model file is truncated")
    parts = lines[1].split("\t")
    if parts[0] != "classes" or len(parts) < 3:
        raise OfflangError("model file line 2 must list at least two classes")
    classes = tuple(parts[1:])
    cfg_parts = lines[2].split("\t")
    if cfg_parts[0] != "config":
        raise OfflangError("model file line 3 must be the config line")
    config = _parse_config_fields(cfg_parts[1:])
    space_parts = lines[3].split("\t")
    if space_parts[0] != "space" or len(space_parts) != 2:
        raise OfflangError("model file line 4 must be the space fingerprint line")
    fingerprint = space_parts[1]

    expected = classes[:1] if len(classes) == 2 else classes
    weight_rows: dict[str, np.ndarray] = {}
    for lineno, line in enumerate(lines[4:], start=5):
        fields = line.split("\t")
        if len(fields) != 3 or fields[0] != "weights":
            raise OfflangError(f"model file line {lineno}: expected a weights line")
        cls = fields[1]
        if cls not in expected:
            raise OfflangError(f"model file line {lineno}: unexpected class {cls!r}")
        if cls in weight_rows:
            raise OfflangError(f"model file line {lineno}: duplicate weights for {cls!r}")
        try:
            weight_rows[cls] = np.array([float(v) for v in fields[2].split(" ")])
        except ValueError:
            raise OfflangError(
                f"model file line {lineno}: non-numeric weight value"
            ) from None
    missing = [cls for cls in expected if cls not in weight_rows]
    if missing:
        raise OfflangError(f"model file is missing weight lines for {missing}")
    dims = {row.shape[0] for row in weight_rows.values()}
    if len(dims) != 1:
        raise OfflangError("model file weight lines disagree on dimension")
    return SvmModel(
        classes=classes,
        weights=np.vstack([weight_rows[cls] for cls in expected]),
        config=config,
        space_fingerprint=fingerprint,
    )


def read_model(path: str) -> SvmModel:
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            return parse_model(fh.read())
    except OSError as exc:
        raise OfflangError(f"cannot read model file {path}: {exc}") from exc


def class_score_map(
    model: SvmModel, X: sp.csr_matrix
) -> Mapping[str, np.ndarray]:
    """Per-class decision-value columns, keyed by class label."""
    scores = model.class_scores(X)
    return {cls: scores[:, i] for i, cls in enumerate(model.classes)}
