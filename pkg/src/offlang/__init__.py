"""Offensive-language classification toolkit.

Character n-gram features ranked by information gain feed a linear SVM
with squared-hinge loss; one-vs-rest handles the three-class target task.
The `offlang` command wires the pieces into reproducible runs.
"""

from .config import RunConfig
from .corpus import CLASS_ORDER, Corpus, Instance, parse_olid, read_predictions, write_predictions
from .errors import OfflangError
from .features import AuxFeatures, FeatureConfig, SparseVector, assemble, char_ngrams, normalize
from .metrics import ConfusionMatrix, EvalReport, constant_baseline, evaluate, permute_labels
from .selection import FeatureSpace, IgScore, information_gain, rank_ngrams, select_top_k
from .svm import SvmConfig, SvmModel, predict, train_binary, train_ovr

__version__ = "0.1.0"

__all__ = [
    "AuxFeatures",
    "CLASS_ORDER",
    "ConfusionMatrix",
    "Corpus",
    "EvalReport",
    "FeatureConfig",
    "FeatureSpace",
    "IgScore",
    "Instance",
    "OfflangError",
    "RunConfig",
    "SparseVector",
    "SvmConfig",
    "SvmModel",
    "assemble",
    "char_ngrams",
    "constant_baseline",
    "evaluate",
    "information_gain",
    "normalize",
    "parse_olid",
    "permute_labels",
    "predict",
    "rank_ngrams",
    "read_predictions",
    "select_top_k",
    "train_binary",
    "train_ovr",
    "write_predictions",
    "__version__",
]
