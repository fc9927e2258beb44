"""The four base classifiers plus the voting ensemble, behind one
fit/predict contract: every model exposes .kind, .label_dictionary,
.feature_width and .predict(rows) -> list of labels."""

from __future__ import annotations

from ..data import DesignMatrix
from .ensemble import EnsembleModel, assemble_ensemble, fit_ensemble, predict_ensemble, vote
from .forest import ForestModel, TreeNode, fit_forest, predict_forest
from .knn import KnnModel, fit_knn, knn_distance, predict_knn
from .mlp import MlpModel, fit_mlp, loss_and_grads, predict_mlp
from .scaling import StandardScaler
from .svm import SvmModel, fit_svm, predict_svm

CLASSIFIER_KINDS = ("forest", "knn", "svm", "mlp", "ensemble")

_FITTERS = {
    "forest": lambda data, seed, **kw: fit_forest(data, seed=seed, **kw),
    "knn": lambda data, seed, **kw: fit_knn(data, **kw),
    "svm": lambda data, seed, **kw: fit_svm(data, seed=seed, **kw),
    "mlp": lambda data, seed, **kw: fit_mlp(data, seed=seed, **kw),
    "ensemble": lambda data, seed, **kw: fit_ensemble(data, seed=seed, **kw),
}


def fit_classifier(kind: str, data: DesignMatrix, seed: int = 0, **params):
    if kind not in _FITTERS:
        raise ValueError(f"unknown classifier kind {kind!r}; expected one of {CLASSIFIER_KINDS}")
    return _FITTERS[kind](data, seed, **params)


__all__ = [
    "CLASSIFIER_KINDS",
    "EnsembleModel",
    "ForestModel",
    "KnnModel",
    "MlpModel",
    "StandardScaler",
    "SvmModel",
    "TreeNode",
    "assemble_ensemble",
    "fit_classifier",
    "fit_ensemble",
    "fit_forest",
    "fit_knn",
    "fit_mlp",
    "fit_svm",
    "knn_distance",
    "loss_and_grads",
    "predict_ensemble",
    "predict_forest",
    "predict_knn",
    "predict_mlp",
    "predict_svm",
    "vote",
]
