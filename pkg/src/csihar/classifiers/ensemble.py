"""Majority-vote ensemble over the four base classifiers.

Each member contributes one vote per row.  A tied vote follows the member
priority order forest > mlp > knn > svm: the first member whose prediction is
among the tied leaders decides.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from ..data import DesignMatrix
from .forest import ForestModel, fit_forest
from .knn import KnnModel, fit_knn
from .mlp import MlpModel, fit_mlp
from .svm import SvmModel, fit_svm

TIE_BREAK_ORDER = ("forest", "mlp", "knn", "svm")


@dataclass
class EnsembleModel:
    kind: str = field(default="ensemble", init=False)
    members: dict  # kind -> trained model, exactly the four base kinds
    tie_break_order: tuple[str, ...] = TIE_BREAK_ORDER

    def __post_init__(self):
        if set(self.members) != set(TIE_BREAK_ORDER):
            raise ValueError(f"ensemble needs exactly the members {TIE_BREAK_ORDER}")

    @property
    def label_dictionary(self) -> list[str]:
        return self.members["forest"].label_dictionary

    @property
    def feature_width(self) -> int:
        return self.members["forest"].feature_width

    def predict(self, rows: np.ndarray) -> list[str]:
        return predict_ensemble(self, rows)


def fit_ensemble(
    data: DesignMatrix,
    seed: int = 0,
    forest_params: dict | None = None,
    knn_params: dict | None = None,
    svm_params: dict | None = None,
    mlp_params: dict | None = None,
) -> EnsembleModel:
    members = {
        "forest": fit_forest(data, seed=seed, **(forest_params or {})),
        "knn": fit_knn(data, **(knn_params or {})),
        "svm": fit_svm(data, seed=seed, **(svm_params or {})),
        "mlp": fit_mlp(data, seed=seed, **(mlp_params or {})),
    }
    return EnsembleModel(members=members)


def assemble_ensemble(
    forest: ForestModel, knn: KnnModel, svm: SvmModel, mlp: MlpModel
) -> EnsembleModel:
    """Bundle already-trained members (must share one training schema)."""
    return EnsembleModel(members={"forest": forest, "knn": knn, "svm": svm, "mlp": mlp})


def vote(member_predictions: dict, tie_break_order=TIE_BREAK_ORDER) -> list[str]:
    """Row-wise plurality over per-member label lists."""
    kinds = list(member_predictions)
    n = len(member_predictions[kinds[0]])
    out = []
    for i in range(n):
        row_votes = {kind: member_predictions[kind][i] for kind in kinds}
        tally = Counter(row_votes.values())
        top = max(tally.values())
        leaders = {label for label, c in tally.items() if c == top}
        if len(leaders) == 1:
            out.append(next(iter(leaders)))
            continue
        for kind in tie_break_order:
            if kind in row_votes and row_votes[kind] in leaders:
                out.append(row_votes[kind])
                break
    return out


def predict_ensemble(model: EnsembleModel, rows: np.ndarray) -> list[str]:
    predictions = {kind: member.predict(rows) for kind, member in model.members.items()}
    return vote(predictions, model.tie_break_order)
