"""K nearest neighbours with the plain Euclidean distance.

The training set is memorized.  Neighbour order is (distance, stored row
index) ascending, so equal distances resolve to the earlier stored row.  A
tied vote drops the farthest neighbour and revotes, down to k = 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..data import DesignMatrix
from ..errors import EmptyInput, WidthMismatch


@dataclass
class KnnModel:
    kind: str = field(default="knn", init=False)
    k: int
    stored_rows: np.ndarray
    stored_labels: list[str]
    label_dictionary: list[str]
    feature_width: int

    def predict(self, rows: np.ndarray) -> list[str]:
        return predict_knn(self, rows)


def knn_distance(x, y) -> float:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise WidthMismatch(f"vector lengths differ: {x.shape} vs {y.shape}")
    return float(np.sqrt(np.square(x - y).sum()))


def fit_knn(data: DesignMatrix, k: int = 5) -> KnnModel:
    if data.n_rows == 0:
        raise EmptyInput("cannot fit KNN on zero rows")
    if not 1 <= k <= data.n_rows:
        raise ValueError(f"k must be in [1, {data.n_rows}], got {k}")
    return KnnModel(
        k=k,
        stored_rows=data.rows.copy(),
        stored_labels=list(data.labels),
        label_dictionary=data.label_dictionary,
        feature_width=data.width,
    )


def _vote(codes: np.ndarray, n_classes: int) -> int | None:
    """Winning code of a plurality vote, or None when tied."""
    counts = np.bincount(codes, minlength=n_classes)
    top = counts.max()
    if (counts == top).sum() == 1:
        return int(counts.argmax())
    return None


def _pairwise_sq_dists(queries: np.ndarray, stored: np.ndarray) -> np.ndarray:
    if queries.shape[1] <= 32:
        out = np.empty((queries.shape[0], stored.shape[0]), dtype=np.float64)
        for i, q in enumerate(queries):
            out[i] = np.square(stored - q).sum(axis=1)
        return out
    # wide rows: expand (a-b)^2 so BLAS does the heavy lifting
    qq = np.square(queries).sum(axis=1)[:, None]
    ss = np.square(stored).sum(axis=1)[None, :]
    return np.maximum(qq + ss - 2.0 * (queries @ stored.T), 0.0)


def predict_knn(model: KnnModel, rows: np.ndarray) -> list[str]:
    rows = np.asarray(rows, dtype=np.float64)
    if rows.ndim != 2 or rows.shape[1] != model.feature_width:
        raise WidthMismatch(
            f"expected rows of width {model.feature_width}, got {rows.shape}"
        )
    dictionary = model.label_dictionary
    code = {label: i for i, label in enumerate(dictionary)}
    stored_codes = np.array([code[label] for label in model.stored_labels], dtype=np.int64)

    d2 = _pairwise_sq_dists(rows, model.stored_rows)
    order = np.argsort(d2, axis=1, kind="stable")  # equal distances: lower index first
    out = []
    for q in range(rows.shape[0]):
        neighbours = stored_codes[order[q, : model.k]]
        winner = None
        for j in range(neighbours.size, 0, -1):
            winner = _vote(neighbours[:j], len(dictionary))
            if winner is not None:
                break
        out.append(dictionary[winner])
    return out
