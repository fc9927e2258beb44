"""Linear SVM trained by seeded stochastic sub-gradient descent.

Hinge loss with an L2 penalty on standardized features.  The decision rule is
score = w . u + b: strictly positive scores take the positive class (the
lexicographically first label, i.e. sitting for activity data), anything else
the negative class.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..data import DesignMatrix
from ..errors import NotBinary, WidthMismatch
from .scaling import StandardScaler


@dataclass
class SvmModel:
    kind: str = field(default="svm", init=False)
    w: np.ndarray
    b: float
    scaler: StandardScaler
    learning_rate: float
    regularization: float
    epochs: int
    batch_size: int
    seed: int
    label_dictionary: list[str]  # [positive (+1), negative (-1)]
    feature_width: int

    def decision_scores(self, rows: np.ndarray) -> np.ndarray:
        rows = np.asarray(rows, dtype=np.float64)
        if rows.ndim != 2 or rows.shape[1] != self.feature_width:
            raise WidthMismatch(
                f"expected rows of width {self.feature_width}, got {rows.shape}"
            )
        return self.scaler.transform(rows) @ self.w + self.b

    def predict(self, rows: np.ndarray) -> list[str]:
        return predict_svm(self, rows)


def fit_svm(
    data: DesignMatrix,
    regularization: float = 1e-4,
    learning_rate: float = 1e-3,
    epochs: int = 200,
    batch_size: int = 32,
    seed: int = 0,
) -> SvmModel:
    dictionary = data.label_dictionary
    if len(dictionary) != 2:
        raise NotBinary(f"SVM needs exactly 2 classes, got {len(dictionary)}")
    scaler = StandardScaler.fit(data.rows)
    X = scaler.transform(data.rows)
    # first label in the dictionary maps to +1, second to -1
    y = np.array([1.0 if label == dictionary[0] else -1.0 for label in data.labels])

    n, d = X.shape
    w = np.zeros(d, dtype=np.float64)
    b = 0.0
    rng = np.random.default_rng(seed)
    for _ in range(epochs):
        perm = rng.permutation(n)
        for start in range(0, n, batch_size):
            batch = perm[start : start + batch_size]
            Xb, yb = X[batch], y[batch]
            margins = yb * (Xb @ w + b)
            violating = margins < 1.0
            grad_w = 2.0 * regularization * w
            grad_b = 0.0
            if violating.any():
                grad_w = grad_w - (yb[violating] @ Xb[violating]) / batch.size
                grad_b = -yb[violating].sum() / batch.size
            w -= learning_rate * grad_w
            b -= learning_rate * grad_b

    return SvmModel(
        w=w,
        b=float(b),
        scaler=scaler,
        learning_rate=learning_rate,
        regularization=regularization,
        epochs=epochs,
        batch_size=batch_size,
        seed=seed,
        label_dictionary=dictionary,
        feature_width=d,
    )


def predict_svm(model: SvmModel, rows: np.ndarray) -> list[str]:
    scores = model.decision_scores(rows)
    positive, negative = model.label_dictionary
    return [positive if s > 0 else negative for s in scores]
