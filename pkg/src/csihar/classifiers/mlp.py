"""One-hidden-layer perceptron: relu hidden units, softmax output,
cross-entropy loss, seeded mini-batch gradient descent.

Each unit computes f(bias + sum_i x_i * w_i).  Weights start uniform in
(-r, r) with r = sqrt(6 / (fan_in + fan_out)); biases start at zero.
Training stops early once the epoch loss stops improving by more than
`tol` for `patience` consecutive epochs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..data import DesignMatrix
from ..errors import EmptyInput, WidthMismatch
from .scaling import StandardScaler


@dataclass
class MlpModel:
    kind: str = field(default="mlp", init=False)
    w1: np.ndarray  # (features, hidden)
    b1: np.ndarray  # (hidden,)
    w2: np.ndarray  # (hidden, classes)
    b2: np.ndarray  # (classes,)
    scaler: StandardScaler
    hidden_size: int
    learning_rate: float
    epochs: int
    batch_size: int
    seed: int
    label_dictionary: list[str]
    feature_width: int

    def predict(self, rows: np.ndarray) -> list[str]:
        return predict_mlp(self, rows)


def _relu(z: np.ndarray) -> np.ndarray:
    return np.maximum(z, 0.0)


def _softmax(z: np.ndarray) -> np.ndarray:
    shifted = z - z.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def _forward(X, w1, b1, w2, b2):
    hidden = _relu(X @ w1 + b1)
    probs = _softmax(hidden @ w2 + b2)
    return hidden, probs


def loss_and_grads(w1, b1, w2, b2, X, y_codes):
    """Mean cross-entropy over the batch and its analytic gradients."""
    n = X.shape[0]
    hidden, probs = _forward(X, w1, b1, w2, b2)
    loss = float(-np.log(np.clip(probs[np.arange(n), y_codes], 1e-30, None)).mean())

    delta = probs.copy()
    delta[np.arange(n), y_codes] -= 1.0
    delta /= n
    dw2 = hidden.T @ delta
    db2 = delta.sum(axis=0)
    dhidden = delta @ w2.T
    dhidden[hidden <= 0.0] = 0.0
    dw1 = X.T @ dhidden
    db1 = dhidden.sum(axis=0)
    return loss, dw1, db1, dw2, db2


def _glorot(rng, fan_in, fan_out):
    r = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-r, r, size=(fan_in, fan_out))


def fit_mlp(
    data: DesignMatrix,
    hidden_size: int = 100,
    learning_rate: float = 1e-3,
    epochs: int = 200,
    batch_size: int = 32,
    seed: int = 0,
    tol: float = 1e-4,
    patience: int = 10,
) -> MlpModel:
    if data.n_rows == 0:
        raise EmptyInput("cannot fit an MLP on zero rows")
    dictionary = data.label_dictionary
    if len(dictionary) < 2:
        raise ValueError("MLP needs at least 2 classes")
    code = {label: i for i, label in enumerate(dictionary)}
    y = np.array([code[label] for label in data.labels], dtype=np.int64)
    scaler = StandardScaler.fit(data.rows)
    # float32 throughout training and inference: the arithmetic is the
    # bottleneck of the whole evaluation harness
    X = scaler.transform(data.rows).astype(np.float32)

    n, d = X.shape
    n_classes = len(dictionary)
    rng = np.random.default_rng(seed)
    w1 = _glorot(rng, d, hidden_size).astype(np.float32)
    b1 = np.zeros(hidden_size, dtype=np.float32)
    w2 = _glorot(rng, hidden_size, n_classes).astype(np.float32)
    b2 = np.zeros(n_classes, dtype=np.float32)

    best_loss = np.inf
    stale = 0
    for _ in range(epochs):
        perm = rng.permutation(n)
        epoch_loss = 0.0
        for start in range(0, n, batch_size):
            batch = perm[start : start + batch_size]
            loss, dw1, db1, dw2, db2 = loss_and_grads(w1, b1, w2, b2, X[batch], y[batch])
            epoch_loss += loss * batch.size
            w1 -= learning_rate * dw1
            b1 -= learning_rate * db1
            w2 -= learning_rate * dw2
            b2 -= learning_rate * db2
        epoch_loss /= n
        if epoch_loss < best_loss - tol:
            best_loss = epoch_loss
            stale = 0
        else:
            stale += 1
            if stale >= patience:
                break

    return MlpModel(
        w1=w1,
        b1=b1,
        w2=w2,
        b2=b2,
        scaler=scaler,
        hidden_size=hidden_size,
        learning_rate=learning_rate,
        epochs=epochs,
        batch_size=batch_size,
        seed=seed,
        label_dictionary=dictionary,
        feature_width=d,
    )


def predict_mlp(model: MlpModel, rows: np.ndarray) -> list[str]:
    rows = np.asarray(rows, dtype=np.float64)
    if rows.ndim != 2 or rows.shape[1] != model.feature_width:
        raise WidthMismatch(
            f"expected rows of width {model.feature_width}, got {rows.shape}"
        )
    X = model.scaler.transform(rows).astype(model.w1.dtype)
    _, probs = _forward(X, model.w1, model.b1, model.w2, model.b2)
    return [model.label_dictionary[c] for c in probs.argmax(axis=1)]
