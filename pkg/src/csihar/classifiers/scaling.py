"""Per-feature standardization shared by the margin/gradient classifiers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class StandardScaler:
    mean: np.ndarray
    scale: np.ndarray  # std with zero-variance features clamped to 1

    @classmethod
    def fit(cls, X: np.ndarray) -> "StandardScaler":
        mean = X.mean(axis=0)
        scale = X.std(axis=0)
        scale = np.where(scale == 0.0, 1.0, scale)
        return cls(mean=mean, scale=scale)

    def transform(self, X: np.ndarray) -> np.ndarray:
        return (X - self.mean) / self.scale
