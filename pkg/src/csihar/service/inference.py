"""Serving-time inference: row-length reconciliation and the sample-level
verdict (plurality of the 64 per-row predictions)."""

from __future__ import annotations

from collections import Counter

import numpy as np

from ..data import CsiSample


def reconcile_width(rows: np.ndarray, width: int) -> np.ndarray:
    """Truncate rows longer than the model width, zero-pad shorter ones
    (the same imputation the training matrix uses)."""
    n, length = rows.shape
    if length == width:
        return rows
    if length > width:
        return rows[:, :width]
    out = np.zeros((n, width), dtype=np.float64)
    out[:, :length] = rows
    return out


def classify_sample(model, feature_width: int, sample: CsiSample) -> dict:
    rows = np.stack([t.amplitudes for t in sample.traces])
    rows = reconcile_width(rows, feature_width)
    row_labels = model.predict(rows)
    votes = Counter(row_labels)
    top = max(votes.values())
    label = min(lab for lab, c in votes.items() if c == top)  # stable tie rule
    return {
        "label": label,
        "per_row_votes": {lab: votes.get(lab, 0) for lab in sorted(model.label_dictionary)},
        "row_agreement": top / len(row_labels),
    }
