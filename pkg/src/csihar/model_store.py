"""Versioned persistence of trained models (.csimodel files).

Self-describing JSON container with an explicit format version so files stay
portable and rejectable.  Floats serialize as their shortest round-trip
decimal, keys are sorted, and the file is written atomically, so equal models
produce identical bytes except for the created_at stamp.  Forest trees are
stored as a flat node list with child indices (no nesting limits).
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .classifiers import (
    EnsembleModel,
    ForestModel,
    KnnModel,
    MlpModel,
    StandardScaler,
    SvmModel,
    TreeNode,
)
from .data import DesignMatrix, design_matrix_digest
from .errors import CorruptModel, IoFailure, VersionMismatch

FORMAT_VERSION = 1
MODEL_SUFFIX = ".csimodel"


@dataclass(frozen=True)
class ModelEnvelope:
    format_version: int
    kind: str
    schema: dict  # feature_width, label_dictionary, scaler (null for trees/knn)
    created_at: str
    training_fingerprint: str | None
    model: object  # the reconstructed classifier

    @property
    def feature_width(self) -> int:
        return self.schema["feature_width"]

    @property
    def label_dictionary(self) -> list[str]:
        return self.schema["label_dictionary"]


def _flatten_tree(root: TreeNode) -> list[dict]:
    nodes: list[dict] = []
    stack = [(root, None, None)]
    while stack:
        node, parent_idx, side = stack.pop()
        idx = len(nodes)
        entry = {
            "counts": node.class_counts.tolist(),
            "w": node.weighted_samples,
            "impurity": node.impurity,
        }
        if not node.is_leaf:
            entry["feature"] = node.feature_index
            entry["threshold"] = node.threshold
            entry["left"] = None
            entry["right"] = None
        nodes.append(entry)
        if parent_idx is not None:
            nodes[parent_idx][side] = idx
        if not node.is_leaf:
            stack.append((node.right, idx, "right"))
            stack.append((node.left, idx, "left"))
    return nodes


def _unflatten_tree(nodes: list[dict]) -> TreeNode:
    built = [
        TreeNode(
            class_counts=np.array(entry["counts"], dtype=np.int64),
            weighted_samples=entry["w"],
            impurity=entry["impurity"],
            feature_index=entry.get("feature"),
            threshold=entry.get("threshold", 0.0),
        )
        for entry in nodes
    ]
    for obj, entry in zip(built, nodes):
        if "feature" in entry:
            obj.left = built[entry["left"]]
            obj.right = built[entry["right"]]
    return built[0]


def _scaler_to_dict(scaler: StandardScaler | None):
    if scaler is None:
        return None
    return {"mean": scaler.mean.tolist(), "scale": scaler.scale.tolist()}


def _scaler_from_dict(d) -> StandardScaler | None:
    if d is None:
        return None
    return StandardScaler(mean=np.array(d["mean"]), scale=np.array(d["scale"]))


def _model_parts(model) -> tuple[dict, dict]:
    """(schema, payload) for one trained model."""
    schema = {
        "feature_width": model.feature_width,
        "label_dictionary": list(model.label_dictionary),
        "scaler": None,
    }
    if isinstance(model, ForestModel):
        payload = {
            "n_trees": model.n_trees,
            "max_depth": model.max_depth,
            "feature_subset_size": model.feature_subset_size,
            "seed": model.seed,
            "feature_importances": model.feature_importances.tolist(),
            "trees": [_flatten_tree(t) for t in model.trees],
        }
    elif isinstance(model, KnnModel):
        payload = {
            "k": model.k,
            "rows": model.stored_rows.tolist(),
            "labels": list(model.stored_labels),
        }
    elif isinstance(model, SvmModel):
        schema["scaler"] = _scaler_to_dict(model.scaler)
        payload = {
            "w": model.w.tolist(),
            "b": model.b,
            "learning_rate": model.learning_rate,
            "regularization": model.regularization,
            "epochs": model.epochs,
            "batch_size": model.batch_size,
            "seed": model.seed,
        }
    elif isinstance(model, MlpModel):
        schema["scaler"] = _scaler_to_dict(model.scaler)
        payload = {
            "dtype": str(model.w1.dtype),
            "w1": model.w1.tolist(),
            "b1": model.b1.tolist(),
            "w2": model.w2.tolist(),
            "b2": model.b2.tolist(),
            "hidden_size": model.hidden_size,
            "learning_rate": model.learning_rate,
            "epochs": model.epochs,
            "batch_size": model.batch_size,
            "seed": model.seed,
        }
    elif isinstance(model, EnsembleModel):
        payload = {
            "tie_break_order": list(model.tie_break_order),
            "members": {},
        }
        for kind, member in model.members.items():
            m_schema, m_payload = _model_parts(member)
            payload["members"][kind] = {"kind": kind, "schema": m_schema, "payload": m_payload}
    else:
        raise TypeError(f"cannot serialize model of type {type(model)!r}")
    return schema, payload


def _model_from_parts(kind: str, schema: dict, payload: dict):
    width = schema["feature_width"]
    dictionary = list(schema["label_dictionary"])
    if kind == "forest":
        return ForestModel(
            trees=[_unflatten_tree(t) for t in payload["trees"]],
            n_trees=payload["n_trees"],
            max_depth=payload["max_depth"],
            feature_subset_size=payload["feature_subset_size"],
            seed=payload["seed"],
            feature_importances=np.array(payload["feature_importances"]),
            label_dictionary=dictionary,
            feature_width=width,
        )
    if kind == "knn":
        return KnnModel(
            k=payload["k"],
            stored_rows=np.array(payload["rows"], dtype=np.float64),
            stored_labels=list(payload["labels"]),
            label_dictionary=dictionary,
            feature_width=width,
        )
    if kind == "svm":
        return SvmModel(
            w=np.array(payload["w"]),
            b=payload["b"],
            scaler=_scaler_from_dict(schema["scaler"]),
            learning_rate=payload["learning_rate"],
            regularization=payload["regularization"],
            epochs=payload["epochs"],
            batch_size=payload["batch_size"],
            seed=payload["seed"],
            label_dictionary=dictionary,
            feature_width=width,
        )
    if kind == "mlp":
        dtype = np.dtype(payload.get("dtype", "float64"))
        return MlpModel(
            w1=np.array(payload["w1"], dtype=dtype),
            b1=np.array(payload["b1"], dtype=dtype),
            w2=np.array(payload["w2"], dtype=dtype),
            b2=np.array(payload["b2"], dtype=dtype),
            scaler=_scaler_from_dict(schema["scaler"]),
            hidden_size=payload["hidden_size"],
            learning_rate=payload["learning_rate"],
            epochs=payload["epochs"],
            batch_size=payload["batch_size"],
            seed=payload["seed"],
            label_dictionary=dictionary,
            feature_width=width,
        )
    if kind == "ensemble":
        members = {}
        for member_kind, entry in payload["members"].items():
            members[member_kind] = _model_from_parts(
                entry["kind"], entry["schema"], entry["payload"]
            )
        return EnsembleModel(members=members, tie_break_order=tuple(payload["tie_break_order"]))
    raise CorruptModel(f"unknown model kind {kind!r}")


def save_model(model, path, training: DesignMatrix | None = None,
               training_digest: str | None = None) -> Path:
    """Write one model atomically.  Pass the training matrix (or its digest)
    to record the training fingerprint."""
    path = Path(path)
    if training is not None and training_digest is None:
        training_digest = design_matrix_digest(training)
    schema, payload = _model_parts(model)
    envelope = {
        "format_version": FORMAT_VERSION,
        "kind": model.kind,
        "schema": schema,
        "payload": payload,
        "created_at": datetime.now(timezone.utc).isoformat(),
        "training_fingerprint": training_digest,
    }
    text = json.dumps(envelope, sort_keys=True, indent=1) + "\n"
    try:
        fd, tmp_name = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp_name, path)
    except OSError as exc:
        raise IoFailure(f"cannot write model to {path}: {exc}") from exc
    return path


def load_model(path) -> ModelEnvelope:
    path = Path(path)
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot read model file {path}: {exc}") from exc
    try:
        envelope = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise CorruptModel(f"{path}: not valid model JSON: {exc}") from exc
    if not isinstance(envelope, dict) or "format_version" not in envelope:
        raise CorruptModel(f"{path}: missing format_version")
    if envelope["format_version"] != FORMAT_VERSION:
        raise VersionMismatch(
            f"{path}: format_version {envelope['format_version']} unsupported "
            f"(expected {FORMAT_VERSION})"
        )
    try:
        kind = envelope["kind"]
        schema = envelope["schema"]
        if schema["feature_width"] <= 0:
            raise ValueError("feature_width must be positive")
        model = _model_from_parts(kind, schema, envelope["payload"])
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise CorruptModel(f"{path}: malformed envelope: {exc}") from exc
    return ModelEnvelope(
        format_version=envelope["format_version"],
        kind=kind,
        schema=schema,
        created_at=envelope.get("created_at", ""),
        training_fingerprint=envelope.get("training_fingerprint"),
        model=model,
    )
