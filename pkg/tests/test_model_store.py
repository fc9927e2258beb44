import json

import numpy as np
import pytest

from csihar.classifiers import fit_classifier
from csihar.data import design_matrix_digest
from csihar.errors import CorruptModel, IoFailure, VersionMismatch
from csihar.model_store import load_model, save_model

FAST_PARAMS = {
    "forest": {"n_trees": 4},
    "knn": {"k": 3},
    "svm": {"epochs": 20},
    "mlp": {"hidden_size": 6, "epochs": 15},
    "ensemble": {
        "forest_params": {"n_trees": 4},
        "mlp_params": {"hidden_size": 6, "epochs": 15},
        "svm_params": {"epochs": 20},
    },
}


@pytest.mark.parametrize("kind", ["forest", "knn", "svm", "mlp", "ensemble"])
def test_round_trip_prediction_equivalence(kind, tiny_matrix, tmp_path):
    model = fit_classifier(kind, tiny_matrix, seed=2, **FAST_PARAMS[kind])
    path = save_model(model, tmp_path / f"m.csimodel", training=tiny_matrix)
    loaded = load_model(path)
    assert loaded.kind == kind
    assert loaded.feature_width == tiny_matrix.width
    queries = np.random.default_rng(0).normal(
        loc=1.0, scale=0.5, size=(20, tiny_matrix.width)
    )
    assert loaded.model.predict(queries) == model.predict(queries)
    assert loaded.model.predict(tiny_matrix.rows) == model.predict(tiny_matrix.rows)


def test_deterministic_bytes_except_created_at(tiny_matrix, tmp_path):
    model = fit_classifier("knn", tiny_matrix, seed=0, k=3)
    p1 = save_model(model, tmp_path / "a.csimodel")
    p2 = save_model(model, tmp_path / "b.csimodel")
    d1, d2 = json.loads(p1.read_text()), json.loads(p2.read_text())
    d1.pop("created_at"), d2.pop("created_at")
    assert d1 == d2


def test_fingerprint_recorded(tiny_matrix, tmp_path):
    model = fit_classifier("svm", tiny_matrix, seed=0, epochs=5)
    path = save_model(model, tmp_path / "m.csimodel", training=tiny_matrix)
    assert load_model(path).training_fingerprint == design_matrix_digest(tiny_matrix)


def test_truncated_file(tiny_matrix, tmp_path):
    model = fit_classifier("knn", tiny_matrix, seed=0, k=1)
    path = save_model(model, tmp_path / "m.csimodel")
    path.write_bytes(path.read_bytes()[: 200])
    with pytest.raises(CorruptModel):
        load_model(path)


def test_version_mismatch(tiny_matrix, tmp_path):
    model = fit_classifier("knn", tiny_matrix, seed=0, k=1)
    path = save_model(model, tmp_path / "m.csimodel")
    envelope = json.loads(path.read_text())
    envelope["format_version"] = 999
    path.write_text(json.dumps(envelope))
    with pytest.raises(VersionMismatch):
        load_model(path)


def test_missing_payload_key(tiny_matrix, tmp_path):
    model = fit_classifier("knn", tiny_matrix, seed=0, k=1)
    path = save_model(model, tmp_path / "m.csimodel")
    envelope = json.loads(path.read_text())
    del envelope["payload"]["rows"]
    path.write_text(json.dumps(envelope))
    with pytest.raises(CorruptModel):
        load_model(path)


def test_ensemble_envelope_has_four_members(tiny_matrix, tmp_path):
    model = fit_classifier("ensemble", tiny_matrix, seed=1, **FAST_PARAMS["ensemble"])
    path = save_model(model, tmp_path / "m.csimodel")
    envelope = json.loads(path.read_text())
    assert sorted(envelope["payload"]["members"]) == ["forest", "knn", "mlp", "svm"]


def test_write_to_missing_directory(tiny_matrix, tmp_path):
    model = fit_classifier("knn", tiny_matrix, seed=0, k=1)
    with pytest.raises(IoFailure):
        save_model(model, tmp_path / "nope" / "m.csimodel")
