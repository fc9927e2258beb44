"""Confusion matrices, accuracy/precision/recall/F1, and the two experiment
protocols (k-fold cross validation and a single train/test split) run over any
of the classifiers.

Metric conventions: accuracy = correct / total; per-class precision
TP/(TP+FP), recall TP/(TP+FN), F1 = 2PR/(P+R); the headline precision,
recall and F1 are unweighted (macro) means over classes.  Division by zero
yields 0 for that component and flags the report.  Cross-validation reports
the mean of per-fold metrics as its headline numbers and additionally the
metrics of the element-wise summed ("pooled") confusion matrix.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .classifiers import CLASSIFIER_KINDS, fit_classifier, vote
from .data import DesignMatrix, design_matrix_digest, kfold_partition, train_test_split
from .errors import EmptyInput, EmptyMatrix, LengthMismatch, ProtocolMismatch

REPORT_FORMAT_VERSION = 1

DISPLAY_NAMES = {
    "forest": "Random Forest",
    "knn": "K Nearest Neighbours",
    "svm": "Support Vector Machine",
    "mlp": "Neural Network",
    "ensemble": "Ensemble Classifier",
}

_ENSEMBLE_MEMBERS = ("forest", "knn", "svm", "mlp")


@dataclass(frozen=True)
class ConfusionMatrix:
    """counts[i][j] = rows with actual label i predicted as label j,
    with labels in fixed sorted order."""

    labels: tuple[str, ...]
    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        c = len(self.labels)
        if counts.shape != (c, c):
            raise ValueError(f"counts must be {c}x{c}")
        if (counts < 0).any():
            raise ValueError("counts must be nonnegative")
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "counts", counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        if self.labels != other.labels:
            raise ValueError("cannot add matrices over different labels")
        return ConfusionMatrix(self.labels, self.counts + other.counts)


@dataclass(frozen=True)
class MetricsReport:
    accuracy: float
    precision_macro: float
    recall_macro: float
    f1_macro: float
    per_class: dict
    zero_division: bool = False

    def as_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "precision_macro": self.precision_macro,
            "recall_macro": self.recall_macro,
            "f1_macro": self.f1_macro,
            "per_class": self.per_class,
            "zero_division": self.zero_division,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MetricsReport":
        return cls(
            accuracy=d["accuracy"],
            precision_macro=d["precision_macro"],
            recall_macro=d["recall_macro"],
            f1_macro=d["f1_macro"],
            per_class=d["per_class"],
            zero_division=d["zero_division"],
        )


@dataclass(frozen=True)
class ClassifierResult:
    kind: str
    confusion: ConfusionMatrix
    summary: MetricsReport
    pooled: MetricsReport | None = None  # metrics of the summed CV matrix
    folds: tuple[MetricsReport, ...] | None = None


@dataclass(frozen=True)
class ExperimentResult:
    protocol: dict  # {"kind": "cv", "k", "seed"} or {"kind": "split", "test_fraction", "seed"}
    dataset: dict  # n_rows, feature_width, labels, digest
    classifiers: dict = field(default_factory=dict)  # kind -> ClassifierResult


def confusion(actual, predicted, labels=None) -> ConfusionMatrix:
    actual = list(actual)
    predicted = list(predicted)
    if len(actual) != len(predicted):
        raise LengthMismatch(f"{len(actual)} actual vs {len(predicted)} predicted")
    if not actual:
        raise EmptyInput("no predictions to count")
    if labels is None:
        labels = sorted(set(actual) | set(predicted))
    labels = tuple(labels)
    index = {label: i for i, label in enumerate(labels)}
    counts = np.zeros((len(labels), len(labels)), dtype=np.int64)
    for a, p in zip(actual, predicted):
        counts[index[a], index[p]] += 1
    return ConfusionMatrix(labels=labels, counts=counts)


def metrics(cm: ConfusionMatrix) -> MetricsReport:
    if cm.total == 0:
        raise EmptyMatrix("confusion matrix has zero total")
    counts = cm.counts.astype(np.float64)
    total = counts.sum()
    accuracy = float(np.trace(counts) / total)

    zero_division = False
    per_class = {}
    for i, label in enumerate(cm.labels):
        tp = counts[i, i]
        fp = counts[:, i].sum() - tp
        fn = counts[i, :].sum() - tp
        if tp + fp > 0:
            precision = float(tp / (tp + fp))
        else:
            precision, zero_division = 0.0, True
        if tp + fn > 0:
            recall = float(tp / (tp + fn))
        else:
            recall, zero_division = 0.0, True
        if precision + recall > 0:
            f1 = 2.0 * precision * recall / (precision + recall)
        else:
            f1, zero_division = 0.0, True
        per_class[label] = {"precision": precision, "recall": recall, "f1": f1}

    n = len(cm.labels)
    return MetricsReport(
        accuracy=accuracy,
        precision_macro=sum(v["precision"] for v in per_class.values()) / n,
        recall_macro=sum(v["recall"] for v in per_class.values()) / n,
        f1_macro=sum(v["f1"] for v in per_class.values()) / n,
        per_class=per_class,
        zero_division=zero_division,
    )


def _mean_reports(reports) -> MetricsReport:
    reports = list(reports)
    n = len(reports)
    labels = reports[0].per_class.keys()
    per_class = {
        label: {
            key: sum(r.per_class[label][key] for r in reports) / n
            for key in ("precision", "recall", "f1")
        }
        for label in labels
    }
    return MetricsReport(
        accuracy=sum(r.accuracy for r in reports) / n,
        precision_macro=sum(r.precision_macro for r in reports) / n,
        recall_macro=sum(r.recall_macro for r in reports) / n,
        f1_macro=sum(r.f1_macro for r in reports) / n,
        per_class=per_class,
        zero_division=any(r.zero_division for r in reports),
    )


def _normalize_kinds(classifier_spec) -> list[tuple[str, dict]]:
    if isinstance(classifier_spec, str):
        classifier_spec = [classifier_spec]
    kinds = []
    for entry in classifier_spec:
        if isinstance(entry, str):
            kinds.append((entry, {}))
        else:
            kind, params = entry
            kinds.append((kind, dict(params)))
    for kind, _ in kinds:
        if kind not in CLASSIFIER_KINDS:
            raise ValueError(f"unknown classifier kind {kind!r}")
    return kinds


def _predict_all(train: DesignMatrix, test_rows, kinds, seed: int) -> dict:
    """Fit every requested kind on the training part and predict the test rows.

    The ensemble reuses the four base fits (identical models by seeding), so
    requesting all five kinds does not train anything twice.
    """
    requested = dict(kinds)
    base_needed = set(requested) - {"ensemble"}
    if "ensemble" in requested:
        base_needed.update(_ENSEMBLE_MEMBERS)

    predictions = {}
    for kind in sorted(base_needed):
        params = requested.get(kind, {})
        model = fit_classifier(kind, train, seed=seed, **params)
        predictions[kind] = model.predict(test_rows)

    out = {kind: predictions[kind] for kind in requested if kind != "ensemble"}
    if "ensemble" in requested:
        member_votes = {kind: predictions[kind] for kind in _ENSEMBLE_MEMBERS}
        out["ensemble"] = vote(member_votes)
    return out


def _dataset_info(dm: DesignMatrix) -> dict:
    return {
        "n_rows": dm.n_rows,
        "feature_width": dm.width,
        "labels": dm.label_dictionary,
        "digest": design_matrix_digest(dm),
    }


def run_cross_validation(dm: DesignMatrix, k: int, classifier_spec, seed: int) -> ExperimentResult:
    """Each fold serves once as the test part; metrics are averaged over the
    k runs and the fold confusion matrices are also summed."""
    kinds = _normalize_kinds(classifier_spec)
    plan = kfold_partition(dm.n_rows, k, seed)
    labels = tuple(dm.label_dictionary)

    fold_matrices = {kind: [] for kind, _ in kinds}
    fold_reports = {kind: [] for kind, _ in kinds}
    for fold in range(k):
        train_idx, test_idx = plan.fold_indices(fold)
        train = dm.subset(train_idx)
        test = dm.subset(test_idx)
        predictions = _predict_all(train, test.rows, kinds, seed)
        for kind, predicted in predictions.items():
            cm = confusion(test.labels, predicted, labels=labels)
            fold_matrices[kind].append(cm)
            fold_reports[kind].append(metrics(cm))

    classifiers = {}
    for kind, _ in kinds:
        pooled_cm = fold_matrices[kind][0]
        for cm in fold_matrices[kind][1:]:
            pooled_cm = pooled_cm + cm
        classifiers[kind] = ClassifierResult(
            kind=kind,
            confusion=pooled_cm,
            summary=_mean_reports(fold_reports[kind]),
            pooled=metrics(pooled_cm),
            folds=tuple(fold_reports[kind]),
        )
    return ExperimentResult(
        protocol={"kind": "cv", "k": k, "seed": seed},
        dataset=_dataset_info(dm),
        classifiers=classifiers,
    )


def run_train_test_split(dm: DesignMatrix, test_fraction: float, classifier_spec, seed: int) -> ExperimentResult:
    kinds = _normalize_kinds(classifier_spec)
    train, test = train_test_split(dm, test_fraction, seed)
    labels = tuple(dm.label_dictionary)
    predictions = _predict_all(train, test.rows, kinds, seed)
    classifiers = {}
    for kind, predicted in predictions.items():
        cm = confusion(test.labels, predicted, labels=labels)
        classifiers[kind] = ClassifierResult(kind=kind, confusion=cm, summary=metrics(cm))
    return ExperimentResult(
        protocol={"kind": "split", "test_fraction": test_fraction, "seed": seed},
        dataset=_dataset_info(dm),
        classifiers=classifiers,
    )


@dataclass(frozen=True)
class ComparisonRow:
    kind: str
    accuracy_a: float
    accuracy_b: float

    @property
    def delta_pp(self) -> float:
        """Accuracy difference a - b in percentage points."""
        return (self.accuracy_a - self.accuracy_b) * 100.0


@dataclass(frozen=True)
class ComparisonResult:
    protocol_kind: str
    rows: tuple[ComparisonRow, ...]

    def as_dict(self) -> dict:
        return {
            "kind": "comparison",
            "protocol_kind": self.protocol_kind,
            "rows": [
                {
                    "classifier": r.kind,
                    "accuracy_a": r.accuracy_a,
                    "accuracy_b": r.accuracy_b,
                    "delta_pp": r.delta_pp,
                }
                for r in self.rows
            ],
        }


def compare_datasets(a: ExperimentResult, b: ExperimentResult) -> ComparisonResult:
    """Side-by-side accuracy for two runs of the same protocol and classifier
    set (typically on two different datasets)."""
    pa = {key: value for key, value in a.protocol.items() if key != "seed"}
    pb = {key: value for key, value in b.protocol.items() if key != "seed"}
    if pa != pb:
        raise ProtocolMismatch(f"protocols differ: {a.protocol} vs {b.protocol}")
    if set(a.classifiers) != set(b.classifiers):
        raise ProtocolMismatch(
            f"classifier sets differ: {sorted(a.classifiers)} vs {sorted(b.classifiers)}"
        )
    rows = tuple(
        ComparisonRow(
            kind=kind,
            accuracy_a=a.classifiers[kind].summary.accuracy,
            accuracy_b=b.classifiers[kind].summary.accuracy,
        )
        for kind in sorted(a.classifiers)
    )
    return ComparisonResult(protocol_kind=a.protocol["kind"], rows=rows)


# --- report (de)serialization -------------------------------------------------

def _classifier_to_dict(res: ClassifierResult) -> dict:
    return {
        "labels": list(res.confusion.labels),
        "confusion": res.confusion.counts.tolist(),
        "summary": res.summary.as_dict(),
        "pooled": res.pooled.as_dict() if res.pooled else None,
        "folds": [f.as_dict() for f in res.folds] if res.folds else None,
    }


def result_to_dict(result: ExperimentResult) -> dict:
    return {
        "format_version": REPORT_FORMAT_VERSION,
        "kind": "experiment_result",
        "protocol": result.protocol,
        "dataset": result.dataset,
        "classifiers": {k: _classifier_to_dict(v) for k, v in result.classifiers.items()},
    }


def result_from_dict(d: dict) -> ExperimentResult:
    classifiers = {}
    for kind, c in d["classifiers"].items():
        labels = tuple(c["labels"])
        folds = c.get("folds")
        pooled = c.get("pooled")
        classifiers[kind] = ClassifierResult(
            kind=kind,
            confusion=ConfusionMatrix(labels=labels, counts=np.array(c["confusion"])),
            summary=MetricsReport.from_dict(c["summary"]),
            pooled=MetricsReport.from_dict(pooled) if pooled else None,
            folds=tuple(MetricsReport.from_dict(f) for f in folds) if folds else None,
        )
    return ExperimentResult(
        protocol=d["protocol"], dataset=d["dataset"], classifiers=classifiers
    )


def dump_report(obj: dict) -> str:
    """Canonical report text: stable key order, so equal reports are equal bytes."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def save_report(result: ExperimentResult, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_report(result_to_dict(result)), encoding="utf-8")
    return path


def load_report(path) -> ExperimentResult:
    return result_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


# --- text rendering ------------------------------------------------------------

def format_metrics_table(result: ExperimentResult) -> str:
    """Fixed-width per-classifier table; accuracy as a percentage, the other
    metrics to two decimals."""
    header = f"{'Algorithm':<24}{'Accuracy':>10}{'Precision':>11}{'Recall':>8}{'F1-score':>10}"
    lines = [header, "-" * len(header)]
    for kind in sorted(result.classifiers, key=_table_order):
        s = result.classifiers[kind].summary
        name = DISPLAY_NAMES.get(kind, kind)
        lines.append(
            f"{name:<24}{s.accuracy * 100:>8.2f} %{s.precision_macro:>11.2f}"
            f"{s.recall_macro:>8.2f}{s.f1_macro:>10.2f}"
        )
    return "\n".join(lines) + "\n"


def format_comparison_table(cmp: ComparisonResult) -> str:
    header = f"{'Algorithm':<24}{'Accuracy A':>12}{'Accuracy B':>12}{'Delta':>9}"
    lines = [header, "-" * len(header)]
    for row in sorted(cmp.rows, key=lambda r: _table_order(r.kind)):
        name = DISPLAY_NAMES.get(row.kind, row.kind)
        lines.append(
            f"{name:<24}{row.accuracy_a * 100:>10.2f} %{row.accuracy_b * 100:>10.2f} %"
            f"{row.delta_pp:>+9.2f}"
        )
    return "\n".join(lines) + "\n"


def _table_order(kind: str) -> int:
    order = {"forest": 0, "knn": 1, "svm": 2, "mlp": 3, "ensemble": 4}
    return order.get(kind, 99)
