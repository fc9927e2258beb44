from fractions import Fraction

import numpy as np
import pytest

from csihar.data import DesignMatrix
from csihar.errors import EmptyInput, EmptyMatrix, LengthMismatch, ProtocolMismatch
from csihar.evaluation import (
    ClassifierResult,
    ComparisonResult,
    ConfusionMatrix,
    ExperimentResult,
    MetricsReport,
    compare_datasets,
    confusion,
    dump_report,
    format_comparison_table,
    format_metrics_table,
    load_report,
    metrics,
    result_from_dict,
    result_to_dict,
    run_cross_validation,
    run_train_test_split,
    save_report,
)

LABELS = ("sitting", "standing")


def cm(counts):
    return ConfusionMatrix(labels=LABELS, counts=np.array(counts))


class TestConfusion:
    def test_identity(self):
        out = confusion(["sitting", "standing"], ["sitting", "standing"])
        assert out.counts.tolist() == [[1, 0], [0, 1]]

    def test_single_miss(self):
        out = confusion(["sitting"], ["standing"])
        assert out.counts.tolist() == [[0, 1], [0, 0]]

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            confusion(["sitting"], ["sitting", "standing"])

    def test_empty(self):
        with pytest.raises(EmptyInput):
            confusion([], [])

    def test_fixed_label_order(self):
        out = confusion(["standing"], ["standing"], labels=LABELS)
        assert out.labels == LABELS
        assert out.counts.tolist() == [[0, 0], [0, 1]]


class TestMetrics:
    def test_cross_validation_reference_matrix(self):
        # 3840-row forest run: accuracy 92.47%, macro P/R/F1 0.93/0.92/0.92
        report = metrics(cm([[1821, 99], [190, 1730]]))
        assert abs(report.accuracy * 100 - 92.47) <= 0.005
        assert round(report.precision_macro, 2) == 0.93
        assert round(report.recall_macro, 2) == 0.92
        assert round(report.f1_macro, 2) == 0.92

    def test_split_reference_matrix(self):
        report = metrics(cm([[606, 34], [4, 508]]))
        assert abs(report.accuracy * 100 - 96.70) <= 0.005

    def test_perfect_classifier(self):
        report = metrics(cm([[7, 0], [0, 5]]))
        assert report.accuracy == 1.0
        assert report.precision_macro == 1.0
        assert report.recall_macro == 1.0
        assert report.f1_macro == 1.0

    def test_zero_division_flagged(self):
        # nothing ever predicted as standing
        report = metrics(cm([[5, 0], [3, 0]]))
        assert report.zero_division
        assert report.per_class["standing"]["precision"] == 0.0

    def test_empty_matrix(self):
        with pytest.raises(EmptyMatrix):
            metrics(cm([[0, 0], [0, 0]]))

    def test_exact_rational_accuracy(self):
        rng = np.random.default_rng(4)
        for _ in range(50):
            counts = rng.integers(0, 40, size=(2, 2))
            if counts.sum() == 0:
                continue
            report = metrics(cm(counts))
            want = Fraction(int(counts[0, 0] + counts[1, 1]), int(counts.sum()))
            assert report.accuracy == float(want)

    def test_f1_is_harmonic_mean(self):
        rng = np.random.default_rng(5)
        for _ in range(30):
            counts = rng.integers(1, 30, size=(2, 2))
            report = metrics(cm(counts))
            for label in LABELS:
                p = report.per_class[label]["precision"]
                r = report.per_class[label]["recall"]
                assert report.per_class[label]["f1"] == pytest.approx(2 * p * r / (p + r))

    def test_accuracy_equals_match_fraction(self):
        rng = np.random.default_rng(6)
        for _ in range(30):
            n = int(rng.integers(1, 60))
            actual = [LABELS[i] for i in rng.integers(0, 2, size=n)]
            predicted = [LABELS[i] for i in rng.integers(0, 2, size=n)]
            report = metrics(confusion(actual, predicted, labels=LABELS))
            want = sum(a == p for a, p in zip(actual, predicted)) / n
            assert report.accuracy == pytest.approx(want, abs=1e-12)

    def test_label_swap_symmetry(self):
        rng = np.random.default_rng(7)
        swap = {"sitting": "standing", "standing": "sitting"}
        for _ in range(20):
            n = int(rng.integers(2, 50))
            actual = [LABELS[i] for i in rng.integers(0, 2, size=n)]
            predicted = [LABELS[i] for i in rng.integers(0, 2, size=n)]
            base = confusion(actual, predicted, labels=LABELS)
            swapped = confusion(
                [swap[a] for a in actual], [swap[p] for p in predicted], labels=LABELS
            )
            assert swapped.counts.tolist() == base.counts[::-1, ::-1].tolist()
            m1, m2 = metrics(base), metrics(swapped)
            assert m1.accuracy == m2.accuracy
            assert m1.precision_macro == pytest.approx(m2.precision_macro)
            assert m1.recall_macro == pytest.approx(m2.recall_macro)
            assert m1.f1_macro == pytest.approx(m2.f1_macro)


def small_matrix(n=40, seed=0):
    rng = np.random.default_rng(seed)
    rows = rng.normal(size=(n, 3))
    labels = tuple("sitting" if r[0] > 0 else "standing" for r in rows)
    return DesignMatrix(labels=labels, rows=rows)


class TestProtocols:
    def test_constant_labels_all_folds_perfect(self):
        dm = DesignMatrix(labels=("sitting",) * 30, rows=np.arange(30.0).reshape(30, 1))
        result = run_cross_validation(dm, 5, [("forest", {"n_trees": 3})], seed=0)
        for fold in result.classifiers["forest"].folds:
            assert fold.accuracy == 1.0

    def test_fold_matrices_partition_rows(self):
        dm = small_matrix(50)
        result = run_cross_validation(dm, 5, "knn", seed=1)
        res = result.classifiers["knn"]
        assert res.confusion.total == 50
        assert len(res.folds) == 5
        assert res.summary.accuracy == pytest.approx(
            sum(f.accuracy for f in res.folds) / 5
        )

    def test_split_sizes(self):
        dm = small_matrix(40)
        result = run_train_test_split(dm, 0.3, [("knn", {"k": 1})], seed=3)
        assert result.classifiers["knn"].confusion.total == 12
        assert result.protocol == {"kind": "split", "test_fraction": 0.3, "seed": 3}

    def test_ensemble_shares_base_fits(self):
        dm = small_matrix(30, seed=2)
        kinds = [
            ("forest", {"n_trees": 3}),
            "knn",
            ("svm", {"epochs": 20}),
            ("mlp", {"hidden_size": 4, "epochs": 20}),
            "ensemble",
        ]
        result = run_train_test_split(dm, 0.3, kinds, seed=5)
        assert set(result.classifiers) == {"forest", "knn", "svm", "mlp", "ensemble"}

    def test_ensemble_params_flow_through(self):
        dm = small_matrix(24, seed=3)
        result = run_cross_validation(
            dm,
            3,
            [("ensemble", {"forest_params": {"n_trees": 3}, "mlp_params": {"epochs": 10}})],
            seed=2,
        )
        assert "ensemble" in result.classifiers


def fake_result(kind_acc: dict, protocol: dict) -> ExperimentResult:
    classifiers = {}
    for kind, acc in kind_acc.items():
        total = 10000
        correct = round(total * acc)
        counts = np.array([[correct // 2, (total - correct) // 2],
                           [total - correct - (total - correct) // 2, correct - correct // 2]])
        matrix = ConfusionMatrix(labels=LABELS, counts=counts)
        classifiers[kind] = ClassifierResult(
            kind=kind,
            confusion=matrix,
            summary=MetricsReport(
                accuracy=acc,
                precision_macro=acc,
                recall_macro=acc,
                f1_macro=acc,
                per_class={lab: {"precision": acc, "recall": acc, "f1": acc} for lab in LABELS},
            ),
        )
    return ExperimentResult(
        protocol=protocol,
        dataset={"n_rows": 10000, "feature_width": 4, "labels": list(LABELS), "digest": "x"},
        classifiers=classifiers,
    )


class TestCompare:
    def test_reference_delta(self):
        a = fake_result({"forest": 0.9247}, {"kind": "cv", "k": 10, "seed": 1})
        b = fake_result({"forest": 0.9120}, {"kind": "cv", "k": 10, "seed": 2})
        result = compare_datasets(a, b)
        assert result.rows[0].delta_pp == pytest.approx(1.27)
        assert "+1.27" in format_comparison_table(result)

    def test_identical_results_zero_delta(self):
        a = fake_result({"forest": 0.9, "knn": 0.8}, {"kind": "split", "test_fraction": 0.3, "seed": 1})
        result = compare_datasets(a, a)
        assert all(row.delta_pp == 0.0 for row in result.rows)

    def test_protocol_mismatch(self):
        a = fake_result({"forest": 0.9}, {"kind": "cv", "k": 10, "seed": 1})
        b = fake_result({"forest": 0.9}, {"kind": "split", "test_fraction": 0.3, "seed": 1})
        with pytest.raises(ProtocolMismatch):
            compare_datasets(a, b)

    def test_classifier_set_mismatch(self):
        a = fake_result({"forest": 0.9}, {"kind": "cv", "k": 10, "seed": 1})
        b = fake_result({"knn": 0.9}, {"kind": "cv", "k": 10, "seed": 1})
        with pytest.raises(ProtocolMismatch):
            compare_datasets(a, b)


class TestReports:
    def test_round_trip(self, tmp_path):
        dm = small_matrix(30)
        result = run_cross_validation(dm, 3, [("knn", {"k": 3})], seed=9)
        path = save_report(result, tmp_path / "r.json")
        loaded = load_report(path)
        assert result_to_dict(loaded) == result_to_dict(result)
        # canonical dump: reload produces identical bytes
        assert dump_report(result_to_dict(loaded)).encode() == path.read_bytes()

    def test_from_dict_round_trip(self):
        result = fake_result({"forest": 0.5}, {"kind": "cv", "k": 4, "seed": 0})
        again = result_from_dict(result_to_dict(result))
        assert result_to_dict(again) == result_to_dict(result)

    def test_table_formats_percent(self):
        result = fake_result({"forest": 0.9247}, {"kind": "cv", "k": 10, "seed": 1})
        table = format_metrics_table(result)
        assert "Random Forest" in table
        assert "92.47 %" in table


class TestBenchmarkPath:
    def test_multiclass_ingested_matrix_cross_validates(self, tmp_path):
        """External feature matrices with more than two classes run through
        the same harness (trees, knn, mlp generalize; svm stays binary)."""
        from csihar.data import ingest_feature_matrix

        rng = np.random.default_rng(21)
        centers = {"lay": (0, 6), "sit": (6, 0), "stand": (-6, 0), "walk": (0, -6)}
        rows, labels = [], []
        for label, c in centers.items():
            rows.append(rng.normal(loc=c, scale=0.5, size=(12, 2)))
            labels.extend([label] * 12)
        data = tmp_path / "X.txt"
        data.write_text("\n".join(" ".join(str(float(v)) for v in r) for r in np.vstack(rows)))
        (tmp_path / "y.txt").write_text("\n".join(labels))
        dm = ingest_feature_matrix(data, tmp_path / "y.txt")
        assert dm.label_dictionary == ["lay", "sit", "stand", "walk"]

        result = run_cross_validation(
            dm,
            4,
            [("forest", {"n_trees": 10}), ("knn", {"k": 3}),
             ("mlp", {"hidden_size": 8, "learning_rate": 0.05, "epochs": 100})],
            seed=3,
        )
        for kind in ("forest", "knn", "mlp"):
            res = result.classifiers[kind]
            assert res.confusion.counts.shape == (4, 4)
            assert res.summary.accuracy >= 0.9
            assert set(res.summary.per_class) == set(centers)
