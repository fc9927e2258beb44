"""Data model, file formats, padding and partitioning for CSI activity samples.

A sample is one labeled activity recording: 64 subcarrier amplitude traces of
equal length plus capture metadata.  Samples of different lengths are combined
into a rectangular label-first design matrix by right-padding shorter traces
with zeros.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import (
    BadFraction,
    EmptyInput,
    LabelMismatch,
    MalformedCsv,
    RaggedRows,
    RowCountMismatch,
    TooFewRows,
    UnknownLabel,
)

N_SUBCARRIERS = 64


class ActivityLabel(str, Enum):
    SITTING = "sitting"
    STANDING = "standing"

    @classmethod
    def parse(cls, token: str) -> "ActivityLabel":
        try:
            return cls(token.strip().lower())
        except ValueError:
            raise UnknownLabel(f"unknown activity label {token!r}") from None


@dataclass(frozen=True)
class CaptureMeta:
    """Capture parameters carried as metadata (5.32 GHz centre, 1/80e4 s
    sample time, 10 s transmission are the reference hardware settings)."""

    centre_frequency_hz: float = 5.32e9
    sample_time_s: float = 1.0 / 80e4
    capture_duration_s: float = 10.0
    source_id: str = ""

    def __post_init__(self):
        for name in ("centre_frequency_hz", "sample_time_s", "capture_duration_s"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class SubcarrierTrace:
    index: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if not 0 <= self.index < N_SUBCARRIERS:
            raise ValueError(f"subcarrier index {self.index} out of range")
        amps = np.asarray(self.amplitudes, dtype=np.float64)
        if amps.ndim != 1 or amps.size == 0:
            raise ValueError("amplitudes must be a nonempty 1-D sequence")
        if not np.isfinite(amps).all():
            raise ValueError("amplitudes must be finite")
        object.__setattr__(self, "amplitudes", amps)


@dataclass(frozen=True)
class CsiSample:
    label: ActivityLabel
    traces: tuple[SubcarrierTrace, ...]
    meta: CaptureMeta = field(default_factory=CaptureMeta)

    def __post_init__(self):
        if len(self.traces) != N_SUBCARRIERS:
            raise ValueError(f"expected {N_SUBCARRIERS} traces, got {len(self.traces)}")
        if [t.index for t in self.traces] != list(range(N_SUBCARRIERS)):
            raise ValueError("traces must carry distinct indices 0..63 in order")
        lengths = {t.amplitudes.size for t in self.traces}
        if len(lengths) != 1:
            raise ValueError("all traces within one sample must have equal length")
        object.__setattr__(self, "traces", tuple(self.traces))

    @property
    def trace_length(self) -> int:
        return self.traces[0].amplitudes.size


@dataclass(frozen=True)
class DesignMatrix:
    """Label-first rectangular matrix; each row is one (padded) trace."""

    labels: tuple[str, ...]
    rows: np.ndarray

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.float64)
        if rows.ndim != 2:
            raise ValueError("rows must be 2-D")
        if len(self.labels) != rows.shape[0]:
            raise ValueError("one label per row required")
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "rows", rows)

    @property
    def n_rows(self) -> int:
        return self.rows.shape[0]

    @property
    def width(self) -> int:
        return self.rows.shape[1]

    @property
    def label_dictionary(self) -> list[str]:
        return sorted(set(self.labels))

    def subset(self, indices: np.ndarray) -> "DesignMatrix":
        indices = np.asarray(indices)
        return DesignMatrix(
            labels=tuple(self.labels[i] for i in indices),
            rows=self.rows[indices],
        )


@dataclass(frozen=True)
class FoldPlan:
    k: int
    assignments: np.ndarray  # fold id per row
    seed: int

    def __post_init__(self):
        object.__setattr__(self, "assignments", np.asarray(self.assignments, dtype=np.int64))

    def fold_indices(self, fold: int) -> tuple[np.ndarray, np.ndarray]:
        """(train_indices, test_indices) for one fold."""
        test = np.flatnonzero(self.assignments == fold)
        train = np.flatnonzero(self.assignments != fold)
        return train, test


def _parse_float(token: str, path, line_no: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise MalformedCsv(f"{path}:{line_no}: non-numeric token {token!r}") from None
    if not math.isfinite(value):
        raise MalformedCsv(f"{path}:{line_no}: non-finite value {token!r}")
    return value


def load_sample_csv(path) -> CsiSample:
    """Read one sample file: 64 rows of ``label,val,val,...``.

    Row order defines the subcarrier index.  All rows must agree on the label
    and have the same number of values.
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    lines = [ln for ln in text.split("\n") if ln != ""]
    if len(lines) != N_SUBCARRIERS:
        raise MalformedCsv(f"{path}: expected {N_SUBCARRIERS} rows, got {len(lines)}")

    label: ActivityLabel | None = None
    traces = []
    for i, line in enumerate(lines):
        tokens = line.split(",")
        if len(tokens) < 2:
            raise MalformedCsv(f"{path}:{i + 1}: row needs a label and at least one value")
        row_label = ActivityLabel.parse(tokens[0])
        if label is None:
            label = row_label
        elif row_label is not label:
            raise LabelMismatch(f"{path}:{i + 1}: rows disagree on label")
        values = [_parse_float(tok, path, i + 1) for tok in tokens[1:]]
        traces.append(SubcarrierTrace(index=i, amplitudes=np.array(values)))

    lengths = {t.amplitudes.size for t in traces}
    if len(lengths) != 1:
        raise MalformedCsv(f"{path}: rows have unequal lengths {sorted(lengths)}")
    return CsiSample(label=label, traces=tuple(traces), meta=CaptureMeta(source_id=path.name))


def format_float(value: float) -> str:
    """Shortest decimal string that round-trips to the same float."""
    return repr(float(value))


def write_sample_csv(sample: CsiSample, path) -> None:
    path = Path(path)
    lines = []
    for trace in sample.traces:
        values = ",".join(format_float(v) for v in trace.amplitudes)
        lines.append(f"{sample.label.value},{values}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_dataset_dir(directory) -> list[CsiSample]:
    """A directory of sample CSVs is a dataset; lexicographic filename order
    defines sample order."""
    directory = Path(directory)
    return [load_sample_csv(p) for p in sorted(directory.glob("*.csv"))]


def assemble_design_matrix(samples) -> DesignMatrix:
    """Stack all subcarrier traces into one rectangular matrix.

    One row per trace (64 per sample), width = the longest trace anywhere in
    the input; shorter rows are right-padded with 0.0.
    """
    samples = list(samples)
    if not samples:
        raise EmptyInput("no samples to assemble")
    width = max(s.trace_length for s in samples)
    n = len(samples) * N_SUBCARRIERS
    rows = np.zeros((n, width), dtype=np.float64)
    labels = []
    r = 0
    for sample in samples:
        for trace in sample.traces:
            rows[r, : trace.amplitudes.size] = trace.amplitudes
            labels.append(sample.label.value)
            r += 1
    return DesignMatrix(labels=tuple(labels), rows=rows)


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def train_test_split(dm: DesignMatrix, test_fraction: float, seed: int) -> tuple[DesignMatrix, DesignMatrix]:
    """Seeded uniform shuffle, then cut off round(n * test_fraction) test rows.

    Not stratified: class proportions in the parts follow the shuffle.
    """
    if not 0 < test_fraction < 1:
        raise BadFraction(f"test_fraction must be in (0, 1), got {test_fraction}")
    n = dm.n_rows
    if n < 2:
        raise EmptyInput("need at least 2 rows to split")
    n_test = _round_half_up(n * test_fraction)
    perm = np.random.default_rng(seed).permutation(n)
    test_idx = perm[:n_test]
    train_idx = perm[n_test:]
    return dm.subset(train_idx), dm.subset(test_idx)


def kfold_partition(n_rows: int, k: int, seed: int) -> FoldPlan:
    """Shuffled assignment of rows to k folds with sizes differing by at most 1."""
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    if n_rows < k:
        raise TooFewRows(f"cannot make {k} folds from {n_rows} rows")
    perm = np.random.default_rng(seed).permutation(n_rows)
    assignments = np.empty(n_rows, dtype=np.int64)
    assignments[perm] = np.arange(n_rows) % k
    return FoldPlan(k=k, assignments=assignments, seed=seed)


def _split_numeric_row(line: str):
    # external files may be comma- or whitespace-separated
    if "," in line:
        return [tok for tok in line.split(",") if tok.strip() != ""]
    return line.split()


def ingest_feature_matrix(data_path, labels_path) -> DesignMatrix:
    """Load an external, already-rectangular feature matrix with a sidecar
    label file (one token per row).  Any label vocabulary is accepted; no
    padding is applied."""
    data_path, labels_path = Path(data_path), Path(labels_path)
    data_lines = [ln for ln in data_path.read_text(encoding="utf-8").split("\n") if ln.strip() != ""]
    label_lines = [ln.strip() for ln in labels_path.read_text(encoding="utf-8").split("\n") if ln.strip() != ""]
    if not data_lines:
        raise EmptyInput(f"{data_path}: no rows")
    if len(data_lines) != len(label_lines):
        raise RowCountMismatch(
            f"{len(data_lines)} data rows vs {len(label_lines)} labels"
        )
    rows = []
    width = None
    for i, line in enumerate(data_lines):
        values = [_parse_float(tok, data_path, i + 1) for tok in _split_numeric_row(line)]
        if width is None:
            width = len(values)
        elif len(values) != width:
            raise RaggedRows(
                f"{data_path}:{i + 1}: row width {len(values)} != {width}; "
                "external data must be pre-rectangular"
            )
        rows.append(values)
    return DesignMatrix(labels=tuple(label_lines), rows=np.array(rows, dtype=np.float64))


def design_matrix_digest(dm: DesignMatrix) -> str:
    """SHA-256 hex digest of the canonical text serialization of a matrix."""
    h = hashlib.sha256()
    for label, row in zip(dm.labels, dm.rows):
        line = label + "," + ",".join(format_float(v) for v in row) + "\n"
        h.update(line.encode("utf-8"))
    return h.hexdigest()
