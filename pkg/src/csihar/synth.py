"""Synthetic labeled CSI sample generator.

Produces 64-subcarrier amplitude traces with a sit/stand motion signature so
the whole pipeline can run at desk scale without capture hardware.  A standard
64-point OFDM layout is assumed: 12 null subcarriers carrying near-zero
amplitude, 4 pilots carrying a constant level plus noise, and 48 data
subcarriers carrying a slow sinusoidal fading pattern plus the activity
excursion.  Sitting dips the amplitude and settles low; standing rises and
settles high.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .data import ActivityLabel, CaptureMeta, CsiSample, SubcarrierTrace, write_sample_csv
from .errors import BadConfig, IoFailure

NULL_SUBCARRIERS = frozenset({0, 1, 2, 3, 4, 5, 32, 59, 60, 61, 62, 63})
PILOT_SUBCARRIERS = frozenset({11, 25, 39, 53})

_GOLDEN = 0.6180339887498949
_FADING_AMPLITUDE = 0.2
_BASELINE = 1.0
_LENGTH_JITTER = 0.05


@dataclass(frozen=True)
class SynthConfig:
    n_subcarriers: int = 64
    trace_length: int = 500
    noise_sigma: float = 0.05
    motion_amplitude: float = 0.5
    class_separation: float = 1.0
    seed: int = 42

    def __post_init__(self):
        if self.n_subcarriers != 64:
            raise BadConfig("n_subcarriers must be 64")
        if self.trace_length < 16:
            raise BadConfig("trace_length must be >= 16")
        if self.noise_sigma < 0:
            raise BadConfig("noise_sigma must be >= 0")
        if self.motion_amplitude <= 0:
            raise BadConfig("motion_amplitude must be > 0")
        if not 0 <= self.class_separation <= 1:
            raise BadConfig("class_separation must be in [0, 1]")
        if self.seed < 0:
            raise BadConfig("seed must be unsigned")

    def as_dict(self) -> dict:
        return {
            "n_subcarriers": self.n_subcarriers,
            "trace_length": self.trace_length,
            "noise_sigma": self.noise_sigma,
            "motion_amplitude": self.motion_amplitude,
            "class_separation": self.class_separation,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class MotionSignature:
    activity: ActivityLabel
    transition_center: float
    transition_width: float
    direction: str  # "dip" or "rise"

    def __post_init__(self):
        if not 0 < self.transition_center < 1:
            raise BadConfig("transition_center must be in (0, 1)")
        if not 0 < self.transition_width < 1:
            raise BadConfig("transition_width must be in (0, 1)")
        expected = "dip" if self.activity is ActivityLabel.SITTING else "rise"
        if self.direction != expected:
            raise BadConfig(f"{self.activity.value} requires direction {expected!r}")


@dataclass(frozen=True)
class DatasetManifest:
    path: Path
    files: tuple[str, ...]
    config: SynthConfig = field(repr=False)


def _smoothstep(s: np.ndarray) -> np.ndarray:
    s = np.clip(s, 0.0, 1.0)
    return s * s * (3.0 - 2.0 * s)


def subcarrier_scale(index: int) -> float:
    """Lower subcarriers respond less to the motion than higher ones."""
    return (1.0 + index / 64.0) * 0.5


def _sample_rng(cfg: SynthConfig, activity: ActivityLabel, sample_seed: int) -> np.random.Generator:
    # stable per-sample stream so parallel generation stays deterministic
    activity_code = 0 if activity is ActivityLabel.SITTING else 1
    return np.random.default_rng(np.random.SeedSequence([cfg.seed, activity_code, sample_seed]))


def generate_sample(cfg: SynthConfig, activity: ActivityLabel, sample_seed: int) -> CsiSample:
    """Generate one labeled sample, deterministic in (cfg.seed, sample_seed)."""
    rng = _sample_rng(cfg, activity, sample_seed)

    # packet-count variation: one jittered length shared by all 64 traces
    length = int(round(cfg.trace_length * rng.uniform(1 - _LENGTH_JITTER, 1 + _LENGTH_JITTER)))
    signature = MotionSignature(
        activity=activity,
        transition_center=rng.uniform(0.4, 0.6),
        transition_width=rng.uniform(0.15, 0.25),
        direction="dip" if activity is ActivityLabel.SITTING else "rise",
    )
    direction = -1.0 if signature.direction == "dip" else 1.0

    t = np.arange(length) / length
    start = signature.transition_center - signature.transition_width / 2.0
    step = _smoothstep((t - start) / signature.transition_width)
    excursion_base = direction * cfg.motion_amplitude * cfg.class_separation * step

    traces = []
    for k in range(cfg.n_subcarriers):
        if k in NULL_SUBCARRIERS:
            amps = 0.25 * cfg.noise_sigma * rng.standard_normal(length)
        elif k in PILOT_SUBCARRIERS:
            amps = _BASELINE + cfg.noise_sigma * rng.standard_normal(length)
        else:
            cycles = 1.5 + 0.25 * k
            phase = 2.0 * np.pi * ((k * _GOLDEN) % 1.0)
            fading = _FADING_AMPLITUDE * np.sin(2.0 * np.pi * cycles * t + phase)
            amps = (
                _BASELINE
                + fading
                + subcarrier_scale(k) * excursion_base
                + cfg.noise_sigma * rng.standard_normal(length)
            )
        traces.append(SubcarrierTrace(index=k, amplitudes=amps))

    meta = CaptureMeta(source_id=f"synthetic/{activity.value}/{sample_seed}")
    return CsiSample(label=activity, traces=tuple(traces), meta=meta)


def generate_dataset(cfg: SynthConfig, n_per_class: int, out_dir) -> DatasetManifest:
    """Write 2 * n_per_class sample CSVs plus a manifest echoing the config."""
    if n_per_class < 1:
        raise BadConfig("n_per_class must be >= 1")
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        files = []
        for activity in (ActivityLabel.SITTING, ActivityLabel.STANDING):
            for i in range(n_per_class):
                sample = generate_sample(cfg, activity, i)
                name = f"{activity.value}_{i:03d}.csv"
                write_sample_csv(sample, out_dir / name)
                files.append(name)
        files.sort()

        manifest_path = out_dir / "manifest.txt"
        lines = [f"{key}={value}" for key, value in cfg.as_dict().items()]
        lines.append(f"n_per_class={n_per_class}")
        lines.append(f"null_subcarriers={','.join(str(i) for i in sorted(NULL_SUBCARRIERS))}")
        lines.append(f"pilot_subcarriers={','.join(str(i) for i in sorted(PILOT_SUBCARRIERS))}")
        lines.extend(f"file={name}" for name in files)
        manifest_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write dataset to {out_dir}: {exc}") from exc
    return DatasetManifest(path=manifest_path, files=tuple(files), config=cfg)
