"""Runtime configuration for the classification service."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from ..synth import SynthConfig

DEFAULT_LISTEN = "127.0.0.1:8420"


@dataclass
class ServiceConfig:
    model_path: Path | None = None  # model activated at startup
    models_dir: Path | None = None  # inventory for /api/models
    captures_dir: Path | None = None  # drop directory; newest csv is "live"
    reports_dir: Path | None = None  # where eval reports are picked up
    static_dir: Path | None = None  # console bundle, served at /
    synthetic: SynthConfig | None = None  # generate captures instead of reading files
    expected_feature_width: int | None = None  # activation policy, None = accept any
    max_pending_jobs: int = 64
