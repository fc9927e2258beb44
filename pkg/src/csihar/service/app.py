"""HTTP classification service.

Flow per job: a POST trigger resolves the capture (explicit path, or the
newest CSV in the drop directory, or a freshly generated synthetic sample),
the job passes pending -> loading while the persisted model is applied to all
64 subcarrier rows, and the sample label (plurality of row predictions) comes
back on the job record.
"""

from __future__ import annotations

import itertools
import threading
from contextlib import asynccontextmanager
from pathlib import Path

from fastapi import FastAPI, HTTPException, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.staticfiles import StaticFiles

from ..data import ActivityLabel, load_sample_csv
from ..errors import CorruptModel, CsiharError, VersionMismatch
from ..model_store import MODEL_SUFFIX, ModelEnvelope, load_model
from ..synth import generate_sample
from .config import ServiceConfig
from .inference import classify_sample
from .jobs import JobRunner, QueueFull
from .schemas import (
    ActivateRequest,
    ActivateResponse,
    ClassifyAccepted,
    ClassifyRequest,
    JobView,
    ModelInfo,
    ModelList,
)


class ServiceState:
    def __init__(self, config: ServiceConfig):
        self.config = config
        self.lock = threading.Lock()
        self.active_name: str | None = None
        self.active: ModelEnvelope | None = None
        self.runner = JobRunner(max_pending=config.max_pending_jobs)
        self._synth_counter = itertools.count()

    def activate(self, name: str, envelope: ModelEnvelope) -> None:
        with self.lock:
            self.active_name = name
            self.active = envelope

    def current(self) -> tuple[str | None, ModelEnvelope | None]:
        with self.lock:
            return self.active_name, self.active


def _model_file(state: ServiceState, name: str) -> Path:
    if not name.endswith(MODEL_SUFFIX):
        name += MODEL_SUFFIX
    base = state.config.models_dir
    if base is None:
        raise HTTPException(status_code=404, detail="UnknownModel: no model directory configured")
    return base / name


def _resolve_capture(state: ServiceState, source: str | None):
    """(capture_ref, loader) for the requested or live capture."""
    if source is not None:
        path = Path(source)
        if not path.is_file():
            raise HTTPException(status_code=404, detail=f"CaptureNotFound: {source}")
        return str(path), lambda: load_sample_csv(path)

    if state.config.synthetic is not None:
        n = next(state._synth_counter)
        activity = ActivityLabel.SITTING if n % 2 == 0 else ActivityLabel.STANDING
        cfg = state.config.synthetic
        return "live", lambda: generate_sample(cfg, activity, sample_seed=10_000 + n)

    drop = state.config.captures_dir
    if drop is None or not drop.is_dir():
        raise HTTPException(status_code=404, detail="CaptureNotFound: no capture directory")
    candidates = list(drop.glob("*.csv"))
    if not candidates:
        raise HTTPException(status_code=404, detail="CaptureNotFound: drop directory is empty")
    newest = max(candidates, key=lambda p: (p.stat().st_mtime, p.name))
    return str(newest), lambda: load_sample_csv(newest)


def create_app(config: ServiceConfig) -> FastAPI:
    state = ServiceState(config)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        if config.model_path is not None:
            envelope = load_model(config.model_path)
            state.activate(Path(config.model_path).stem, envelope)
        state.runner.start()
        yield
        state.runner.stop()

    app = FastAPI(title="csihar classification service", lifespan=lifespan)
    app.state.service = state
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.get("/api/health")
    def health():
        name, _ = state.current()
        return {"status": "ok", "active_model": name}

    @app.post("/api/classify", response_model=ClassifyAccepted, status_code=202)
    def classify(request: ClassifyRequest):
        if request.model is not None:
            model_file = _model_file(state, request.model)
            if not model_file.is_file():
                raise HTTPException(status_code=404, detail=f"UnknownModel: {request.model}")
            envelope = load_model(model_file)
        else:
            _, envelope = state.current()
            if envelope is None:
                raise HTTPException(status_code=409, detail="NoModelLoaded")

        capture_ref, loader = _resolve_capture(state, request.source)

        def work():
            sample = loader()
            return classify_sample(envelope.model, envelope.feature_width, sample)

        try:
            job_id = state.runner.submit(capture_ref, work)
        except QueueFull as exc:
            raise HTTPException(status_code=413, detail=str(exc)) from exc
        return ClassifyAccepted(job_id=job_id)

    @app.get("/api/jobs/{job_id}", response_model=JobView)
    def get_job(job_id: str):
        snapshot = state.runner.get(job_id)
        if snapshot is None:
            raise HTTPException(status_code=404, detail=f"UnknownJob: {job_id}")
        return JobView(**snapshot)

    @app.get("/api/models", response_model=ModelList)
    def list_models():
        entries = []
        base = config.models_dir
        if base is not None and base.is_dir():
            for path in sorted(base.glob(f"*{MODEL_SUFFIX}")):
                try:
                    envelope = load_model(path)
                except (CorruptModel, VersionMismatch, CsiharError):
                    continue
                entries.append(
                    ModelInfo(
                        name=path.stem,
                        kind=envelope.kind,
                        feature_width=envelope.feature_width,
                        label_dictionary=envelope.label_dictionary,
                        created_at=envelope.created_at,
                    )
                )
        active_name, _ = state.current()
        return ModelList(models=entries, active=active_name)

    @app.post("/api/models/activate", response_model=ActivateResponse)
    def activate_model(request: ActivateRequest):
        model_file = _model_file(state, request.name)
        if not model_file.is_file():
            raise HTTPException(status_code=404, detail=f"UnknownModel: {request.name}")
        try:
            envelope = load_model(model_file)
        except (CorruptModel, VersionMismatch) as exc:
            raise HTTPException(status_code=422, detail=f"{type(exc).__name__}: {exc}") from exc
        expected = config.expected_feature_width
        if expected is not None and envelope.feature_width != expected:
            raise HTTPException(
                status_code=422,
                detail=(
                    f"IncompatibleSchema: model width {envelope.feature_width} "
                    f"!= expected {expected}"
                ),
            )
        state.activate(model_file.stem, envelope)
        return ActivateResponse(
            active=model_file.stem,
            kind=envelope.kind,
            feature_width=envelope.feature_width,
        )

    @app.get("/api/reports/latest")
    def latest_report():
        base = config.reports_dir
        if base is None or not base.is_dir():
            raise HTTPException(status_code=404, detail="NoReports")
        candidates = list(base.glob("*.json"))
        if not candidates:
            raise HTTPException(status_code=404, detail="NoReports")
        newest = max(candidates, key=lambda p: (p.stat().st_mtime, p.name))
        # byte-for-byte passthrough of the report file
        return Response(content=newest.read_bytes(), media_type="application/json")

    if config.static_dir is not None and Path(config.static_dir).is_dir():
        app.mount("/", StaticFiles(directory=config.static_dir, html=True), name="console")

    return app


def run_server(config: ServiceConfig, host: str, port: int) -> None:
    import uvicorn

    uvicorn.run(create_app(config), host=host, port=port, log_level="warning")
