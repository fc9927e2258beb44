"""Request/response bodies for the classification API."""

from __future__ import annotations

from pydantic import BaseModel


class ClassifyRequest(BaseModel):
    source: str | None = None  # capture file path; default = newest drop-dir capture
    model: str | None = None  # model name to use; default = active model


class ClassifyAccepted(BaseModel):
    job_id: str


class PredictionView(BaseModel):
    label: str
    per_row_votes: dict[str, int]
    row_agreement: float


class JobView(BaseModel):
    id: str
    state: str
    capture_ref: str
    prediction: PredictionView | None = None
    error: str | None = None
    timestamps: dict[str, float]


class ModelInfo(BaseModel):
    name: str
    kind: str
    feature_width: int
    label_dictionary: list[str]
    created_at: str


class ModelList(BaseModel):
    models: list[ModelInfo]
    active: str | None = None


class ActivateRequest(BaseModel):
    name: str


class ActivateResponse(BaseModel):
    active: str
    kind: str
    feature_width: int
