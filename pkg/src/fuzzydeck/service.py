"""HTTP+JSON facade over elicitation sessions, for the UI and scripted clients."""

from __future__ import annotations

import os
from typing import Any, Optional

from fastapi import Body, FastAPI, HTTPException
from pydantic import BaseModel, ConfigDict, Field

from . import pipeline
from .cards import CardEdit
from .data_io import summarize, synth_generate
from .errors import (
    DatasetError,
    DomainError,
    EditError,
    FuzzydeckError,
    InsufficientDataError,
    OrderingError,
    ParameterError,
    StageError,
)
from .pipeline import PipelineParams, Session, SideRefinement
from .samples import SampleSet
from .store import SessionNotFound, SessionStore

SCHEMA_VERSION = pipeline.SCHEMA_VERSION
DEFAULT_STORE_DIR = os.environ.get("FUZZYDECK_STORE", "./fuzzydeck-sessions")


class DatasetSpec(BaseModel):
    """Inline values or a synthetic-generator spec."""

    values: Optional[list[float]] = None
    bounds: Optional[tuple[float, float]] = None
    shape: Optional[str] = None
    n: Optional[int] = None
    seed: Optional[int] = None

    def build(self) -> SampleSet:
        if self.values is not None:
            return SampleSet.from_values(self.values, bounds=self.bounds)
        if self.shape is not None:
            data = synth_generate(self.shape, self.n or 500, self.seed or 0)
            if self.bounds is not None:
                return SampleSet.from_values(data.values, bounds=self.bounds)
            return data
        raise ParameterError("dataset needs either inline 'values' or a synth 'shape'")


class CreateSessionRequest(BaseModel):
    dataset: DatasetSpec
    params: dict[str, Any] = Field(default_factory=dict)


class EditPayload(BaseModel):
    kind: str
    gap_index: int
    count: int
    target_gap_index: Optional[int] = None


class EditsRequest(BaseModel):
    edits: list[EditPayload]
    target: Optional[str] = None


class AdvanceRequest(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    class_index: Optional[int] = Field(default=None, alias="class")
    side: Optional[str] = None
    k_side: int = 3


def _http_error(exc: FuzzydeckError) -> HTTPException:
    if isinstance(exc, StageError):
        return HTTPException(status_code=409, detail=str(exc))
    if isinstance(exc, SessionNotFound):
        return HTTPException(status_code=404, detail=str(exc))
    if isinstance(exc, (EditError, OrderingError, InsufficientDataError)):
        return HTTPException(status_code=422, detail=str(exc))
    if isinstance(exc, (ParameterError, DatasetError, DomainError)):
        return HTTPException(status_code=400, detail=str(exc))
    return HTTPException(status_code=422, detail=str(exc))


def create_app(store_dir: str | os.PathLike | None = None) -> FastAPI:
    store = SessionStore(store_dir or DEFAULT_STORE_DIR)
    app = FastAPI(title="fuzzydeck", version="0.1.0")
    app.state.store = store

    def load_or_404(session_id: str) -> Session:
        try:
            return store.load(session_id)
        except SessionNotFound as exc:
            raise _http_error(exc)

    @app.post("/v1/sessions", status_code=201)
    def create_session(req: CreateSessionRequest):
        try:
            dataset = req.dataset.build()
            params = PipelineParams.from_dict(req.params)
            session = pipeline.create_session(dataset, params)
        except FuzzydeckError as exc:
            raise _http_error(exc)
        store.save(session)
        return {
            "schema_version": SCHEMA_VERSION,
            "session_id": session.id,
            "stage": session.stage,
        }

    @app.get("/v1/sessions/{session_id}")
    def get_session(session_id: str):
        return load_or_404(session_id).to_dict()

    @app.post("/v1/sessions/{session_id}/advance")
    def advance(session_id: str, req: AdvanceRequest | None = Body(default=None)):
        with store.lock(session_id):
            session = load_or_404(session_id)
            try:
                payload = _run_advance(session, req or AdvanceRequest())
            except FuzzydeckError as exc:
                raise _http_error(exc)
            store.save(session)
        return payload

    def _run_advance(session: Session, req: AdvanceRequest) -> dict:
        if session.stage == "Created":
            chain, preview = pipeline.step1_propose(session)
            return {
                "schema_version": SCHEMA_VERSION,
                "stage": session.stage,
                "chain": chain.to_dict(),
                "preview_partition": preview.to_dict(),
                "summary": summarize(session.dataset).to_dict(),
            }
        if session.stage == "Step1Committed":
            chain = pipeline.step2_propose(session)
            return {
                "schema_version": SCHEMA_VERSION,
                "stage": session.stage,
                "chain": chain.to_dict(),
                "preview_partition": session.partition.to_dict(),
            }
        if session.stage in ("Step2Committed", "Step3InProgress"):
            if req.class_index is None or req.side is None:
                raise StageError(
                    "side refinement needs 'class' (index) and 'side' in the body"
                )
            refinement = pipeline.step3_propose(
                session, req.class_index, req.side, req.k_side
            )
            return {
                "schema_version": SCHEMA_VERSION,
                "stage": session.stage,
                "refinement": refinement.to_dict(),
            }
        raise StageError(f"stage {session.stage} has no proposal to advance to")

    @app.post("/v1/sessions/{session_id}/edits")
    def apply_edits(session_id: str, req: EditsRequest):
        with store.lock(session_id):
            session = load_or_404(session_id)
            try:
                edits = [CardEdit.from_dict(e.model_dump()) for e in req.edits]
                result = pipeline.apply_session_edits(session, edits, req.target)
            except FuzzydeckError as exc:
                raise _http_error(exc)
            store.save(session)
        if isinstance(result, SideRefinement):
            return {"schema_version": SCHEMA_VERSION, "refinement": result.to_dict()}
        return {"schema_version": SCHEMA_VERSION, "chain": result.to_dict()}

    @app.post("/v1/sessions/{session_id}/commit")
    def commit(session_id: str):
        with store.lock(session_id):
            session = load_or_404(session_id)
            try:
                payload = _run_commit(session)
            except FuzzydeckError as exc:
                raise _http_error(exc)
            store.save(session)
        return payload

    def _run_commit(session: Session) -> dict:
        if session.stage == "Step1Proposed":
            centroids, _ = pipeline.step1_commit(session)
            return {
                "schema_version": SCHEMA_VERSION,
                "stage": session.stage,
                "centroids": [float(v) for v in centroids.values],
                "partition": session.partition.to_dict(),
            }
        if session.stage == "Step2Proposed":
            cores, partition = pipeline.step2_commit(session)
            return {
                "schema_version": SCHEMA_VERSION,
                "stage": session.stage,
                "cores": [list(c) for c in cores],
                "partition": partition.to_dict(),
            }
        if session.stage == "Step3InProgress" and session.active_refinement:
            updated = pipeline.step3_commit(session)
            return {
                "schema_version": SCHEMA_VERSION,
                "stage": session.stage,
                "class": updated.to_dict(),
                "partition": session.partition.to_dict(),
            }
        if session.stage in ("Step2Committed", "Step3InProgress", "Finalized"):
            partition, transcript = pipeline.finalize(session)
            return {
                "schema_version": SCHEMA_VERSION,
                "stage": session.stage,
                "partition": partition.to_dict(),
                "transcript": transcript,
            }
        raise StageError(f"stage {session.stage} has nothing to commit")

    @app.get("/v1/sessions/{session_id}/partition")
    def get_partition(session_id: str):
        session = load_or_404(session_id)
        if session.partition is None:
            raise HTTPException(status_code=409, detail="no partition computed yet")
        return {
            "schema_version": SCHEMA_VERSION,
            "stage": session.stage,
            "partition": session.partition.to_dict(),
        }

    @app.get("/v1/sessions/{session_id}/plotdata")
    def get_plotdata(session_id: str):
        session = load_or_404(session_id)
        return {
            "schema_version": SCHEMA_VERSION,
            "stage": session.stage,
            "summary": summarize(session.dataset).to_dict(),
            "partition": session.partition.to_dict() if session.partition else None,
        }

    return app


def main() -> None:  # pragma: no cover - thin uvicorn launcher
    import argparse

    import uvicorn

    parser = argparse.ArgumentParser(description="Run the fuzzydeck service")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8000)
    parser.add_argument("--store", default=DEFAULT_STORE_DIR)
    args = parser.parse_args()
    uvicorn.run(create_app(args.store), host=args.host, port=args.port)


if __name__ == "__main__":  # pragma: no cover
    main()
