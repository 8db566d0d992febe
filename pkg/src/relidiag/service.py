"""Session-oriented HTTP API over the engine and decision layers.

One session wraps one model plus an append-only event log; the current
belief is a cached fold of that log and can always be reproduced by
refolding.  Mutating requests on a session are serialized with a
per-session lock; sessions are otherwise independent.  When a state
directory is configured, accepted session activity is journaled to an
append-only JSONL file and replayed on startup; rejected events go to a
side journal for operator review and are never folded.

Endpoints:
    POST /models                     validate and store a model document
    POST /sessions                   {model | model_id, t0}
    GET  /sessions/{id}              log and metadata
    POST /sessions/{id}/events       observe or repair
    GET  /sessions/{id}/belief?top=k belief summary
    GET  /sessions/{id}/decisions    ranked decisions plus factored optimum
    POST /sessions/{id}/whatif       hypothetical events, session untouched

Errors carry {"code", "message"} (and "violations" for invalid models).
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from fastapi import Body, FastAPI
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .decision import optimal_decision_factored, rank_decisions
from .engine import (
    BeliefState,
    Event,
    advance,
    apply_event,
    event_to_dict,
    initial_belief,
    parse_event,
)
from .errors import (
    DiagnosisError,
    InconsistentObservationError,
    IncompleteInputError,
    InvalidComponentError,
    InvalidParameterError,
    InvalidTimeError,
    ModelFormatError,
    ModelTooLargeError,
)
from .model import SystemModel, parse_model, validate_model

DEFAULT_TOP = 8


def _error_code(exc: DiagnosisError) -> tuple[int, str]:
    if isinstance(exc, InconsistentObservationError):
        return 409, "inconsistent_observation"
    if isinstance(exc, InvalidTimeError):
        return 409, "invalid_time"
    if isinstance(exc, InvalidComponentError):
        return 404, "unknown_component"
    if isinstance(exc, ModelFormatError):
        return 422, "bad_document"
    if isinstance(exc, ModelTooLargeError):
        return 422, "model_too_large"
    if isinstance(exc, (IncompleteInputError, InvalidParameterError)):
        return 422, "invalid_request"
    return 422, "domain_error"


def _error_response(exc: DiagnosisError) -> JSONResponse:
    status, code = _error_code(exc)
    return JSONResponse(status_code=status, content={"code": code, "message": str(exc)})


@dataclass
class _Session:
    id: str
    model: SystemModel
    model_doc: dict | None
    t0: float
    events: list[Event] = field(default_factory=list)
    belief: BeliefState | None = None
    lock: threading.Lock = field(default_factory=threading.Lock)


class SessionStore:
    """In-memory registry with an optional on-disk journal."""

    def __init__(self, state_dir: str | Path | None = None):
        self._lock = threading.Lock()
        self.models: dict[str, tuple[dict, SystemModel]] = {}
        self.sessions: dict[str, _Session] = {}
        self.state_dir = Path(state_dir) if state_dir is not None else None
        if self.state_dir is not None:
            self.state_dir.mkdir(parents=True, exist_ok=True)
            self._replay_journal()

    # -- journal ----------------------------------------------------------

    @property
    def _journal_path(self) -> Path:
        return self.state_dir / "journal.jsonl"

    @property
    def _rejected_path(self) -> Path:
        return self.state_dir / "rejected.jsonl"

    def _append_journal(self, record: dict) -> None:
        if self.state_dir is None:
            return
        with self._lock:
            with self._journal_path.open("a") as fh:
                fh.write(json.dumps(record) + "\n")

    def append_rejected(self, record: dict) -> None:
        if self.state_dir is None:
            return
        with self._lock:
            with self._rejected_path.open("a") as fh:
                fh.write(json.dumps(record) + "\n")

    def _replay_journal(self) -> None:
        if not self._journal_path.exists():
            return
        with self._journal_path.open() as fh:
            for line in fh:
                record = json.loads(line)
                kind = record["kind"]
                if kind == "model":
                    model = parse_model(record["doc"])
                    self.models[record["model_id"]] = (record["doc"], model)
                elif kind == "create_session":
                    model = parse_model(record["model"])
                    session = _Session(
                        id=record["session_id"],
                        model=model,
                        model_doc=record["model"],
                        t0=record["t0"],
                        belief=initial_belief(model, record["t0"]),
                    )
                    self.sessions[session.id] = session
                elif kind == "event":
                    session = self.sessions[record["session_id"]]
                    event = parse_event(record["event"])
                    session.belief = apply_event(session.belief, event)
                    session.events.append(event)

    # -- registry ---------------------------------------------------------

    def add_model(self, doc: dict, model: SystemModel) -> str:
        model_id = uuid.uuid4().hex[:12]
        with self._lock:
            self.models[model_id] = (doc, model)
        self._append_journal({"kind": "model", "model_id": model_id, "doc": doc})
        return model_id

    def add_session(self, model: SystemModel, model_doc: dict | None, t0: float) -> _Session:
        session = _Session(
            id=uuid.uuid4().hex[:12],
            model=model,
            model_doc=model_doc,
            t0=t0,
            belief=initial_belief(model, t0),
        )
        with self._lock:
            self.sessions[session.id] = session
        if model_doc is not None:
            self._append_journal(
                {
                    "kind": "create_session",
                    "session_id": session.id,
                    "model": model_doc,
                    "t0": t0,
                }
            )
        return session

    def get(self, session_id: str) -> _Session | None:
        with self._lock:
            return self.sessions.get(session_id)

    def record_event(self, session: _Session, event: Event) -> None:
        self._append_journal(
            {"kind": "event", "session_id": session.id, "event": event_to_dict(event)}
        )


def _marginal_rows(belief: BeliefState) -> list[dict[str, Any]]:
    rows = []
    for comp in belief.model.components:
        age = belief.age_of(comp.id)
        rows.append(
            {
                "component": comp.id,
                "uptime": belief.time - age,
                "age": age,
                "mtbf": comp.hazard.mtbf,
                "p_broken": belief.marginal(comp.id)["broken"],
            }
        )
    return rows


def _posterior_rows(belief: BeliefState, top: int | None) -> list[dict[str, Any]]:
    return [
        {"modes": cand.as_dict(belief.model), "probability": p}
        for cand, p in belief.top_candidates(top)
    ]


def _summary(session_id: str, belief: BeliefState, event_count: int, top: int) -> dict[str, Any]:
    total = len(belief.model.candidates)
    return {
        "session_id": session_id,
        "time": belief.time,
        "event_count": event_count,
        "marginals": _marginal_rows(belief),
        "posterior": _posterior_rows(belief, top),
        "posterior_truncated": top < total,
    }


def _decisions_payload(belief: BeliefState) -> dict[str, Any]:
    model = belief.model
    ranked = [
        {"actions": ev.decision.as_dict(model), "expected_cost": ev.expected_cost}
        for ev in rank_decisions(belief, model)
    ]
    factored = optimal_decision_factored(belief, model)
    return {
        "ranked": ranked,
        "head": ranked[0],
        "factored": {
            "actions": factored.decision.as_dict(model),
            "expected_cost": factored.expected_cost,
        },
    }


def _model_info(model: SystemModel) -> dict[str, Any]:
    return {
        "variables": [
            {"name": v.name, "domain": list(v.domain), "kind": v.kind} for v in model.variables
        ],
        "components": [c.id for c in model.components],
        "commissioning_time": model.commissioning_time,
    }


def create_app(state_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="relidiag service")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    store = SessionStore(state_dir)
    app.state.store = store

    @app.post("/models")
    def post_model(doc: dict = Body(...)):
        try:
            model = parse_model(doc)
        except ModelFormatError as exc:
            return _error_response(exc)
        violations = validate_model(model)
        if violations:
            return JSONResponse(
                status_code=422,
                content={
                    "code": "validation_failed",
                    "message": "model is invalid",
                    "violations": violations,
                },
            )
        model_id = store.add_model(doc, model)
        return {"model_id": model_id}

    @app.post("/sessions")
    def post_session(payload: dict = Body(...)):
        has_inline = "model" in payload
        has_ref = "model_id" in payload
        if has_inline == has_ref:
            return JSONResponse(
                status_code=422,
                content={
                    "code": "invalid_request",
                    "message": "exactly one of model or model_id is required",
                },
            )
        if "t0" not in payload:
            return JSONResponse(
                status_code=422,
                content={"code": "invalid_request", "message": "t0 is required"},
            )
        if has_ref:
            entry = store.models.get(payload["model_id"])
            if entry is None:
                return JSONResponse(
                    status_code=404,
                    content={
                        "code": "not_found",
                        "message": f"unknown model {payload['model_id']!r}",
                    },
                )
            doc, model = entry
        else:
            try:
                doc = payload["model"]
                model = parse_model(doc)
            except ModelFormatError as exc:
                return _error_response(exc)
            violations = validate_model(model)
            if violations:
                return JSONResponse(
                    status_code=422,
                    content={
                        "code": "validation_failed",
                        "message": "model is invalid",
                        "violations": violations,
                    },
                )
        try:
            session = store.add_session(model, doc, float(payload["t0"]))
        except DiagnosisError as exc:
            return _error_response(exc)
        return _summary(session.id, session.belief, 0, DEFAULT_TOP)

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        session = store.get(session_id)
        if session is None:
            return JSONResponse(
                status_code=404,
                content={"code": "not_found", "message": f"unknown session {session_id!r}"},
            )
        return {
            "session_id": session.id,
            "t0": session.t0,
            "time": session.belief.time,
            "events": [event_to_dict(e) for e in session.events],
            "model": _model_info(session.model),
        }

    @app.post("/sessions/{session_id}/events")
    def post_event(session_id: str, doc: dict = Body(...)):
        session = store.get(session_id)
        if session is None:
            return JSONResponse(
                status_code=404,
                content={"code": "not_found", "message": f"unknown session {session_id!r}"},
            )
        try:
            event = parse_event(doc)
        except ModelFormatError as exc:
            return _error_response(exc)
        with session.lock:
            try:
                session.belief = apply_event(session.belief, event)
            except DiagnosisError as exc:
                store.append_rejected(
                    {"session_id": session.id, "event": doc, "reason": str(exc)}
                )
                return _error_response(exc)
            session.events.append(event)
            store.record_event(session, event)
            return {
                **_summary(session.id, session.belief, len(session.events), DEFAULT_TOP),
                "applied": event_to_dict(event),
            }

    @app.get("/sessions/{session_id}/belief")
    def get_belief(session_id: str, top: int = DEFAULT_TOP):
        session = store.get(session_id)
        if session is None:
            return JSONResponse(
                status_code=404,
                content={"code": "not_found", "message": f"unknown session {session_id!r}"},
            )
        return _summary(session.id, session.belief, len(session.events), top)

    @app.get("/sessions/{session_id}/decisions")
    def get_decisions(session_id: str):
        session = store.get(session_id)
        if session is None:
            return JSONResponse(
                status_code=404,
                content={"code": "not_found", "message": f"unknown session {session_id!r}"},
            )
        try:
            payload = _decisions_payload(session.belief)
        except DiagnosisError as exc:
            return _error_response(exc)
        return {"session_id": session.id, "time": session.belief.time, **payload}

    @app.post("/sessions/{session_id}/whatif")
    def post_whatif(session_id: str, payload: dict = Body(...)):
        session = store.get(session_id)
        if session is None:
            return JSONResponse(
                status_code=404,
                content={"code": "not_found", "message": f"unknown session {session_id!r}"},
            )
        raw_events = payload.get("events", [])
        if not isinstance(raw_events, list):
            return JSONResponse(
                status_code=422,
                content={"code": "invalid_request", "message": "events must be a list"},
            )
        try:
            events = [parse_event(e) for e in raw_events]
        except ModelFormatError as exc:
            return _error_response(exc)
        belief = session.belief
        try:
            for event in events:
                belief = apply_event(belief, event)
            if "advance_to" in payload:
                belief = advance(belief, float(payload["advance_to"]))
            hypothetical = {
                **_summary(session.id, belief, len(session.events) + len(events), DEFAULT_TOP),
                "decisions": _decisions_payload(belief),
            }
        except DiagnosisError as exc:
            return _error_response(exc)
        return {
            "committed": _summary(session.id, session.belief, len(session.events), DEFAULT_TOP),
            "hypothetical": hypothetical,
        }

    return app
