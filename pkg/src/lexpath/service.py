"""HTTP API for running interviews against a loaded bundle.

Design notes that matter for correctness:

* A session is pinned to the bundle it was created under.  Reloading a
  bundle swaps the snapshot for *new* sessions; in-flight ones keep
  answering against the graph they started on, so a mid-interview reload
  can never strand a cursor on a missing block.
* Session state is mutated under a per-session lock; the registry itself
  under another.  Sessions expire after a TTL and are swept lazily.
* Every error leaves through one envelope: {"error": {"code", "message"}}
  with the engine's stable code strings.
"""
from __future__ import annotations

import datetime as dt
import os
import threading
import time
from dataclasses import dataclass, field as dataclass_field

from fastapi import FastAPI, Header, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import analytics
from .analytics import (
    AnalyticsEvent,
    EventKind,
    EventLog,
    FeedbackLog,
    FeedbackRecord,
    parse_event_kind,
)
from .errors import (
    BadRangeError,
    LexpathError,
    NoBundleError,
    UnknownSessionError,
)
from .interchange import Bundle, read_bundle_file
from .sessions import (
    Analysis,
    Prompt,
    Session,
    SessionStatus,
    answer as answer_session,
    build_analysis,
    build_prompt,
    revise_answer,
    start_session,
)

DEFAULT_SESSION_TTL = 24 * 3600.0

_STATUS_BY_CODE = {
    "NO_BUNDLE": 503,
    "UNKNOWN_SESSION": 404,
    "SESSION_COMPLETE": 409,
    "SESSION_INCOMPLETE": 409,
    "UNKNOWN_ANSWER": 422,
    "BAD_INDEX": 400,
    "BAD_RANGE": 400,
    "DISALLOWED_PAYLOAD": 422,
    "UNKNOWN_EVENT_KIND": 422,
    "PARSE_ERROR": 400,
    "UNKNOWN_FIELD": 400,
    "UNSUPPORTED_VERSION": 400,
    "INVALID_SCHEMA": 400,
    "BROKEN_REFERENCES": 400,
}


@dataclass
class SessionEntry:
    session: Session
    bundle: Bundle
    expires_at: float
    lock: threading.Lock = dataclass_field(default_factory=threading.Lock)


class ServiceState:
    """Everything mutable behind the API, separable from FastAPI for
    direct testing."""

    def __init__(self, bundle: Bundle | None = None,
                 event_log: EventLog | None = None,
                 feedback_log: FeedbackLog | None = None,
                 admin_token: str | None = None,
                 session_ttl: float = DEFAULT_SESSION_TTL,
                 now_fn=time.time):
        self.bundle = bundle
        self.event_log = event_log if event_log is not None else EventLog()
        self.feedback_log = feedback_log if feedback_log is not None else FeedbackLog()
        self.admin_token = admin_token
        self.session_ttl = session_ttl
        self.now_fn = now_fn
        self._sessions: dict[str, SessionEntry] = {}
        self._registry_lock = threading.Lock()

    # --- bundle lifecycle --------------------------------------------

    def load_bundle_file(self, path: str) -> Bundle:
        bundle = read_bundle_file(path)
        self.bundle = bundle
        return bundle

    def require_bundle(self) -> Bundle:
        bundle = self.bundle
        if bundle is None:
            raise NoBundleError("no bundle is loaded")
        return bundle

    # --- session registry --------------------------------------------

    def _sweep(self, now: float) -> None:
        expired = [sid for sid, entry in self._sessions.items()
                   if entry.expires_at <= now]
        for sid in expired:
            del self._sessions[sid]

    def put_session(self, session: Session, bundle: Bundle) -> SessionEntry:
        now = self.now_fn()
        entry = SessionEntry(session=session, bundle=bundle,
                             expires_at=now + self.session_ttl)
        with self._registry_lock:
            self._sweep(now)
            self._sessions[session.session_id] = entry
        return entry

    def get_session(self, session_id: str) -> SessionEntry:
        now = self.now_fn()
        with self._registry_lock:
            self._sweep(now)
            entry = self._sessions.get(session_id)
            if entry is None:
                raise UnknownSessionError(
                    f"no session {session_id!r}", session_id=session_id)
            entry.expires_at = now + self.session_ttl
            return entry

    def session_count(self) -> int:
        with self._registry_lock:
            return len(self._sessions)

    # --- event helpers -----------------------------------------------

    def emit(self, kind: EventKind, session_id: str | None = None,
             **payload: str) -> None:
        self.event_log.record(AnalyticsEvent(
            kind=kind,
            timestamp=dt.datetime.now(dt.timezone.utc),
            session_id=session_id,
            payload={k: v for k, v in payload.items() if v is not None},
        ))


# --- payload shaping ------------------------------------------------------

def _case_panel(case, summary_text: str) -> dict:
    return {
        "case_id": case.case_id,
        "citation": case.citation,
        "decision_date": case.decision_date.isoformat(),
        "summary": summary_text,
    }


def _prompt_payload(prompt: Prompt) -> dict:
    return {
        "type": "prompt",
        "criterion_id": prompt.criterion_id,
        "title": prompt.title,
        "description": prompt.description,
        "answers": [{"id": a.id, "label": a.label} for a in prompt.answers],
        "applied_examples": [
            _case_panel(case, s.summary) for case, s in prompt.applied_examples],
        "not_applied_examples": [
            _case_panel(case, s.summary) for case, s in prompt.not_applied_examples],
    }


def _analysis_payload(analysis: Analysis) -> dict:
    return {
        "type": "analysis",
        "past_outcomes_only": analysis.past_outcomes_only,
        "conclusions": [
            {"conclusion_id": c.conclusion_id, "title": c.title,
             "explanation": c.explanation}
            for c in analysis.conclusions],
        "matched_cases": [
            dict(_case_panel(case, s.summary), conclusion_id=s.conclusion_id)
            for case, s in analysis.matched_cases],
        "next_steps": [{"title": s.title, "text": s.text}
                       for s in analysis.next_steps],
    }


def _review_payload(entry: SessionEntry) -> list[dict]:
    schema = entry.bundle.schema
    out = []
    for i, step in enumerate(entry.session.steps):
        block = schema.blocks[step.criterion_id]
        label = next((a.label for a in block.answers if a.id == step.answer_id), "")
        out.append({
            "index": i,
            "criterion_id": step.criterion_id,
            "criterion_title": block.title,
            "answer_id": step.answer_id,
            "answer_label": label,
        })
    return out


def _session_payload(entry: SessionEntry, view: Prompt | Analysis) -> dict:
    body = (_analysis_payload(view) if isinstance(view, Analysis)
            else _prompt_payload(view))
    return {
        "session_id": entry.session.session_id,
        "status": entry.session.status.value,
        "schema_id": entry.session.schema_id,
        "schema_version": entry.session.schema_version,
        "steps": _review_payload(entry),
        "view": body,
    }


def _error_response(code: str, message: str, status: int) -> JSONResponse:
    return JSONResponse(status_code=status,
                        content={"error": {"code": code, "message": message}})


# --- request bodies -------------------------------------------------------

class CreateSessionBody(BaseModel):
    referrer_class: str | None = None


class AnswerBody(BaseModel):
    answer_id: str


class EventBody(BaseModel):
    kind: str
    session_id: str | None = None
    payload: dict[str, str] = {}


class FeedbackBody(BaseModel):
    session_id: str
    issue_text: str = ""
    found_helpful: bool | None = None
    understood_rights: bool | None = None
    would_recommend: bool | None = None


class ReloadBody(BaseModel):
    path: str


# --- event side effects ---------------------------------------------------

def _latest_role(entry: SessionEntry) -> str | None:
    schema = entry.bundle.schema
    role = None
    for step in entry.session.steps:
        block = schema.blocks[step.criterion_id]
        for ans in block.answers:
            if ans.id == step.answer_id and ans.role_tag:
                role = ans.role_tag
    return role


def _emit_answer_events(state: ServiceState, entry: SessionEntry,
                        criterion_id: str, answer_id: str) -> None:
    session = entry.session
    schema = entry.bundle.schema
    state.emit(EventKind.QUESTION_ANSWERED, session.session_id,
               block_id=criterion_id, answer_id=answer_id)
    block = schema.blocks[criterion_id]
    chosen = next((a for a in block.answers if a.id == answer_id), None)
    if chosen is not None and chosen.pathway_id:
        state.emit(EventKind.PATHWAY_SELECTED, session.session_id,
                   pathway_id=chosen.pathway_id,
                   pathway_label=chosen.label,
                   role=_latest_role(entry))
    if session.status is SessionStatus.COMPLETE:
        last = session.conclusion_stack[-1] if session.conclusion_stack else None
        state.emit(EventKind.ANALYSIS_REACHED, session.session_id,
                   block_id=last)


# --- app ------------------------------------------------------------------

def create_app(state: ServiceState | None = None) -> FastAPI:
    state = state or ServiceState()
    app = FastAPI(title="lexpath", docs_url=None, redoc_url=None)
    app.state.service = state

    @app.exception_handler(LexpathError)
    async def _lexpath_error(_request: Request, exc: LexpathError):
        status = _STATUS_BY_CODE.get(exc.code, 500)
        return _error_response(exc.code, exc.message, status)

    @app.exception_handler(RequestValidationError)
    async def _validation_error(_request: Request, exc: RequestValidationError):
        return _error_response("VALIDATION", str(exc.errors()[:3]), 422)

    @app.get("/api/v1/health")
    def health():
        return {"status": "ok", "bundle_loaded": state.bundle is not None}

    @app.get("/api/v1/bundle")
    def bundle_info():
        bundle = state.require_bundle()
        return {
            "title": bundle.metadata.title,
            "locale": bundle.metadata.locale,
            "published_date": bundle.metadata.published_date.isoformat(),
            "schema_id": bundle.schema.id,
            "schema_version": bundle.schema.version,
            "block_count": len(bundle.schema.blocks),
        }

    @app.post("/api/v1/sessions", status_code=201)
    def create_session(body: CreateSessionBody | None = None):
        bundle = state.require_bundle()
        session, view = start_session(bundle.schema, bundle.store)
        entry = state.put_session(session, bundle)
        referrer = body.referrer_class if body is not None else None
        state.emit(EventKind.PAGE_VIEW, session.session_id,
                   referrer_class=referrer)
        if session.status is SessionStatus.COMPLETE:
            last = session.conclusion_stack[-1] if session.conclusion_stack else None
            state.emit(EventKind.ANALYSIS_REACHED, session.session_id,
                       block_id=last)
        return _session_payload(entry, view)

    @app.get("/api/v1/sessions/{session_id}")
    def get_session(session_id: str):
        entry = state.get_session(session_id)
        with entry.lock:
            bundle = entry.bundle
            if entry.session.status is SessionStatus.COMPLETE:
                view: Prompt | Analysis = build_analysis(
                    entry.session, bundle.schema, bundle.store)
            else:
                view = build_prompt(bundle.schema, bundle.store,
                                    entry.session.cursor)
            return _session_payload(entry, view)

    @app.post("/api/v1/sessions/{session_id}/answers")
    def post_answer(session_id: str, body: AnswerBody):
        entry = state.get_session(session_id)
        with entry.lock:
            criterion_id = entry.session.cursor
            view = answer_session(entry.session, body.answer_id,
                                  entry.bundle.schema, entry.bundle.store)
            _emit_answer_events(state, entry, criterion_id, body.answer_id)
            return _session_payload(entry, view)

    @app.patch("/api/v1/sessions/{session_id}/answers/{step_index}")
    def patch_answer(session_id: str, step_index: int, body: AnswerBody):
        entry = state.get_session(session_id)
        with entry.lock:
            steps = entry.session.steps
            criterion_id = (steps[step_index].criterion_id
                            if 0 <= step_index < len(steps) else None)
            view = revise_answer(entry.session, step_index, body.answer_id,
                                 entry.bundle.schema, entry.bundle.store)
            _emit_answer_events(state, entry, criterion_id, body.answer_id)
            return _session_payload(entry, view)

    @app.post("/api/v1/events", status_code=202)
    def post_event(body: EventBody):
        kind = parse_event_kind(body.kind)
        event = AnalyticsEvent(
            kind=kind,
            timestamp=dt.datetime.now(dt.timezone.utc),
            session_id=body.session_id,
            payload=dict(body.payload),
        )
        state.event_log.record(event)
        return {"accepted": True}

    @app.post("/api/v1/feedback", status_code=201)
    def post_feedback(body: FeedbackBody):
        state.get_session(body.session_id)  # 404 when unknown/expired
        record = FeedbackRecord(
            timestamp=dt.datetime.now(dt.timezone.utc),
            session_id=body.session_id,
            issue_text=analytics.sanitize_free_text(body.issue_text),
            found_helpful=body.found_helpful,
            understood_rights=body.understood_rights,
            would_recommend=body.would_recommend,
        )
        state.feedback_log.record(record)
        state.emit(EventKind.FEEDBACK_SUBMITTED, body.session_id)
        return {"recorded": True}

    def _parse_window(from_: str | None, to: str | None) -> tuple[dt.date, dt.date]:
        today = dt.datetime.now(dt.timezone.utc).date()
        try:
            window_from = dt.date.fromisoformat(from_) if from_ else dt.date(1970, 1, 1)
            window_to = dt.date.fromisoformat(to) if to else today
        except ValueError as exc:
            raise BadRangeError(f"bad date in window: {exc}") from exc
        return window_from, window_to

    @app.get("/api/v1/stats/pathways")
    def stats_pathways(request: Request):
        window_from, window_to = _parse_window(
            request.query_params.get("from"), request.query_params.get("to"))
        stats = analytics.pathway_stats(state.event_log.events(),
                                        window_from, window_to)
        return {
            "from": stats.window_from.isoformat(),
            "to": stats.window_to.isoformat(),
            "total": stats.total,
            "rows": [{"label": r.label, "count": r.count,
                      "percentage": r.percentage} for r in stats.rows],
            "role_total": stats.role_total,
            "tenant_percentage": stats.tenant_percentage,
            "landlord_percentage": stats.landlord_percentage,
        }

    @app.get("/api/v1/stats/feedback")
    def stats_feedback(request: Request):
        from_ = request.query_params.get("from")
        to = request.query_params.get("to")
        window_from, window_to = (None, None)
        if from_ or to:
            window_from, window_to = _parse_window(from_, to)
        stats = analytics.feedback_stats(state.feedback_log.records(),
                                         window_from, window_to)
        def q(s):
            return {"yes": s.yes, "no": s.no, "answered": s.answered,
                    "percentage_yes": s.percentage_yes}
        return {
            "total": stats.total,
            "with_issue_text": stats.with_issue_text,
            "found_helpful": q(stats.found_helpful),
            "understood_rights": q(stats.understood_rights),
            "would_recommend": q(stats.would_recommend),
        }

    @app.post("/api/v1/admin/reload")
    def admin_reload(body: ReloadBody,
                     x_admin_token: str | None = Header(default=None)):
        if not state.admin_token:
            return _error_response("ADMIN_DISABLED",
                                   "no admin token configured", 403)
        if x_admin_token != state.admin_token:
            return _error_response("BAD_TOKEN", "admin token mismatch", 401)
        bundle = state.load_bundle_file(body.path)
        return {
            "reloaded": True,
            "title": bundle.metadata.title,
            "schema_id": bundle.schema.id,
            "schema_version": bundle.schema.version,
        }

    return app


def state_from_env(environ=os.environ) -> ServiceState:
    """Build service state from LEXPATH_* environment variables."""
    event_path = environ.get("LEXPATH_EVENT_LOG_PATH")
    feedback_path = f"{event_path}.feedback.jsonl" if event_path else None
    state = ServiceState(
        event_log=EventLog(event_path),
        feedback_log=FeedbackLog(feedback_path),
        admin_token=environ.get("LEXPATH_ADMIN_TOKEN"),
    )
    bundle_path = environ.get("LEXPATH_BUNDLE_PATH")
    if bundle_path:
        state.load_bundle_file(bundle_path)
    return state


def app_from_env() -> FastAPI:
    """Entry point for ``uvicorn lexpath.service:app_from_env --factory``."""
    return create_app(state_from_env())
