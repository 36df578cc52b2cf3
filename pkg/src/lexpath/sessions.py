"""Guided interview sessions over a validated schema.

A session walks the schema one criterion at a time.  Conclusion blocks are
never shown as questions: the walk pushes them onto the session's
conclusion stack and keeps going until it lands on the next criterion or
falls off the end of the graph.  Because validation guarantees acyclicity,
every session finishes after at most one step per block.
"""
from __future__ import annotations

import enum
import secrets
from dataclasses import dataclass, field

from .cases import CaseRecord, CaseStore, CriterionSummary, OutcomeSummary
from .errors import (
    BadIndexError,
    InvalidSchemaError,
    SessionCompleteError,
    SessionIncompleteError,
    UnknownAnswerError,
)
from .schema_model import (
    TERMINAL,
    Answer,
    ConclusionBlock,
    CriterionBlock,
    NextStep,
    Schema,
    validate_schema,
)

EXAMPLE_CAP = 5


class SessionStatus(str, enum.Enum):
    IN_PROGRESS = "IN_PROGRESS"
    COMPLETE = "COMPLETE"


@dataclass
class Step:
    """One answered criterion, in interview order."""

    criterion_id: str
    answer_id: str


@dataclass
class Session:
    session_id: str
    schema_id: str
    schema_version: str
    steps: list[Step] = field(default_factory=list)
    conclusion_stack: list[str] = field(default_factory=list)
    status: SessionStatus = SessionStatus.IN_PROGRESS
    # Id of the criterion block waiting for an answer; None once complete.
    cursor: str | None = None


@dataclass
class Prompt:
    """Everything the UI needs to pose one question."""

    criterion_id: str
    title: str
    description: str
    answers: list[Answer]
    applied_examples: list[tuple[CaseRecord, CriterionSummary]]
    not_applied_examples: list[tuple[CaseRecord, CriterionSummary]]


@dataclass
class AnalysisConclusion:
    conclusion_id: str
    title: str
    explanation: str


@dataclass
class AnsweredStep:
    """A step decorated with display text, for the answer-review screen."""

    index: int
    criterion_id: str
    criterion_title: str
    answer_id: str
    answer_label: str


@dataclass
class Analysis:
    """The end-of-interview report: conclusions reached, how similar cases
    ended, and what to do next.  ``past_outcomes_only`` reminds renderers
    that matched cases describe past decisions, not a prediction."""

    conclusions: list[AnalysisConclusion]
    matched_cases: list[tuple[CaseRecord, OutcomeSummary]]
    next_steps: list[NextStep]
    answers_review: list[AnsweredStep]
    past_outcomes_only: bool = True


def _require_valid(schema: Schema) -> None:
    report = validate_schema(schema)
    if not report.ok:
        codes = sorted({f.code for f in report.errors})
        raise InvalidSchemaError(
            "schema has validation errors: " + ", ".join(codes),
            report=report)


def _advance(schema: Schema, session: Session, target: str | None) -> None:
    """Follow edges from ``target`` until a criterion or TERMINAL, pushing
    every conclusion passed through."""
    while target is not TERMINAL:
        block = schema.blocks[target]
        if isinstance(block, CriterionBlock):
            session.cursor = target
            return
        session.conclusion_stack.append(target)
        target = block.next
    session.cursor = None
    session.status = SessionStatus.COMPLETE


def start_session(
    schema: Schema,
    store: CaseStore,
    session_id: str | None = None,
) -> tuple[Session, Prompt | Analysis]:
    """Create a session positioned at the first criterion.  Returns the
    session plus the first prompt (or a full analysis for the degenerate
    schema that is conclusions all the way down)."""
    _require_valid(schema)
    session = Session(
        session_id=session_id if session_id is not None else secrets.token_urlsafe(16),
        schema_id=schema.id,
        schema_version=schema.version,
    )
    _advance(schema, session, schema.start)
    return session, _current_payload(schema, store, session)


def build_prompt(schema: Schema, store: CaseStore, criterion_id: str) -> Prompt:
    block = schema.blocks[criterion_id]
    assert isinstance(block, CriterionBlock)
    applied, not_applied = store.criterion_examples(criterion_id, cap=EXAMPLE_CAP)
    return Prompt(
        criterion_id=criterion_id,
        title=block.title,
        description=block.description,
        answers=list(block.answers),
        applied_examples=applied,
        not_applied_examples=not_applied,
    )


def _current_payload(schema: Schema, store: CaseStore, session: Session) -> Prompt | Analysis:
    if session.status is SessionStatus.COMPLETE:
        return build_analysis(session, schema, store)
    return build_prompt(schema, store, session.cursor)


def answer(
    session: Session,
    answer_id: str,
    schema: Schema,
    store: CaseStore,
) -> Prompt | Analysis:
    """Record an answer to the pending criterion and advance.  The session
    is left untouched when the answer id is rejected."""
    if session.status is SessionStatus.COMPLETE:
        raise SessionCompleteError(
            f"session {session.session_id!r} already reached the end",
            session_id=session.session_id)
    block = schema.blocks[session.cursor]
    chosen = next((a for a in block.answers if a.id == answer_id), None)
    if chosen is None:
        raise UnknownAnswerError(
            f"block {session.cursor!r} has no answer {answer_id!r}",
            block_id=session.cursor, answer_id=answer_id)
    session.steps.append(Step(criterion_id=session.cursor, answer_id=answer_id))
    _advance(schema, session, chosen.next)
    return _current_payload(schema, store, session)


def replay(
    schema: Schema,
    store: CaseStore,
    steps: list[Step],
    session_id: str = "replay",
) -> Session:
    """Rebuild a session from scratch by applying ``steps`` in order."""
    session, _ = start_session(schema, store, session_id=session_id)
    for step in steps:
        if session.status is SessionStatus.COMPLETE:
            raise SessionCompleteError("steps continue past the end of the schema")
        if session.cursor != step.criterion_id:
            raise UnknownAnswerError(
                f"step expects criterion {step.criterion_id!r} but the session "
                f"is at {session.cursor!r}",
                block_id=session.cursor)
        answer(session, step.answer_id, schema, store)
    return session


def revise_answer(
    session: Session,
    step_index: int,
    new_answer_id: str,
    schema: Schema,
    store: CaseStore,
) -> Prompt | Analysis:
    """Change the answer at ``step_index`` and drop everything after it.

    The result is exactly the session that would exist had the interview
    been answered that way from the start.  On any error the session is
    unchanged."""
    if not 0 <= step_index < len(session.steps):
        raise BadIndexError(
            f"step index {step_index} out of range 0..{len(session.steps) - 1}",
            step_index=step_index)
    kept = session.steps[:step_index]
    rebuilt = replay(schema, store, kept, session_id=session.session_id)
    # The prefix ends on the criterion originally answered at step_index,
    # so the new answer must belong to that block.
    payload = answer(rebuilt, new_answer_id, schema, store)
    session.steps = rebuilt.steps
    session.conclusion_stack = rebuilt.conclusion_stack
    session.status = rebuilt.status
    session.cursor = rebuilt.cursor
    return payload


def build_analysis(session: Session, schema: Schema, store: CaseStore) -> Analysis:
    """Assemble the final report for a complete session."""
    if session.status is not SessionStatus.COMPLETE:
        raise SessionIncompleteError(
            f"session {session.session_id!r} is still in progress",
            session_id=session.session_id)
    conclusions = []
    for cid in session.conclusion_stack:
        block = schema.blocks[cid]
        conclusions.append(AnalysisConclusion(
            conclusion_id=cid, title=block.title, explanation=block.explanation))
    matched = store.outcomes_for(list(session.conclusion_stack))

    # Next steps from every reached conclusion, deduplicated by title with
    # the first occurrence winning, so shared boilerplate steps appear once.
    next_steps: list[NextStep] = []
    seen_titles: set[str] = set()
    for cid in session.conclusion_stack:
        block = schema.blocks[cid]
        for step in block.next_steps:
            if step.title not in seen_titles:
                seen_titles.add(step.title)
                next_steps.append(step)

    review = []
    for i, step in enumerate(session.steps):
        block = schema.blocks[step.criterion_id]
        label = next(a.label for a in block.answers if a.id == step.answer_id)
        review.append(AnsweredStep(
            index=i,
            criterion_id=step.criterion_id,
            criterion_title=block.title,
            answer_id=step.answer_id,
            answer_label=label,
        ))
    return Analysis(
        conclusions=conclusions,
        matched_cases=matched,
        next_steps=next_steps,
        answers_review=review,
    )


def enumerate_paths(schema: Schema) -> list[tuple[list[Step], list[str]]]:
    """Every root-to-terminal path as (steps, conclusion stack).

    Paths come out in depth-first order following answer order, which makes
    the listing stable for a given schema.  Intended for authoring review
    and coverage checks; path counts can grow exponentially with depth, so
    keep this off the request path for large schemas.
    """
    _require_valid(schema)
    paths: list[tuple[list[Step], list[str]]] = []

    def walk(target: str | None, steps: list[Step], stack: list[str]) -> None:
        while target is not TERMINAL:
            block = schema.blocks[target]
            if isinstance(block, CriterionBlock):
                for ans in block.answers:
                    walk(ans.next,
                         steps + [Step(criterion_id=target, answer_id=ans.id)],
                         list(stack))
                return
            stack.append(target)
            target = block.next
        paths.append((steps, stack))

    walk(schema.start, [], [])
    return paths
