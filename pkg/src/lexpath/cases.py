"""Prior cases and their links to schema blocks.

This is the case-based half of the engine: real decisions, summarized per
criterion (did the judge find it applied or not?) and per conclusion (what
did the judge order?).  Summaries are what interview prompts and analyses
show next to the abstract rules.
"""
from __future__ import annotations

import datetime as dt
import enum
from dataclasses import dataclass, field
from typing import Any

from .errors import (
    DuplicateCaseError,
    DuplicateSummaryError,
    EmptyTextError,
    SummaryTooLongError,
    UnknownBlockError,
    UnknownCaseError,
    WrongBlockKindError,
)
from .schema_model import ConclusionBlock, CriterionBlock, Schema

MAX_SUMMARY_CHARS = 1000


class Polarity(str, enum.Enum):
    APPLIED = "APPLIED"
    NOT_APPLIED = "NOT_APPLIED"


@dataclass
class CaseRecord:
    case_id: str
    citation: str
    decision_date: dt.date
    source_url: str | None = None
    full_text_ref: str | None = None
    extra: dict[str, Any] = field(default_factory=dict)


@dataclass
class CriterionSummary:
    """How one case treated one criterion."""

    case_id: str
    criterion_id: str
    polarity: Polarity
    summary: str
    extra: dict[str, Any] = field(default_factory=dict)


@dataclass
class OutcomeSummary:
    """What one case decided at one conclusion."""

    case_id: str
    conclusion_id: str
    summary: str
    extra: dict[str, Any] = field(default_factory=dict)


def _recency_key(record: CaseRecord) -> tuple[int, str]:
    # Newest first; same-day decisions ordered by case id for stability.
    return (-record.decision_date.toordinal(), record.case_id)


class CaseStore:
    """Cases plus their summaries, bound to one schema.

    Link operations verify every reference on the way in, so a store that
    accepted its data never holds a summary pointing at a missing case or
    at the wrong kind of block.
    """

    def __init__(self, schema: Schema):
        self.schema = schema
        self.cases: dict[str, CaseRecord] = {}
        self.criterion_summaries: dict[str, list[CriterionSummary]] = {}
        self.outcome_summaries: dict[str, list[OutcomeSummary]] = {}

    # --- ingestion ----------------------------------------------------

    def add_case(self, record: CaseRecord) -> None:
        if record.case_id in self.cases:
            raise DuplicateCaseError(
                f"case {record.case_id!r} already in store", case_id=record.case_id)
        self.cases[record.case_id] = record

    def _check_summary_text(self, text: str, what: str) -> None:
        if not text.strip():
            raise EmptyTextError(f"{what} is empty")
        if len(text) > MAX_SUMMARY_CHARS:
            raise SummaryTooLongError(
                f"{what} is {len(text)} characters, limit is {MAX_SUMMARY_CHARS}")

    def link_criterion_summary(self, summary: CriterionSummary) -> None:
        if summary.case_id not in self.cases:
            raise UnknownCaseError(
                f"no case {summary.case_id!r}", case_id=summary.case_id)
        block = self.schema.blocks.get(summary.criterion_id)
        if block is None:
            raise UnknownBlockError(
                f"no block {summary.criterion_id!r}", block_id=summary.criterion_id)
        if not isinstance(block, CriterionBlock):
            raise WrongBlockKindError(
                f"block {summary.criterion_id!r} is not a criterion block",
                block_id=summary.criterion_id)
        self._check_summary_text(summary.summary, "criterion summary")
        bucket = self.criterion_summaries.setdefault(summary.criterion_id, [])
        for existing in bucket:
            if existing.case_id == summary.case_id:
                raise DuplicateSummaryError(
                    f"case {summary.case_id!r} already has a summary for "
                    f"criterion {summary.criterion_id!r}",
                    case_id=summary.case_id, block_id=summary.criterion_id)
        bucket.append(summary)

    def link_outcome_summary(self, summary: OutcomeSummary) -> None:
        if summary.case_id not in self.cases:
            raise UnknownCaseError(
                f"no case {summary.case_id!r}", case_id=summary.case_id)
        block = self.schema.blocks.get(summary.conclusion_id)
        if block is None:
            raise UnknownBlockError(
                f"no block {summary.conclusion_id!r}", block_id=summary.conclusion_id)
        if not isinstance(block, ConclusionBlock):
            raise WrongBlockKindError(
                f"block {summary.conclusion_id!r} is not a conclusion block",
                block_id=summary.conclusion_id)
        self._check_summary_text(summary.summary, "outcome summary")
        bucket = self.outcome_summaries.setdefault(summary.conclusion_id, [])
        for existing in bucket:
            if existing.case_id == summary.case_id:
                raise DuplicateSummaryError(
                    f"case {summary.case_id!r} already has an outcome for "
                    f"conclusion {summary.conclusion_id!r}",
                    case_id=summary.case_id, block_id=summary.conclusion_id)
        bucket.append(summary)

    # --- queries ------------------------------------------------------

    def criterion_examples(
        self, criterion_id: str, cap: int = 5,
    ) -> tuple[list[tuple[CaseRecord, CriterionSummary]],
               list[tuple[CaseRecord, CriterionSummary]]]:
        """(applied, not_applied) example lists for a criterion, newest
        first, each capped at ``cap`` entries."""
        block = self.schema.blocks.get(criterion_id)
        if block is None:
            raise UnknownBlockError(f"no block {criterion_id!r}", block_id=criterion_id)
        if not isinstance(block, CriterionBlock):
            raise WrongBlockKindError(
                f"block {criterion_id!r} is not a criterion block", block_id=criterion_id)
        applied: list[tuple[CaseRecord, CriterionSummary]] = []
        not_applied: list[tuple[CaseRecord, CriterionSummary]] = []
        for summary in self.criterion_summaries.get(criterion_id, []):
            pair = (self.cases[summary.case_id], summary)
            if summary.polarity is Polarity.APPLIED:
                applied.append(pair)
            else:
                not_applied.append(pair)
        applied.sort(key=lambda pair: _recency_key(pair[0]))
        not_applied.sort(key=lambda pair: _recency_key(pair[0]))
        return applied[:cap], not_applied[:cap]

    def outcomes_for(
        self, conclusion_ids: list[str],
    ) -> list[tuple[CaseRecord, OutcomeSummary]]:
        """Outcome examples for a list of conclusions, kept in the given
        conclusion order, newest case first inside each conclusion.  A
        (case, conclusion) pair appears at most once even if the same
        conclusion id is passed twice."""
        out: list[tuple[CaseRecord, OutcomeSummary]] = []
        seen: set[tuple[str, str]] = set()
        for cid in conclusion_ids:
            block = self.schema.blocks.get(cid)
            if block is None:
                raise UnknownBlockError(f"no block {cid!r}", block_id=cid)
            if not isinstance(block, ConclusionBlock):
                raise WrongBlockKindError(
                    f"block {cid!r} is not a conclusion block", block_id=cid)
            pairs = [(self.cases[s.case_id], s)
                     for s in self.outcome_summaries.get(cid, [])]
            pairs.sort(key=lambda pair: _recency_key(pair[0]))
            for pair in pairs:
                key = (pair[1].case_id, pair[1].conclusion_id)
                if key not in seen:
                    seen.add(key)
                    out.append(pair)
        return out

    # --- integrity / equality ----------------------------------------

    def broken_references(self, schema: Schema | None = None) -> list[str]:
        """Human-readable descriptions of dangling summary references,
        checked against ``schema`` (default: the bound schema)."""
        schema = schema or self.schema
        problems = []
        for cid, bucket in self.criterion_summaries.items():
            block = schema.blocks.get(cid)
            if not isinstance(block, CriterionBlock):
                problems.append(f"criterion summaries attached to non-criterion {cid!r}")
            for s in bucket:
                if s.case_id not in self.cases:
                    problems.append(
                        f"criterion summary for {cid!r} references missing case {s.case_id!r}")
        for cid, bucket in self.outcome_summaries.items():
            block = schema.blocks.get(cid)
            if not isinstance(block, ConclusionBlock):
                problems.append(f"outcome summaries attached to non-conclusion {cid!r}")
            for s in bucket:
                if s.case_id not in self.cases:
                    problems.append(
                        f"outcome summary for {cid!r} references missing case {s.case_id!r}")
        return problems

    def __eq__(self, other: object) -> bool:
        # Order inside the per-block buckets is an ingestion artifact, so
        # equality compares contents, not insertion order.
        if not isinstance(other, CaseStore):
            return NotImplemented
        def crit_key(s: CriterionSummary):
            return (s.criterion_id, s.case_id)
        def out_key(s: OutcomeSummary):
            return (s.conclusion_id, s.case_id)
        mine = sorted((s for b in self.criterion_summaries.values() for s in b), key=crit_key)
        theirs = sorted((s for b in other.criterion_summaries.values() for s in b), key=crit_key)
        mine_o = sorted((s for b in self.outcome_summaries.values() for s in b), key=out_key)
        theirs_o = sorted((s for b in other.outcome_summaries.values() for s in b), key=out_key)
        return (self.cases == other.cases
                and mine == theirs
                and mine_o == theirs_o)

    def all_criterion_summaries(self) -> list[CriterionSummary]:
        return [s for b in self.criterion_summaries.values() for s in b]

    def all_outcome_summaries(self) -> list[OutcomeSummary]:
        return [s for b in self.outcome_summaries.values() for s in b]
