"""Anonymous usage analytics: events, pathway statistics, feedback.

Privacy is enforced structurally: event payloads only admit keys on a
per-kind allow-list, so free text can never leak into the event stream.
Feedback (which does contain free text) lives in separate records and is
sanitized on the way in.
"""
from __future__ import annotations

import datetime as dt
import enum
import json
import threading
import unicodedata
from dataclasses import dataclass, field
from typing import Any, Iterable

from .errors import BadRangeError, DisallowedPayloadError, ParseError, UnknownEventKindError


class EventKind(str, enum.Enum):
    PAGE_VIEW = "PAGE_VIEW"
    PATHWAY_SELECTED = "PATHWAY_SELECTED"
    QUESTION_ANSWERED = "QUESTION_ANSWERED"
    ANALYSIS_REACHED = "ANALYSIS_REACHED"
    FEEDBACK_SUBMITTED = "FEEDBACK_SUBMITTED"


ALLOWED_PAYLOAD_KEYS: dict[EventKind, frozenset[str]] = {
    EventKind.PAGE_VIEW: frozenset({"referrer_class"}),
    EventKind.PATHWAY_SELECTED: frozenset({"pathway_id", "pathway_label", "role"}),
    EventKind.QUESTION_ANSWERED: frozenset({"block_id", "answer_id"}),
    EventKind.ANALYSIS_REACHED: frozenset({"block_id"}),
    EventKind.FEEDBACK_SUBMITTED: frozenset(),
}

MAX_PAYLOAD_VALUE_CHARS = 200


@dataclass
class AnalyticsEvent:
    kind: EventKind
    timestamp: dt.datetime
    session_id: str | None = None
    payload: dict[str, str] = field(default_factory=dict)


def validate_event(event: AnalyticsEvent) -> None:
    """Reject events whose payload steps outside the allow-list for their
    kind, carries non-string values, or is implausibly long for a
    structured field."""
    allowed = ALLOWED_PAYLOAD_KEYS.get(event.kind)
    if allowed is None:
        raise UnknownEventKindError(f"unknown event kind {event.kind!r}")
    bad_keys = sorted(set(event.payload) - allowed)
    if bad_keys:
        raise DisallowedPayloadError(
            f"payload keys not allowed for {event.kind.value}: "
            + ", ".join(bad_keys), keys=bad_keys)
    for key, value in event.payload.items():
        if not isinstance(value, str):
            raise DisallowedPayloadError(
                f"payload value for {key!r} must be a string")
        if len(value) > MAX_PAYLOAD_VALUE_CHARS:
            raise DisallowedPayloadError(
                f"payload value for {key!r} exceeds {MAX_PAYLOAD_VALUE_CHARS} "
                "characters")


def parse_event_kind(raw: str) -> EventKind:
    try:
        return EventKind(raw)
    except ValueError:
        raise UnknownEventKindError(f"unknown event kind {raw!r}") from None


class EventLog:
    """Append-only event sink: an in-memory list, optionally mirrored to a
    JSON Lines file so restarts do not lose history."""

    def __init__(self, path: str | None = None):
        self._lock = threading.Lock()
        self._events: list[AnalyticsEvent] = []
        self._path = path
        if path is not None:
            self._load_existing(path)

    def _load_existing(self, path: str) -> None:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                lines = fh.read().splitlines()
        except FileNotFoundError:
            return
        for lineno, line in enumerate(lines, start=1):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
                event = AnalyticsEvent(
                    kind=parse_event_kind(raw["kind"]),
                    timestamp=dt.datetime.fromisoformat(raw["timestamp"]),
                    session_id=raw.get("session_id"),
                    payload=dict(raw.get("payload", {})),
                )
            except (KeyError, ValueError, TypeError, UnknownEventKindError) as exc:
                raise ParseError(f"event log line {lineno}: {exc}") from exc
            self._events.append(event)

    def record(self, event: AnalyticsEvent) -> None:
        validate_event(event)
        with self._lock:
            self._events.append(event)
            if self._path is not None:
                doc = {
                    "kind": event.kind.value,
                    "timestamp": event.timestamp.isoformat(),
                    "session_id": event.session_id,
                    "payload": event.payload,
                }
                with open(self._path, "a", encoding="utf-8") as fh:
                    fh.write(json.dumps(doc, ensure_ascii=False,
                                        sort_keys=True) + "\n")

    def events(self) -> list[AnalyticsEvent]:
        with self._lock:
            return list(self._events)

    def __len__(self) -> int:
        with self._lock:
            return len(self._events)


# --- percentage helpers ---------------------------------------------------

def largest_remainder_percentages(counts: list[int]) -> list[int]:
    """Integer percentages that always sum to 100 (for non-empty input).

    Each share gets the floor of its exact percentage; the leftover points
    go to the largest fractional remainders, ties broken toward larger
    counts then lower index, so the result is deterministic.
    """
    total = sum(counts)
    if total == 0:
        return [0] * len(counts)
    exact = [count * 100 / total for count in counts]
    floors = [int(x) for x in exact]
    leftover = 100 - sum(floors)
    order = sorted(range(len(counts)),
                   key=lambda i: (-(exact[i] - floors[i]), -counts[i], i))
    for i in order[:leftover]:
        floors[i] += 1
    return floors


def percent_round_half_up(part: int, whole: int) -> int:
    """Plain percentage rounded half up (17.5% -> 18%)."""
    if whole == 0:
        return 0
    return int(part * 100 / whole + 0.5)


# --- pathway statistics ---------------------------------------------------

@dataclass
class PathwayRow:
    label: str
    count: int
    percentage: int


@dataclass
class PathwayStats:
    window_from: dt.date
    window_to: dt.date
    total: int
    rows: list[PathwayRow]
    role_total: int
    tenant_percentage: int
    landlord_percentage: int


def _check_window(window_from: dt.date, window_to: dt.date) -> None:
    if window_from > window_to:
        raise BadRangeError(
            f"window start {window_from.isoformat()} is after end "
            f"{window_to.isoformat()}")


def pathway_stats(events: Iterable[AnalyticsEvent],
                  window_from: dt.date, window_to: dt.date) -> PathwayStats:
    """Share of pathway selections per pathway inside a day window
    (inclusive on both ends), plus the tenant/landlord split among
    selections that carried a role."""
    _check_window(window_from, window_to)
    label_counts: dict[str, int] = {}
    role_counts = {"tenant": 0, "landlord": 0}
    total = 0
    for event in events:
        if event.kind is not EventKind.PATHWAY_SELECTED:
            continue
        day = event.timestamp.date()
        if not window_from <= day <= window_to:
            continue
        total += 1
        label = (event.payload.get("pathway_label")
                 or event.payload.get("pathway_id") or "unknown")
        label_counts[label] = label_counts.get(label, 0) + 1
        role = event.payload.get("role")
        if role in role_counts:
            role_counts[role] += 1

    # Stable presentation order: biggest share first, ties by label.
    labels = sorted(label_counts, key=lambda lb: (-label_counts[lb], lb))
    percentages = largest_remainder_percentages([label_counts[lb] for lb in labels])
    rows = [PathwayRow(label=lb, count=label_counts[lb], percentage=pct)
            for lb, pct in zip(labels, percentages)]

    role_total = role_counts["tenant"] + role_counts["landlord"]
    tenant_pct, landlord_pct = largest_remainder_percentages(
        [role_counts["tenant"], role_counts["landlord"]]) if role_total else (0, 0)
    return PathwayStats(
        window_from=window_from,
        window_to=window_to,
        total=total,
        rows=rows,
        role_total=role_total,
        tenant_percentage=tenant_pct,
        landlord_percentage=landlord_pct,
    )


# --- feedback -------------------------------------------------------------

def sanitize_free_text(text: str) -> str:
    """Drop control characters; newlines and tabs become spaces."""
    out = []
    for ch in text:
        if ch in "\n\r\t":
            out.append(" ")
        elif unicodedata.category(ch) == "Cc":
            continue
        else:
            out.append(ch)
    return "".join(out).strip()


@dataclass
class FeedbackRecord:
    """One submitted feedback form.  Survey answers are optional booleans:
    None means the question was left blank."""

    timestamp: dt.datetime
    session_id: str | None = None
    issue_text: str = ""
    found_helpful: bool | None = None
    understood_rights: bool | None = None
    would_recommend: bool | None = None


class FeedbackLog:
    """Feedback records, kept apart from the event stream because they
    carry free text.  Same shape as EventLog: memory plus optional JSONL
    mirror."""

    def __init__(self, path: str | None = None):
        self._lock = threading.Lock()
        self._records: list[FeedbackRecord] = []
        self._path = path
        if path is not None:
            self._load_existing(path)

    def _load_existing(self, path: str) -> None:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                lines = fh.read().splitlines()
        except FileNotFoundError:
            return
        for lineno, line in enumerate(lines, start=1):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
                record = FeedbackRecord(
                    timestamp=dt.datetime.fromisoformat(raw["timestamp"]),
                    session_id=raw.get("session_id"),
                    issue_text=raw.get("issue_text", ""),
                    found_helpful=raw.get("found_helpful"),
                    understood_rights=raw.get("understood_rights"),
                    would_recommend=raw.get("would_recommend"),
                )
            except (KeyError, ValueError, TypeError) as exc:
                raise ParseError(f"feedback log line {lineno}: {exc}") from exc
            self._records.append(record)

    def record(self, record: FeedbackRecord) -> None:
        with self._lock:
            self._records.append(record)
            if self._path is not None:
                doc = {
                    "timestamp": record.timestamp.isoformat(),
                    "session_id": record.session_id,
                    "issue_text": record.issue_text,
                    "found_helpful": record.found_helpful,
                    "understood_rights": record.understood_rights,
                    "would_recommend": record.would_recommend,
                }
                with open(self._path, "a", encoding="utf-8") as fh:
                    fh.write(json.dumps(doc, ensure_ascii=False,
                                        sort_keys=True) + "\n")

    def records(self) -> list[FeedbackRecord]:
        with self._lock:
            return list(self._records)

    def __len__(self) -> int:
        with self._lock:
            return len(self._records)


@dataclass
class SurveyQuestionStats:
    yes: int
    no: int
    answered: int
    percentage_yes: int


@dataclass
class FeedbackStats:
    total: int
    with_issue_text: int
    found_helpful: SurveyQuestionStats
    understood_rights: SurveyQuestionStats
    would_recommend: SurveyQuestionStats


def _question_stats(records: list[FeedbackRecord], attr: str,
                    respondents: int) -> SurveyQuestionStats:
    yes = sum(1 for r in records if getattr(r, attr) is True)
    no = sum(1 for r in records if getattr(r, attr) is False)
    return SurveyQuestionStats(
        yes=yes, no=no, answered=yes + no,
        percentage_yes=percent_round_half_up(yes, respondents))


def feedback_stats(records: Iterable[FeedbackRecord],
                   window_from: dt.date | None = None,
                   window_to: dt.date | None = None) -> FeedbackStats:
    """Aggregate survey answers.  Percentages are of all respondents in
    the window, so a blank answer counts against the share."""
    if window_from is not None and window_to is not None:
        _check_window(window_from, window_to)
    kept = []
    for record in records:
        day = record.timestamp.date()
        if window_from is not None and day < window_from:
            continue
        if window_to is not None and day > window_to:
            continue
        kept.append(record)
    respondents = len(kept)
    return FeedbackStats(
        total=respondents,
        with_issue_text=sum(1 for r in kept if r.issue_text.strip()),
        found_helpful=_question_stats(kept, "found_helpful", respondents),
        understood_rights=_question_stats(kept, "understood_rights", respondents),
        would_recommend=_question_stats(kept, "would_recommend", respondents),
    )
