"""Exception hierarchy shared across the engine.

Every exception carries a stable ``code`` string so that callers (the CLI,
the HTTP service) can map failures to exit codes or status codes without
string-matching messages.
"""
from __future__ import annotations


class LexpathError(Exception):
    """Base class for all engine errors."""

    code = "ERROR"

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.message = message
        self.details = details

    def __str__(self) -> str:
        return self.message


# --- schema structure ---------------------------------------------------

class InvalidSchemaError(LexpathError):
    """A schema failed validation and cannot be used."""

    code = "INVALID_SCHEMA"


class NoStartError(LexpathError):
    code = "NO_START"


class UnknownBlockError(LexpathError):
    code = "UNKNOWN_BLOCK"


class WrongBlockKindError(LexpathError):
    """An operation hit a criterion block where a conclusion was required,
    or the other way around."""

    code = "WRONG_BLOCK_KIND"


class UnknownAnswerError(LexpathError):
    code = "UNKNOWN_ANSWER"


# --- case store ---------------------------------------------------------

class DuplicateCaseError(LexpathError):
    code = "DUPLICATE_CASE"


class UnknownCaseError(LexpathError):
    code = "UNKNOWN_CASE"


class DuplicateSummaryError(LexpathError):
    """A second summary for the same (case, block) pair."""

    code = "DUPLICATE_SUMMARY"


class EmptyTextError(LexpathError):
    code = "EMPTY_TEXT"


class SummaryTooLongError(LexpathError):
    code = "SUMMARY_TOO_LONG"


# --- sessions -----------------------------------------------------------

class SessionCompleteError(LexpathError):
    """Answer submitted to a session that already reached the end."""

    code = "SESSION_COMPLETE"


class SessionIncompleteError(LexpathError):
    """Analysis requested before the session reached the end."""

    code = "SESSION_INCOMPLETE"


class BadIndexError(LexpathError):
    code = "BAD_INDEX"


# --- retrieval ----------------------------------------------------------

class EmptyCorpusError(LexpathError):
    code = "EMPTY_CORPUS"


class EmptyQueryError(LexpathError):
    code = "EMPTY_QUERY"


# --- interchange --------------------------------------------------------

class ParseError(LexpathError):
    code = "PARSE_ERROR"


class UnknownFieldError(ParseError):
    """Strict import rejected a field it does not understand."""

    code = "UNKNOWN_FIELD"


class UnsupportedVersionError(LexpathError):
    code = "UNSUPPORTED_VERSION"


class BrokenReferencesError(LexpathError):
    """A summary points at a case or block that is not part of the bundle."""

    code = "BROKEN_REFERENCES"


# --- service ------------------------------------------------------------

class NoBundleError(LexpathError):
    """The service has no bundle loaded."""

    code = "NO_BUNDLE"


class UnknownSessionError(LexpathError):
    code = "UNKNOWN_SESSION"


class DisallowedPayloadError(LexpathError):
    """An analytics event carried payload keys outside the allow-list."""

    code = "DISALLOWED_PAYLOAD"


class UnknownEventKindError(LexpathError):
    code = "UNKNOWN_EVENT_KIND"


class BadRangeError(LexpathError):
    """A statistics query with an unusable date window."""

    code = "BAD_RANGE"
