"""Hybrid rule-based/case-based engine for legal decision support.

The engine walks users through a reasoning schema (a DAG of criterion
questions and conclusion blocks) while showing, at each step, how judges
treated the same criterion in past cases.  Sub-modules:

- ``schema_model``: blocks, edges, validation
- ``cases``: case records and per-block summaries
- ``sessions``: interview state machine, prompts, analyses
- ``retrieval``: sentence-similarity case suggestion
- ``interchange``: canonical bundle format and sentence corpora
- ``analytics``: anonymous usage events and statistics
- ``service``: HTTP API
- ``fixtures``: demo content and synthetic generators
"""
from .cases import CaseRecord, CaseStore, CriterionSummary, OutcomeSummary, Polarity
from .errors import LexpathError
from .interchange import (
    Bundle,
    BundleMetadata,
    CorpusRecord,
    export_bundle,
    import_bundle,
    read_bundle_file,
    write_bundle_file,
)
from .schema_model import (
    TERMINAL,
    Answer,
    ConclusionBlock,
    CriterionBlock,
    NextStep,
    Schema,
    ValidationReport,
    validate_schema,
)
from .sessions import (
    Analysis,
    Prompt,
    Session,
    SessionStatus,
    Step,
    answer,
    build_analysis,
    enumerate_paths,
    revise_answer,
    start_session,
)

__version__ = "0.1.0"

__all__ = [
    "Analysis",
    "Answer",
    "Bundle",
    "BundleMetadata",
    "CaseRecord",
    "CaseStore",
    "ConclusionBlock",
    "CorpusRecord",
    "CriterionBlock",
    "CriterionSummary",
    "LexpathError",
    "NextStep",
    "OutcomeSummary",
    "Polarity",
    "Prompt",
    "Schema",
    "Session",
    "SessionStatus",
    "Step",
    "TERMINAL",
    "ValidationReport",
    "answer",
    "build_analysis",
    "enumerate_paths",
    "export_bundle",
    "import_bundle",
    "read_bundle_file",
    "revise_answer",
    "start_session",
    "validate_schema",
    "write_bundle_file",
]
