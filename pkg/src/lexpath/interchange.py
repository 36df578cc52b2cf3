"""Versioned on-disk formats: the bundle document and the sentence corpus.

A bundle carries everything one jurisdiction/domain needs at runtime:
metadata, the reasoning schema, the case registry and all summaries.
Export is canonical (sorted keys, compact separators, UTF-8, no ASCII
escaping) so that the same bundle always produces identical bytes, which
makes diffs and content hashes meaningful.

The corpus format is JSON Lines, one case per line with its sentences,
feeding the retrieval index.
"""
from __future__ import annotations

import datetime as dt
import json
from dataclasses import dataclass, field
from typing import Any, Callable

from .cases import CaseRecord, CaseStore, CriterionSummary, OutcomeSummary, Polarity
from .errors import (
    BrokenReferencesError,
    InvalidSchemaError,
    ParseError,
    UnknownBlockError,
    UnknownCaseError,
    UnknownFieldError,
    UnsupportedVersionError,
    WrongBlockKindError,
)
from .schema_model import (
    Answer,
    ConclusionBlock,
    CriterionBlock,
    NextStep,
    Schema,
    validate_schema,
)

FORMAT_VERSION = 1

# Hook for future format bumps: maps an old version to a function that
# rewrites a document of that version into version + 1.
MIGRATIONS: dict[int, Callable[[dict], dict]] = {}


@dataclass
class BundleMetadata:
    title: str
    locale: str
    published_date: dt.date
    extra: dict[str, Any] = field(default_factory=dict)


@dataclass
class Bundle:
    metadata: BundleMetadata
    schema: Schema
    store: CaseStore
    format_version: int = FORMAT_VERSION
    extra: dict[str, Any] = field(default_factory=dict)


@dataclass
class CorpusRecord:
    """One decided case with the sentences extracted from its full text."""

    case_id: str
    citation: str
    decision_date: dt.date
    sentences: list[str]
    extra: dict[str, Any] = field(default_factory=dict)


# --- canonical serialization ---------------------------------------------

def canonical_json_bytes(doc: Any) -> bytes:
    text = json.dumps(doc, ensure_ascii=False, sort_keys=True,
                      separators=(",", ":"))
    return text.encode("utf-8")


def _merge_extra(obj: dict, extra: dict[str, Any]) -> dict:
    for key in extra:
        if key in obj:
            raise ParseError(f"extra field {key!r} shadows a built-in field")
    obj.update(extra)
    return obj


def _answer_doc(ans: Answer) -> dict:
    doc: dict[str, Any] = {"id": ans.id, "label": ans.label}
    if ans.next is not None:
        doc["next"] = ans.next
    if ans.pathway_id is not None:
        doc["pathway_id"] = ans.pathway_id
    if ans.role_tag is not None:
        doc["role_tag"] = ans.role_tag
    return _merge_extra(doc, ans.extra)


def _block_doc(block) -> dict:
    if isinstance(block, CriterionBlock):
        doc: dict[str, Any] = {
            "kind": "criterion",
            "title": block.title,
            "description": block.description,
            "answers": [_answer_doc(a) for a in block.answers],
        }
    else:
        doc = {
            "kind": "conclusion",
            "title": block.title,
            "explanation": block.explanation,
            "next_steps": [
                _merge_extra({"title": s.title, "text": s.text}, s.extra)
                for s in block.next_steps
            ],
        }
        if block.next is not None:
            doc["next"] = block.next
    return _merge_extra(doc, block.extra)


def bundle_to_document(bundle: Bundle) -> dict:
    schema = bundle.schema
    store = bundle.store
    schema_doc = _merge_extra({
        "id": schema.id,
        "version": schema.version,
        "locale": schema.locale,
        "start": schema.start,
        "blocks": {bid: _block_doc(b) for bid, b in schema.blocks.items()},
    }, schema.extra)

    case_docs = []
    for case in sorted(store.cases.values(), key=lambda c: c.case_id):
        doc: dict[str, Any] = {
            "case_id": case.case_id,
            "citation": case.citation,
            "decision_date": case.decision_date.isoformat(),
        }
        if case.source_url is not None:
            doc["source_url"] = case.source_url
        if case.full_text_ref is not None:
            doc["full_text_ref"] = case.full_text_ref
        case_docs.append(_merge_extra(doc, case.extra))

    crit_docs = []
    for s in sorted(store.all_criterion_summaries(),
                    key=lambda s: (s.criterion_id, s.case_id)):
        crit_docs.append(_merge_extra({
            "case_id": s.case_id,
            "criterion_id": s.criterion_id,
            "polarity": s.polarity.value,
            "summary": s.summary,
        }, s.extra))

    out_docs = []
    for s in sorted(store.all_outcome_summaries(),
                    key=lambda s: (s.conclusion_id, s.case_id)):
        out_docs.append(_merge_extra({
            "case_id": s.case_id,
            "conclusion_id": s.conclusion_id,
            "summary": s.summary,
        }, s.extra))

    meta_doc = _merge_extra({
        "title": bundle.metadata.title,
        "locale": bundle.metadata.locale,
        "published_date": bundle.metadata.published_date.isoformat(),
    }, bundle.metadata.extra)

    return _merge_extra({
        "format_version": bundle.format_version,
        "metadata": meta_doc,
        "schema": schema_doc,
        "cases": case_docs,
        "criterion_summaries": crit_docs,
        "outcome_summaries": out_docs,
    }, bundle.extra)


def export_bundle(bundle: Bundle) -> bytes:
    """Serialize to canonical bytes.  Refuses schemas with validation
    errors and stores with dangling references, so a written bundle is
    loadable by construction."""
    report = validate_schema(bundle.schema)
    if not report.ok:
        codes = sorted({f.code for f in report.errors})
        raise InvalidSchemaError(
            "cannot export: schema has errors: " + ", ".join(codes), report=report)
    problems = bundle.store.broken_references(bundle.schema)
    if problems:
        raise BrokenReferencesError(
            "cannot export: " + "; ".join(problems[:5]), problems=problems)
    return canonical_json_bytes(bundle_to_document(bundle)) + b"\n"


# --- parsing --------------------------------------------------------------

def _typename(value: Any) -> str:
    return type(value).__name__


def _take(obj: dict, key: str, path: str, kind: type, required: bool = True, default=None):
    if key not in obj:
        if required:
            raise ParseError(f"{path}: missing required field {key!r}")
        return default
    value = obj.pop(key)
    if kind is float:
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ParseError(f"{path}.{key}: expected number, got {_typename(value)}")
        return value
    if not isinstance(value, kind) or (kind is int and isinstance(value, bool)):
        raise ParseError(
            f"{path}.{key}: expected {kind.__name__}, got {_typename(value)}")
    return value


def _take_date(obj: dict, key: str, path: str) -> dt.date:
    raw = _take(obj, key, path, str)
    try:
        return dt.date.fromisoformat(raw)
    except ValueError as exc:
        raise ParseError(f"{path}.{key}: not an ISO date: {raw!r}") from exc


def _leftover(obj: dict, path: str, strict: bool) -> dict[str, Any]:
    if obj and strict:
        keys = ", ".join(sorted(obj))
        raise UnknownFieldError(f"{path}: unknown field(s): {keys}")
    return dict(obj)


def _parse_answer(doc: Any, path: str, strict: bool) -> Answer:
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: expected object, got {_typename(doc)}")
    doc = dict(doc)
    ans = Answer(
        id=_take(doc, "id", path, str),
        label=_take(doc, "label", path, str),
        next=_take(doc, "next", path, str, required=False),
        pathway_id=_take(doc, "pathway_id", path, str, required=False),
        role_tag=_take(doc, "role_tag", path, str, required=False),
    )
    ans.extra = _leftover(doc, path, strict)
    return ans


def _parse_block(bid: str, doc: Any, strict: bool):
    path = f"schema.blocks[{bid!r}]"
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: expected object, got {_typename(doc)}")
    doc = dict(doc)
    kind = _take(doc, "kind", path, str)
    if kind == "criterion":
        answers_raw = _take(doc, "answers", path, list)
        answers = [_parse_answer(a, f"{path}.answers[{i}]", strict)
                   for i, a in enumerate(answers_raw)]
        block = CriterionBlock(
            id=bid,
            title=_take(doc, "title", path, str),
            description=_take(doc, "description", path, str, required=False, default=""),
            answers=answers,
        )
    elif kind == "conclusion":
        steps_raw = _take(doc, "next_steps", path, list, required=False, default=[])
        steps = []
        for i, s in enumerate(steps_raw):
            spath = f"{path}.next_steps[{i}]"
            if not isinstance(s, dict):
                raise ParseError(f"{spath}: expected object, got {_typename(s)}")
            s = dict(s)
            step = NextStep(title=_take(s, "title", spath, str),
                            text=_take(s, "text", spath, str))
            step.extra = _leftover(s, spath, strict)
            steps.append(step)
        block = ConclusionBlock(
            id=bid,
            title=_take(doc, "title", path, str),
            explanation=_take(doc, "explanation", path, str),
            next_steps=steps,
            next=_take(doc, "next", path, str, required=False),
        )
    else:
        raise ParseError(f"{path}: unknown block kind {kind!r}")
    block.extra = _leftover(doc, path, strict)
    return block


def _parse_schema(doc: Any, strict: bool) -> Schema:
    path = "schema"
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: expected object, got {_typename(doc)}")
    doc = dict(doc)
    blocks_raw = _take(doc, "blocks", path, dict)
    blocks = {}
    for bid in sorted(blocks_raw):
        if not isinstance(bid, str):
            raise ParseError(f"{path}.blocks: block ids must be strings")
        blocks[bid] = _parse_block(bid, blocks_raw[bid], strict)
    schema = Schema(
        id=_take(doc, "id", path, str),
        version=_take(doc, "version", path, str),
        locale=_take(doc, "locale", path, str),
        start=_take(doc, "start", path, str),
        blocks=blocks,
    )
    schema.extra = _leftover(doc, path, strict)
    return schema


def parse_document(doc: Any, *, strict: bool = False,
                   check: bool = True) -> Bundle:
    """Build a Bundle from a decoded JSON document.  Summary references
    are always verified; with ``check`` (the default) a schema that fails
    validation is refused too.  ``check=False`` exists for tools that want
    to load a broken schema in order to report its findings."""
    if not isinstance(doc, dict):
        raise ParseError(f"bundle: expected object, got {_typename(doc)}")
    doc = dict(doc)
    version = _take(doc, "format_version", "bundle", int)
    while version in MIGRATIONS and version != FORMAT_VERSION:
        doc = MIGRATIONS[version](doc)
        version = _take(doc, "format_version", "bundle", int)
    if version != FORMAT_VERSION:
        raise UnsupportedVersionError(
            f"bundle format_version {version} is not supported "
            f"(current: {FORMAT_VERSION})", version=version)

    meta_raw = _take(doc, "metadata", "bundle", dict)
    meta_raw = dict(meta_raw)
    metadata = BundleMetadata(
        title=_take(meta_raw, "title", "metadata", str),
        locale=_take(meta_raw, "locale", "metadata", str),
        published_date=_take_date(meta_raw, "published_date", "metadata"),
    )
    metadata.extra = _leftover(meta_raw, "metadata", strict)

    schema = _parse_schema(_take(doc, "schema", "bundle", dict), strict)
    if check:
        report = validate_schema(schema)
        if not report.ok:
            codes = sorted({f.code for f in report.errors})
            raise InvalidSchemaError(
                "bundle schema has errors: " + ", ".join(codes), report=report)

    store = CaseStore(schema)
    for i, raw in enumerate(_take(doc, "cases", "bundle", list)):
        path = f"cases[{i}]"
        if not isinstance(raw, dict):
            raise ParseError(f"{path}: expected object, got {_typename(raw)}")
        raw = dict(raw)
        case = CaseRecord(
            case_id=_take(raw, "case_id", path, str),
            citation=_take(raw, "citation", path, str),
            decision_date=_take_date(raw, "decision_date", path),
            source_url=_take(raw, "source_url", path, str, required=False),
            full_text_ref=_take(raw, "full_text_ref", path, str, required=False),
        )
        case.extra = _leftover(raw, path, strict)
        store.add_case(case)

    for i, raw in enumerate(_take(doc, "criterion_summaries", "bundle", list)):
        path = f"criterion_summaries[{i}]"
        if not isinstance(raw, dict):
            raise ParseError(f"{path}: expected object, got {_typename(raw)}")
        raw = dict(raw)
        polarity_raw = _take(raw, "polarity", path, str)
        try:
            polarity = Polarity(polarity_raw)
        except ValueError as exc:
            raise ParseError(f"{path}.polarity: unknown value {polarity_raw!r}") from exc
        summary = CriterionSummary(
            case_id=_take(raw, "case_id", path, str),
            criterion_id=_take(raw, "criterion_id", path, str),
            polarity=polarity,
            summary=_take(raw, "summary", path, str),
        )
        summary.extra = _leftover(raw, path, strict)
        try:
            store.link_criterion_summary(summary)
        except (UnknownCaseError, UnknownBlockError, WrongBlockKindError) as exc:
            raise BrokenReferencesError(f"{path}: {exc}") from exc

    for i, raw in enumerate(_take(doc, "outcome_summaries", "bundle", list)):
        path = f"outcome_summaries[{i}]"
        if not isinstance(raw, dict):
            raise ParseError(f"{path}: expected object, got {_typename(raw)}")
        raw = dict(raw)
        summary = OutcomeSummary(
            case_id=_take(raw, "case_id", path, str),
            conclusion_id=_take(raw, "conclusion_id", path, str),
            summary=_take(raw, "summary", path, str),
        )
        summary.extra = _leftover(raw, path, strict)
        try:
            store.link_outcome_summary(summary)
        except (UnknownCaseError, UnknownBlockError, WrongBlockKindError) as exc:
            raise BrokenReferencesError(f"{path}: {exc}") from exc

    bundle = Bundle(metadata=metadata, schema=schema, store=store,
                    format_version=FORMAT_VERSION)
    bundle.extra = _leftover(doc, "bundle", strict)
    return bundle


def import_bundle(data: bytes | str, *, strict: bool = False,
                  check: bool = True) -> Bundle:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"bundle is not valid UTF-8: {exc}") from exc
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(f"bundle is not valid JSON: {exc}") from exc
    return parse_document(doc, strict=strict, check=check)


def read_bundle_file(path, *, strict: bool = False, check: bool = True) -> Bundle:
    with open(path, "rb") as fh:
        return import_bundle(fh.read(), strict=strict, check=check)


def write_bundle_file(path, bundle: Bundle) -> None:
    data = export_bundle(bundle)
    with open(path, "wb") as fh:
        fh.write(data)


# --- corpus (JSON Lines) --------------------------------------------------

def dump_corpus(records: list[CorpusRecord]) -> bytes:
    lines = []
    for rec in records:
        doc = _merge_extra({
            "case_id": rec.case_id,
            "citation": rec.citation,
            "decision_date": rec.decision_date.isoformat(),
            "sentences": list(rec.sentences),
        }, rec.extra)
        lines.append(canonical_json_bytes(doc))
    return b"\n".join(lines) + b"\n" if lines else b""


def load_corpus(data: bytes | str, *, strict: bool = False) -> list[CorpusRecord]:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"corpus is not valid UTF-8: {exc}") from exc
    records: list[CorpusRecord] = []
    seen: set[str] = set()
    for lineno, line in enumerate(data.splitlines(), start=1):
        if not line.strip():
            continue
        path = f"corpus line {lineno}"
        try:
            raw = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise ParseError(f"{path}: expected object, got {_typename(raw)}")
        raw = dict(raw)
        sentences_raw = _take(raw, "sentences", path, list)
        sentences = []
        for i, s in enumerate(sentences_raw):
            if not isinstance(s, str):
                raise ParseError(f"{path}.sentences[{i}]: expected string")
            sentences.append(s)
        rec = CorpusRecord(
            case_id=_take(raw, "case_id", path, str),
            citation=_take(raw, "citation", path, str),
            decision_date=_take_date(raw, "decision_date", path),
            sentences=sentences,
        )
        rec.extra = _leftover(raw, path, strict)
        if rec.case_id in seen:
            raise ParseError(f"{path}: duplicate case_id {rec.case_id!r}")
        seen.add(rec.case_id)
        records.append(rec)
    return records


def read_corpus_file(path, *, strict: bool = False) -> list[CorpusRecord]:
    with open(path, "rb") as fh:
        return load_corpus(fh.read(), strict=strict)


def write_corpus_file(path, records: list[CorpusRecord]) -> None:
    with open(path, "wb") as fh:
        fh.write(dump_corpus(records))
