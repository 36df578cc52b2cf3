"""Command-line front door: validate, paths, suggest, serve, export.

Exit codes: 0 success, 1 domain problems (validation findings, unknown
ids, invalid schemas), 2 I/O or parse failures.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from .errors import (
    BrokenReferencesError,
    LexpathError,
    ParseError,
    UnsupportedVersionError,
)
from .interchange import export_bundle, read_bundle_file, read_corpus_file
from .retrieval import NswParams, build_index, exact_topk, suggest_cases
from .schema_model import ConclusionBlock, validate_schema
from .sessions import enumerate_paths

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_IO = 2


def _print_err(message: str) -> None:
    print(f"lexpath: {message}", file=sys.stderr)


def _load_bundle(path: str, strict: bool = False, check: bool = True):
    """Returns (bundle, exit_code); bundle is None when loading failed."""
    try:
        return read_bundle_file(path, strict=strict, check=check), EXIT_OK
    except (ParseError, UnsupportedVersionError) as exc:
        _print_err(f"cannot read {path}: {exc}")
        return None, EXIT_IO
    except OSError as exc:
        _print_err(f"cannot read {path}: {exc}")
        return None, EXIT_IO
    except LexpathError as exc:
        _print_err(f"{path}: [{exc.code}] {exc}")
        return None, EXIT_DOMAIN


def cmd_validate(args) -> int:
    try:
        bundle = read_bundle_file(args.bundle, strict=args.strict, check=False)
    except (ParseError, UnsupportedVersionError, OSError) as exc:
        _print_err(f"cannot read {args.bundle}: {exc}")
        return EXIT_IO
    except BrokenReferencesError as exc:
        if args.format == "json":
            print(json.dumps({"ok": False, "errors": [
                {"code": exc.code, "block_id": None, "message": exc.message}],
                "warnings": []}, indent=2))
        else:
            print(f"error BROKEN_REFERENCES: {exc.message}")
        return EXIT_DOMAIN
    except LexpathError as exc:
        _print_err(f"{args.bundle}: [{exc.code}] {exc}")
        return EXIT_DOMAIN

    report = validate_schema(bundle.schema)
    if args.format == "json":
        def rows(findings):
            return [{"code": f.code, "block_id": f.block_id,
                     "message": f.message} for f in findings]
        print(json.dumps({"ok": report.ok, "errors": rows(report.errors),
                          "warnings": rows(report.warnings)}, indent=2))
    else:
        for f in report.errors:
            where = f" at block {f.block_id}" if f.block_id else ""
            print(f"error {f.code}{where}: {f.message}")
        for f in report.warnings:
            where = f" at block {f.block_id}" if f.block_id else ""
            print(f"warning {f.code}{where}: {f.message}")
        if report.ok:
            n = len(bundle.schema.blocks)
            print(f"ok: {n} blocks, {len(report.warnings)} warning(s)")
    return EXIT_OK if report.ok else EXIT_DOMAIN


def cmd_paths(args) -> int:
    bundle, rc = _load_bundle(args.bundle, strict=args.strict)
    if bundle is None:
        return rc
    paths = enumerate_paths(bundle.schema)
    covered = set(bundle.store.outcome_summaries)
    uncovered = sorted({
        cid for _steps, stack in paths for cid in stack
        if not bundle.store.outcome_summaries.get(cid)})
    if args.format == "json":
        print(json.dumps({
            "paths": [{
                "steps": [{"criterion_id": s.criterion_id,
                           "answer_id": s.answer_id} for s in steps],
                "conclusions": list(stack),
            } for steps, stack in paths],
            "uncovered_conclusions": uncovered,
        }, indent=2))
        return EXIT_OK
    for i, (steps, stack) in enumerate(paths):
        trail = " ".join(f"{s.criterion_id}={s.answer_id}" for s in steps) or "(no questions)"
        ends = ", ".join(stack) if stack else "(no conclusions)"
        print(f"path {i}: {trail} -> {ends}")
    print(f"{len(paths)} path(s), {len(covered)} conclusion(s) with outcome "
          f"summaries, {len(uncovered)} uncovered")
    for cid in uncovered:
        print(f"uncovered conclusion: {cid}")
    return EXIT_OK


def cmd_suggest(args) -> int:
    bundle, rc = _load_bundle(args.bundle, strict=args.strict)
    if bundle is None:
        return rc
    try:
        records = read_corpus_file(args.corpus, strict=args.strict)
    except (ParseError, OSError) as exc:
        _print_err(f"cannot read {args.corpus}: {exc}")
        return EXIT_IO
    block = bundle.schema.blocks.get(args.block_id)
    if block is None:
        _print_err(f"no block {args.block_id!r} in schema {bundle.schema.id!r}")
        return EXIT_DOMAIN
    try:
        index = build_index(records, params=NswParams(seed=args.seed))
        query = block.title
        ranked = (exact_topk(index, query, k=args.k) if args.exact
                  else suggest_cases(index, query, k=args.k))
    except LexpathError as exc:
        _print_err(f"[{exc.code}] {exc}")
        return EXIT_DOMAIN
    by_id = {r.case_id: r for r in records}
    if args.format == "json":
        print(json.dumps({
            "block_id": args.block_id,
            "query": query,
            "results": [{
                "rank": i + 1,
                "case_id": s.case_id,
                "citation": by_id[s.case_id].citation,
                "score": round(s.score, 6),
                "best_sentence": s.best_sentence,
            } for i, s in enumerate(ranked)],
        }, indent=2))
        return EXIT_OK
    print(f"query: {query!r} over {len(records)} case(s)")
    for i, s in enumerate(ranked):
        print(f"{i + 1:3d}. {s.case_id}  score={s.score:.4f}  {s.best_sentence}")
    return EXIT_OK


def cmd_serve(args) -> int:
    # Imported here so the CLI works without the service extras loaded
    # (and so --help stays fast).
    import uvicorn

    from .service import create_app, state_from_env

    state = state_from_env()
    if args.bundle is not None:
        try:
            state.load_bundle_file(args.bundle)
        except (ParseError, UnsupportedVersionError, OSError) as exc:
            _print_err(f"cannot read {args.bundle}: {exc}")
            return EXIT_IO
        except LexpathError as exc:
            _print_err(f"{args.bundle}: [{exc.code}] {exc}")
            return EXIT_DOMAIN
    if state.bundle is None:
        _print_err("no bundle: pass one or set LEXPATH_BUNDLE_PATH")
        return EXIT_DOMAIN
    addr = args.addr or os.environ.get("LEXPATH_LISTEN_ADDR", "127.0.0.1:8000")
    host, _, port_text = addr.rpartition(":")
    if not host or not port_text.isdigit():
        _print_err(f"bad --addr {addr!r}, expected HOST:PORT")
        return EXIT_IO
    app = create_app(state)
    uvicorn.run(app, host=host, port=int(port_text), log_level="warning")
    return EXIT_OK


def cmd_export(args) -> int:
    bundle, rc = _load_bundle(args.input, strict=args.strict)
    if bundle is None:
        return rc
    try:
        data = export_bundle(bundle)
    except LexpathError as exc:
        _print_err(f"[{exc.code}] {exc}")
        return EXIT_DOMAIN
    if args.output == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        try:
            with open(args.output, "wb") as fh:
                fh.write(data)
        except OSError as exc:
            _print_err(f"cannot write {args.output}: {exc}")
            return EXIT_IO
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lexpath",
        description="Guided legal interviews over a reasoning schema with "
                    "case-law examples.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a bundle and print findings")
    p.add_argument("bundle")
    p.add_argument("--strict", action="store_true",
                   help="reject unknown fields in the document")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("paths", help="list every interview path and flag "
                                     "conclusions without outcome summaries")
    p.add_argument("bundle")
    p.add_argument("--strict", action="store_true")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_paths)

    p = sub.add_parser("suggest", help="rank corpus cases against a block "
                                       "title")
    p.add_argument("bundle")
    p.add_argument("corpus", help="JSON Lines corpus file")
    p.add_argument("block_id")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--seed", type=int, default=NswParams().seed,
                   help="graph build seed")
    p.add_argument("--exact", action="store_true",
                   help="use the exhaustive scan instead of the graph")
    p.add_argument("--strict", action="store_true")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_suggest)

    p = sub.add_parser("serve", help="run the HTTP API")
    p.add_argument("bundle", nargs="?", default=None,
                   help="bundle file (default: LEXPATH_BUNDLE_PATH)")
    p.add_argument("--addr", default=None,
                   help="HOST:PORT (default: LEXPATH_LISTEN_ADDR or "
                        "127.0.0.1:8000)")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("export", help="rewrite a bundle in canonical form")
    p.add_argument("input")
    p.add_argument("-o", "--output", default="-",
                   help="output file (default: stdout)")
    p.add_argument("--strict", action="store_true")
    p.set_defaults(func=cmd_export)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
