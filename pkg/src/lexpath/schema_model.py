"""Reasoning schema: a directed acyclic graph of interview blocks.

A schema is the rule-based half of the engine.  Criterion blocks ask the
user a question and branch on the answer; conclusion blocks state a legal
consequence and advance automatically.  Every path from the start block
ends at TERMINAL (modelled as ``None``), which is what makes a guided
interview guaranteed to finish.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Any, Iterator, Union

from .errors import NoStartError, UnknownAnswerError, UnknownBlockError, WrongBlockKindError

# Edge target meaning "the interview ends here".
TERMINAL = None


@dataclass
class Answer:
    """One selectable option on a criterion block.

    ``pathway_id`` and ``role_tag`` are optional authoring-time markers:
    when a session picks an answer carrying them, the service emits a
    pathway-selection analytics event.  They have no effect on traversal.
    """

    id: str
    label: str
    next: str | None = TERMINAL
    pathway_id: str | None = None
    role_tag: str | None = None
    extra: dict[str, Any] = field(default_factory=dict)


@dataclass
class CriterionBlock:
    id: str
    title: str
    answers: list[Answer]
    description: str = ""
    extra: dict[str, Any] = field(default_factory=dict)


@dataclass
class NextStep:
    """A recommended action attached to a conclusion (e.g. where to file)."""

    title: str
    text: str
    extra: dict[str, Any] = field(default_factory=dict)


@dataclass
class ConclusionBlock:
    id: str
    title: str
    explanation: str
    next_steps: list[NextStep] = field(default_factory=list)
    next: str | None = TERMINAL
    extra: dict[str, Any] = field(default_factory=dict)


Block = Union[CriterionBlock, ConclusionBlock]


@dataclass
class Schema:
    id: str
    version: str
    locale: str
    blocks: dict[str, Block]
    start: str
    extra: dict[str, Any] = field(default_factory=dict)


@dataclass
class Finding:
    """One validation problem, tied to a block where that makes sense."""

    code: str
    block_id: str | None
    message: str


@dataclass
class ValidationReport:
    errors: list[Finding] = field(default_factory=list)
    warnings: list[Finding] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def codes(self) -> set[str]:
        return {f.code for f in self.errors} | {f.code for f in self.warnings}


def _conclusion_targets(block: ConclusionBlock) -> list[str | None]:
    """All outgoing targets of a conclusion block.

    A well-formed conclusion has a single ``next``.  Authoring tools and
    the lenient importer may hand us a list/tuple in that slot; we surface
    that as BAD_CONCLUSION_FANOUT instead of crashing, so validation can
    report the defect like any other.
    """
    nxt = block.next
    if isinstance(nxt, (list, tuple)):
        return list(nxt)
    return [nxt]


def outgoing_edges(block: Block) -> list[str]:
    """Edge targets of a block, TERMINAL excluded."""
    if isinstance(block, CriterionBlock):
        targets: list[str | None] = [a.next for a in block.answers]
    else:
        targets = _conclusion_targets(block)
    return [t for t in targets if t is not TERMINAL]


def iter_edges(schema: Schema) -> Iterator[tuple[str, str]]:
    """All (source, target) edges with non-terminal targets."""
    for bid, block in schema.blocks.items():
        for t in outgoing_edges(block):
            yield bid, t


def _strongly_connected_components(nodes: list[str], adj: dict[str, list[str]]) -> list[list[str]]:
    """Tarjan's algorithm, iterative to survive deep schemas."""
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    sccs: list[list[str]] = []
    counter = 0

    for root in nodes:
        if root in index:
            continue
        work: list[tuple[str, int]] = [(root, 0)]
        while work:
            node, ei = work[-1]
            if ei == 0:
                index[node] = low[node] = counter
                counter += 1
                stack.append(node)
                on_stack.add(node)
            advanced = False
            neighbors = adj.get(node, [])
            while ei < len(neighbors):
                nxt = neighbors[ei]
                ei += 1
                if nxt not in index:
                    work[-1] = (node, ei)
                    work.append((nxt, 0))
                    advanced = True
                    break
                if nxt in on_stack:
                    low[node] = min(low[node], index[nxt])
            if advanced:
                continue
            work.pop()
            if low[node] == index[node]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == node:
                        break
                sccs.append(comp)
            if work:
                parent, _ = work[-1]
                low[parent] = min(low[parent], low[node])
    return sccs


def validate_schema(schema: Schema) -> ValidationReport:
    """Structural validation.  Pure: the same schema yields the same report.

    Errors make a schema unusable (cycles, dangling edges, missing start,
    conclusions with more than one outgoing edge, required text missing).
    Warnings flag authoring smells (unreachable blocks, single-answer
    criteria) but do not block use.
    """
    report = ValidationReport()
    blocks = schema.blocks

    if not schema.start or schema.start not in blocks:
        report.errors.append(Finding(
            "NO_START", None,
            f"start block {schema.start!r} is not in the schema"))

    for bid, block in blocks.items():
        if isinstance(block, CriterionBlock):
            if not block.title.strip():
                report.errors.append(Finding(
                    "EMPTY_TEXT", bid, "criterion title is empty"))
            if not block.answers:
                report.errors.append(Finding(
                    "NO_ANSWERS", bid, "criterion has no answers"))
            elif len(block.answers) == 1:
                report.warnings.append(Finding(
                    "SINGLE_ANSWER", bid, "criterion has only one answer"))
            seen_answer_ids: set[str] = set()
            for ans in block.answers:
                if not ans.label.strip():
                    report.errors.append(Finding(
                        "EMPTY_TEXT", bid, f"answer {ans.id!r} has an empty label"))
                if ans.id in seen_answer_ids:
                    report.errors.append(Finding(
                        "DUPLICATE_ANSWER", bid, f"answer id {ans.id!r} repeats"))
                seen_answer_ids.add(ans.id)
        else:
            if not block.title.strip():
                report.errors.append(Finding(
                    "EMPTY_TEXT", bid, "conclusion title is empty"))
            if not block.explanation.strip():
                report.errors.append(Finding(
                    "EMPTY_TEXT", bid, "conclusion explanation is empty"))
            targets = _conclusion_targets(block)
            if len(targets) > 1:
                report.errors.append(Finding(
                    "BAD_CONCLUSION_FANOUT", bid,
                    f"conclusion has {len(targets)} outgoing edges, at most 1 allowed"))
        for target in outgoing_edges(block):
            if target not in blocks:
                report.errors.append(Finding(
                    "DANGLING_EDGE", bid,
                    f"edge from {bid!r} points at unknown block {target!r}"))

    # Cycle detection over edges whose targets exist.  Dangling edges are
    # already reported above and cannot be part of a cycle.
    adj = {bid: [t for t in outgoing_edges(b) if t in blocks]
           for bid, b in blocks.items()}
    node_order = list(blocks)
    for comp in _strongly_connected_components(node_order, adj):
        is_cycle = len(comp) > 1 or comp[0] in adj.get(comp[0], [])
        if is_cycle:
            members = sorted(comp)
            report.errors.append(Finding(
                "CYCLE", members[0],
                "cycle through blocks: " + ", ".join(members)))

    if schema.start in blocks:
        reached = _reachable_from(schema, schema.start)
        for bid in blocks:
            if bid not in reached:
                report.warnings.append(Finding(
                    "UNREACHABLE", bid, f"block {bid!r} cannot be reached from start"))

    return report


def _reachable_from(schema: Schema, start: str) -> set[str]:
    seen = {start}
    queue = deque([start])
    while queue:
        bid = queue.popleft()
        block = schema.blocks.get(bid)
        if block is None:
            continue
        for target in outgoing_edges(block):
            if target in schema.blocks and target not in seen:
                seen.add(target)
                queue.append(target)
    return seen


def reachable_blocks(schema: Schema) -> set[str]:
    """Ids of blocks reachable from the start block (start included)."""
    if not schema.start or schema.start not in schema.blocks:
        raise NoStartError(f"start block {schema.start!r} is not in the schema")
    return _reachable_from(schema, schema.start)


def next_block(schema: Schema, at: str, chosen: str | None = None) -> str | None:
    """Follow one edge.  For a criterion block ``chosen`` names the answer;
    for a conclusion block it must be None.  Returns the target block id or
    TERMINAL."""
    block = schema.blocks.get(at)
    if block is None:
        raise UnknownBlockError(f"no block with id {at!r}", block_id=at)
    if isinstance(block, CriterionBlock):
        if chosen is None:
            raise WrongBlockKindError(
                f"block {at!r} is a criterion block and needs an answer", block_id=at)
        for ans in block.answers:
            if ans.id == chosen:
                return ans.next
        raise UnknownAnswerError(
            f"block {at!r} has no answer {chosen!r}", block_id=at, answer_id=chosen)
    if chosen is not None:
        raise WrongBlockKindError(
            f"block {at!r} is a conclusion block and takes no answer", block_id=at)
    return block.next
