from __future__ import annotations

import copy
import datetime as dt
import random

import pytest
from hypothesis import given, strategies as st

from lexpath import fixtures
from lexpath.cases import CaseRecord, CaseStore, CriterionSummary, Polarity
from lexpath.errors import (
    BadIndexError,
    InvalidSchemaError,
    SessionCompleteError,
    SessionIncompleteError,
    UnknownAnswerError,
)
from lexpath.schema_model import (
    Answer,
    ConclusionBlock,
    CriterionBlock,
    CriterionBlock as Crit,
    NextStep,
    Schema,
    validate_schema,
)
from lexpath.sessions import (
    Analysis,
    Prompt,
    SessionStatus,
    Step,
    answer,
    build_analysis,
    enumerate_paths,
    replay,
    revise_answer,
    start_session,
)


def snapshot(session):
    return (list(session.steps), list(session.conclusion_stack),
            session.status, session.cursor)


def random_walk(bundle, rng, session_id="walk"):
    """Answer random answers until the session completes; returns the
    session and how many answers were given."""
    session, view = start_session(bundle.schema, bundle.store,
                                  session_id=session_id)
    hops = 0
    while session.status is SessionStatus.IN_PROGRESS:
        assert isinstance(view, Prompt)
        choice = rng.choice(view.answers)
        view = answer(session, choice.id, bundle.schema, bundle.store)
        hops += 1
    assert isinstance(view, Analysis)
    return session, hops


class TestWalkthrough:
    def test_demo_interview_sequence(self, demo_bundle):
        schema, store = demo_bundle.schema, demo_bundle.store
        session, prompt = start_session(schema, store, session_id="demo")
        assert prompt.title == "Are you a tenant or a landlord?"
        assert [a.label for a in prompt.answers] == ["Tenant", "Landlord"]

        prompt = answer(session, "landlord", schema, store)
        assert prompt.criterion_id == "issues_landlord"
        prompt = answer(session, "late", schema, store)
        assert prompt.criterion_id == "late_now"
        prompt = answer(session, "no", schema, store)
        assert prompt.criterion_id == "freq_late"
        # The open-textured criterion shows decided cases on both sides.
        assert [c.case_id for c, _ in prompt.applied_examples] == [
            "LT-2022-0310", "LT-2021-0147"]
        assert "7 times in the 12 months" in prompt.applied_examples[1][1].summary
        assert [c.case_id for c, _ in prompt.not_applied_examples] == [
            "LT-2020-0892", "LT-2019-1203"]

        prompt = answer(session, "yes", schema, store)
        assert prompt.criterion_id == "prejudice"
        analysis = answer(session, "yes", schema, store)
        assert isinstance(analysis, Analysis)
        assert [c.conclusion_id for c in analysis.conclusions] == [
            "term", "pay_order"]
        assert "article 1971" in analysis.conclusions[0].explanation
        assert "The lease was terminated." in [
            s.summary for _, s in analysis.matched_cases]
        assert "The judge ordered the tenant to pay their rent." in [
            s.summary for _, s in analysis.matched_cases]
        # Next steps come straight from the conclusion blocks, first
        # occurrence of a title wins.
        term_block = schema.blocks["term"]
        pay_block = schema.blocks["pay_order"]
        assert analysis.next_steps == term_block.next_steps + pay_block.next_steps
        assert analysis.past_outcomes_only is True
        assert [(r.criterion_id, r.answer_id) for r in analysis.answers_review] == [
            ("role", "landlord"), ("issues_landlord", "late"),
            ("late_now", "no"), ("freq_late", "yes"), ("prejudice", "yes")]

    def test_matched_cases_order_matches_store_query(self, demo_bundle):
        schema, store = demo_bundle.schema, demo_bundle.store
        session, _ = start_session(schema, store, session_id="x")
        for a in ("landlord", "nonpayment", "yes"):
            view = answer(session, a, schema, store)
        assert session.conclusion_stack == ["term", "pay_order"]
        # Oracle: per conclusion, its summaries newest case first.
        dates = {cid: store.cases[cid].decision_date for cid in store.cases}
        expected = []
        for conclusion in ("term", "pay_order"):
            rows = [(s.case_id, s.conclusion_id)
                    for s in store.outcome_summaries[conclusion]]
            rows.sort(key=lambda r: (-dates[r[0]].toordinal(), r[0]))
            expected.extend(rows)
        got = [(c.case_id, s.conclusion_id) for c, s in view.matched_cases]
        assert got == expected


class TestSessionMechanics:
    def test_session_ids_unique_by_default(self, mini_bundle):
        ids = {start_session(mini_bundle.schema, mini_bundle.store)[0].session_id
               for _ in range(50)}
        assert len(ids) == 50

    def test_invalid_schema_refused(self, mini_bundle):
        schema = fixtures.mini_lateness_schema()
        schema.blocks["freq_late"].answers[0].next = "ghost"
        with pytest.raises(InvalidSchemaError):
            start_session(schema, mini_bundle.store)

    def test_unknown_answer_leaves_session_unchanged(self, demo_bundle):
        schema, store = demo_bundle.schema, demo_bundle.store
        session, _ = start_session(schema, store, session_id="f")
        answer(session, "landlord", schema, store)
        before = snapshot(session)
        for bad in ("", "zzz", "issues_landlord", "a0", "Late", "LATE "):
            with pytest.raises(UnknownAnswerError):
                answer(session, bad, schema, store)
            assert snapshot(session) == before

    def test_answer_after_complete(self, mini_bundle):
        session, _ = start_session(mini_bundle.schema, mini_bundle.store)
        answer(session, "no", mini_bundle.schema, mini_bundle.store)
        assert session.status is SessionStatus.COMPLETE
        with pytest.raises(SessionCompleteError):
            answer(session, "yes", mini_bundle.schema, mini_bundle.store)

    def test_analysis_requires_completion(self, mini_bundle):
        session, _ = start_session(mini_bundle.schema, mini_bundle.store)
        with pytest.raises(SessionIncompleteError):
            build_analysis(session, mini_bundle.schema, mini_bundle.store)

    @given(st.integers(min_value=0, max_value=400))
    def test_replay_reproduces_state(self, seed):
        bundle = fixtures.random_bundle(seed, max_blocks=40)
        rng = random.Random(seed + 1)
        session, _hops = random_walk(bundle, rng)
        rebuilt = replay(bundle.schema, bundle.store, session.steps,
                         session_id=session.session_id)
        assert rebuilt.steps == session.steps
        assert rebuilt.conclusion_stack == session.conclusion_stack
        assert rebuilt.cursor == session.cursor
        assert rebuilt.status == session.status

    @given(st.integers(min_value=0, max_value=400))
    def test_termination_within_block_budget(self, seed):
        bundle = fixtures.random_bundle(seed, max_blocks=60)
        rng = random.Random(seed + 2)
        session, hops = random_walk(bundle, rng)
        assert session.status is SessionStatus.COMPLETE
        assert session.cursor is None
        # Acyclic graph: a session can never visit more blocks than exist.
        assert hops + len(session.conclusion_stack) <= len(bundle.schema.blocks)

    def test_all_conclusion_schema_completes_at_start(self):
        blocks = {
            "c1": ConclusionBlock(id="c1", title="First", explanation="e",
                                  next="c2"),
            "c2": ConclusionBlock(id="c2", title="Second", explanation="e"),
        }
        schema = Schema(id="t", version="1", locale="en", blocks=blocks,
                        start="c1")
        store = CaseStore(schema)
        session, view = start_session(schema, store)
        assert session.status is SessionStatus.COMPLETE
        assert isinstance(view, Analysis)
        assert session.conclusion_stack == ["c1", "c2"]


class TestRevision:
    def test_revise_equals_fresh_session(self, demo_bundle):
        schema, store = demo_bundle.schema, demo_bundle.store
        session, _ = start_session(schema, store, session_id="r")
        for a in ("landlord", "late", "no", "yes", "yes"):
            answer(session, a, schema, store)
        revise_answer(session, 2, "yes", schema, store)
        fresh, _ = start_session(schema, store, session_id="r")
        for a in ("landlord", "late", "yes"):
            answer(fresh, a, schema, store)
        assert snapshot(session) == snapshot(fresh)

    @given(st.integers(min_value=0, max_value=250))
    def test_random_revisions_match_replay(self, seed):
        bundle = fixtures.random_bundle(seed, max_blocks=40)
        rng = random.Random(seed + 3)
        session, _ = random_walk(bundle, rng)
        if not session.steps:
            return
        idx = rng.randrange(len(session.steps))
        block = bundle.schema.blocks[session.steps[idx].criterion_id]
        new_answer = rng.choice(block.answers).id
        view = revise_answer(session, idx, new_answer, bundle.schema,
                             bundle.store)
        expected_steps = session.steps[:idx] + [
            Step(criterion_id=block.id, answer_id=new_answer)]
        fresh = replay(bundle.schema, bundle.store, expected_steps)
        assert session.steps == fresh.steps
        assert session.conclusion_stack == fresh.conclusion_stack
        assert session.cursor == fresh.cursor
        if session.status is SessionStatus.COMPLETE:
            assert isinstance(view, Analysis)
        else:
            assert isinstance(view, Prompt)
            assert view.criterion_id == session.cursor

    def test_bad_index(self, mini_bundle):
        session, _ = start_session(mini_bundle.schema, mini_bundle.store)
        answer(session, "yes", mini_bundle.schema, mini_bundle.store)
        for idx in (-1, 1, 5):
            with pytest.raises(BadIndexError):
                revise_answer(session, idx, "no", mini_bundle.schema,
                              mini_bundle.store)

    def test_bad_new_answer_leaves_session_unchanged(self, mini_bundle):
        session, _ = start_session(mini_bundle.schema, mini_bundle.store)
        answer(session, "yes", mini_bundle.schema, mini_bundle.store)
        before = snapshot(session)
        with pytest.raises(UnknownAnswerError):
            revise_answer(session, 0, "whatever", mini_bundle.schema,
                          mini_bundle.store)
        assert snapshot(session) == before


class TestPromptExamples:
    def overstuffed_bundle(self):
        """Mini bundle with 9 applied / 7 not-applied summaries on one
        criterion, to exercise the display cap."""
        schema = fixtures.mini_lateness_schema()
        store = CaseStore(schema)
        dates = []
        for i in range(16):
            cid = f"x{i:02d}"
            date = dt.date(2018, 1, 1) + dt.timedelta(days=37 * i % 2000)
            dates.append((cid, date))
            store.add_case(CaseRecord(case_id=cid, citation=f"file {cid}",
                                      decision_date=date))
            polarity = Polarity.APPLIED if i < 9 else Polarity.NOT_APPLIED
            store.link_criterion_summary(CriterionSummary(
                cid, "freq_late", polarity, f"summary {cid}"))
        return schema, store, dates

    def test_cap_is_five_per_polarity_newest_first(self):
        schema, store, dates = self.overstuffed_bundle()
        _session, prompt = start_session(schema, store)
        assert len(prompt.applied_examples) == 5
        assert len(prompt.not_applied_examples) == 5
        date_of = dict(dates)
        expected_applied = sorted(
            [cid for cid, _ in dates[:9]],
            key=lambda cid: (-date_of[cid].toordinal(), cid))[:5]
        expected_not = sorted(
            [cid for cid, _ in dates[9:]],
            key=lambda cid: (-date_of[cid].toordinal(), cid))[:5]
        assert [c.case_id for c, _ in prompt.applied_examples] == expected_applied
        assert [c.case_id for c, _ in prompt.not_applied_examples] == expected_not

    def test_prompt_answers_preserve_schema_order(self, demo_bundle):
        _session, prompt = start_session(demo_bundle.schema, demo_bundle.store)
        assert prompt.answers == demo_bundle.schema.blocks["role"].answers


class TestNextStepDedup:
    def test_first_occurrence_wins(self):
        shared = "Consider a payment agreement"
        blocks = {
            "q": CriterionBlock(id="q", title="Q?", answers=[
                Answer(id="y", label="Yes", next="c1"),
                Answer(id="n", label="No", next=None)]),
            "c1": ConclusionBlock(
                id="c1", title="One", explanation="e", next="c2",
                next_steps=[NextStep(title=shared, text="from c1"),
                            NextStep(title="Only c1", text="t")]),
            "c2": ConclusionBlock(
                id="c2", title="Two", explanation="e",
                next_steps=[NextStep(title=shared, text="from c2"),
                            NextStep(title="Only c2", text="t")]),
        }
        schema = Schema(id="t", version="1", locale="en", blocks=blocks,
                        start="q")
        store = CaseStore(schema)
        session, _ = start_session(schema, store)
        analysis = answer(session, "y", schema, store)
        titles = [s.title for s in analysis.next_steps]
        assert titles == [shared, "Only c1", "Only c2"]
        kept = next(s for s in analysis.next_steps if s.title == shared)
        assert kept.text == "from c1"


class TestEnumeratePaths:
    def test_mini_paths_exact(self, mini_bundle):
        paths = enumerate_paths(mini_bundle.schema)
        as_tuples = [
            ([(s.criterion_id, s.answer_id) for s in steps], stack)
            for steps, stack in paths]
        assert as_tuples == [
            ([("freq_late", "yes"), ("prejudice", "yes")], ["term"]),
            ([("freq_late", "yes"), ("prejudice", "no")], ["no_term"]),
            ([("freq_late", "no")], ["no_term"]),
        ]

    def test_binary_tree_depth_three_has_eight_paths(self):
        blocks = {}
        def leaf(name):
            blocks[name] = ConclusionBlock(id=name, title=name,
                                           explanation="e")
        def node(name, left, right):
            blocks[name] = Crit(id=name, title=name, answers=[
                Answer(id="l", label="Left", next=left),
                Answer(id="r", label="Right", next=right)])
        for i in range(8):
            leaf(f"leaf{i}")
        for i in range(4):
            node(f"n2_{i}", f"leaf{2 * i}", f"leaf{2 * i + 1}")
        for i in range(2):
            node(f"n1_{i}", f"n2_{2 * i}", f"n2_{2 * i + 1}")
        node("root", "n1_0", "n1_1")
        schema = Schema(id="t", version="1", locale="en", blocks=blocks,
                        start="root")
        paths = enumerate_paths(schema)
        assert len(paths) == 8
        assert [stack for _steps, stack in paths] == [
            [f"leaf{i}"] for i in range(8)]

    @given(st.integers(min_value=0, max_value=60))
    def test_every_path_replays_to_its_stack(self, seed):
        bundle = fixtures.random_bundle(seed, max_blocks=14, with_cases=False)
        paths = enumerate_paths(bundle.schema)
        assert paths, "at least one path exists"
        for steps, stack in paths[:50]:
            session = replay(bundle.schema, bundle.store, steps)
            assert session.status is SessionStatus.COMPLETE
            assert session.conclusion_stack == stack

    def test_invalid_schema_refused(self):
        schema = fixtures.mini_lateness_schema()
        schema.blocks["prejudice"].answers[0].next = "freq_late"
        with pytest.raises(InvalidSchemaError):
            enumerate_paths(schema)
