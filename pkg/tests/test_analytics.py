from __future__ import annotations

import datetime as dt
import json
import random

import pytest
from hypothesis import given, strategies as st

from lexpath.analytics import (
    ALLOWED_PAYLOAD_KEYS,
    MAX_PAYLOAD_VALUE_CHARS,
    AnalyticsEvent,
    EventKind,
    EventLog,
    FeedbackLog,
    FeedbackRecord,
    feedback_stats,
    largest_remainder_percentages,
    parse_event_kind,
    pathway_stats,
    percent_round_half_up,
    sanitize_free_text,
    validate_event,
)
from lexpath.errors import (
    BadRangeError,
    DisallowedPayloadError,
    ParseError,
    UnknownEventKindError,
)

NOON = dt.datetime(2024, 6, 15, 12, 0, 0)


def event(kind, payload=None, when=NOON, session="s1"):
    return AnalyticsEvent(kind=kind, timestamp=when, session_id=session,
                          payload=payload or {})


class TestEventValidation:
    @pytest.mark.parametrize("kind", list(EventKind))
    def test_full_allowed_payload_passes(self, kind):
        payload = {key: "v" for key in ALLOWED_PAYLOAD_KEYS[kind]}
        validate_event(event(kind, payload))

    @pytest.mark.parametrize("kind", list(EventKind))
    def test_empty_payload_always_passes(self, kind):
        validate_event(event(kind))

    def test_unknown_key_rejected_with_detail(self):
        with pytest.raises(DisallowedPayloadError) as exc:
            validate_event(event(EventKind.QUESTION_ANSWERED,
                                 {"block_id": "b", "user_text": "secret"}))
        assert exc.value.details["keys"] == ["user_text"]

    def test_feedback_kind_admits_no_payload_keys(self):
        with pytest.raises(DisallowedPayloadError):
            validate_event(event(EventKind.FEEDBACK_SUBMITTED,
                                 {"issue_text": "oops"}))

    def test_key_from_another_kind_rejected(self):
        with pytest.raises(DisallowedPayloadError):
            validate_event(event(EventKind.PAGE_VIEW, {"pathway_id": "p"}))

    def test_non_string_value_rejected(self):
        with pytest.raises(DisallowedPayloadError, match="string"):
            validate_event(event(EventKind.QUESTION_ANSWERED,
                                 {"block_id": 7}))

    def test_overlong_value_rejected_at_boundary(self):
        ok = event(EventKind.PAGE_VIEW,
                   {"referrer_class": "x" * MAX_PAYLOAD_VALUE_CHARS})
        validate_event(ok)
        with pytest.raises(DisallowedPayloadError, match="exceeds"):
            validate_event(event(
                EventKind.PAGE_VIEW,
                {"referrer_class": "x" * (MAX_PAYLOAD_VALUE_CHARS + 1)}))

    def test_unknown_kind_object_rejected(self):
        bogus = AnalyticsEvent(kind="NOT_A_KIND", timestamp=NOON)
        with pytest.raises(UnknownEventKindError):
            validate_event(bogus)

    def test_parse_event_kind(self):
        for kind in EventKind:
            assert parse_event_kind(kind.value) is kind
        with pytest.raises(UnknownEventKindError):
            parse_event_kind("CLICKED")
        with pytest.raises(UnknownEventKindError):
            parse_event_kind("page_view")


class TestEventLog:
    def test_memory_only_record_and_read(self):
        log = EventLog()
        log.record(event(EventKind.PAGE_VIEW))
        log.record(event(EventKind.ANALYSIS_REACHED, {"block_id": "c1"}))
        assert len(log) == 2
        snapshot = log.events()
        snapshot.clear()
        assert len(log) == 2

    def test_invalid_event_not_recorded(self):
        log = EventLog()
        with pytest.raises(DisallowedPayloadError):
            log.record(event(EventKind.PAGE_VIEW, {"nope": "x"}))
        assert len(log) == 0

    def test_persists_and_reloads(self, tmp_path):
        path = str(tmp_path / "events.jsonl")
        log = EventLog(path)
        log.record(event(EventKind.PATHWAY_SELECTED,
                         {"pathway_id": "p1", "role": "tenant"}))
        log.record(event(EventKind.QUESTION_ANSWERED,
                         {"block_id": "b", "answer_id": "a"},
                         when=NOON + dt.timedelta(hours=1), session=None))
        reloaded = EventLog(path)
        assert reloaded.events() == log.events()

    def test_one_json_object_per_line(self, tmp_path):
        path = str(tmp_path / "events.jsonl")
        log = EventLog(path)
        for _ in range(3):
            log.record(event(EventKind.PAGE_VIEW))
        lines = open(path, encoding="utf-8").read().splitlines()
        assert len(lines) == 3
        assert all(json.loads(line)["kind"] == "PAGE_VIEW" for line in lines)

    def test_blank_lines_tolerated(self, tmp_path):
        path = tmp_path / "events.jsonl"
        log = EventLog(str(path))
        log.record(event(EventKind.PAGE_VIEW))
        path.write_text(path.read_text() + "\n\n")
        assert len(EventLog(str(path))) == 1

    def test_corrupt_line_reported_with_number(self, tmp_path):
        path = tmp_path / "events.jsonl"
        good = json.dumps({"kind": "PAGE_VIEW",
                           "timestamp": NOON.isoformat()})
        path.write_text(good + "\n" + '{"kind": "PAGE_VIEW"}' + "\n")
        with pytest.raises(ParseError, match="line 2"):
            EventLog(str(path))

    def test_missing_file_is_fine(self, tmp_path):
        log = EventLog(str(tmp_path / "does-not-exist.jsonl"))
        assert len(log) == 0


class TestLargestRemainder:
    def test_reference_distribution(self):
        # 520/170/100/60/50 selections plus 100 across small pathways.
        counts = [520, 170, 100, 60, 50, 100]
        assert largest_remainder_percentages(counts) == [52, 17, 10, 6, 5, 10]

    def test_equal_thirds(self):
        assert largest_remainder_percentages([1, 1, 1]) == [34, 33, 33]

    def test_two_to_one(self):
        assert largest_remainder_percentages([2, 1]) == [67, 33]

    def test_six_equal_shares(self):
        assert largest_remainder_percentages([1] * 6) == [
            17, 17, 17, 17, 16, 16]

    def test_remainder_tie_prefers_larger_count(self):
        # All three fractional parts are 2/3; the two leftover points go to
        # the biggest count first, then the lowest index.
        assert largest_remainder_percentages([1, 1, 4]) == [17, 16, 67]

    def test_degenerate_inputs(self):
        assert largest_remainder_percentages([]) == []
        assert largest_remainder_percentages([0, 0]) == [0, 0]
        assert largest_remainder_percentages([5]) == [100]
        assert largest_remainder_percentages([0, 3, 0]) == [0, 100, 0]

    @given(st.lists(st.integers(min_value=0, max_value=10_000),
                    min_size=1, max_size=30))
    def test_sums_to_100_and_stays_near_exact(self, counts):
        result = largest_remainder_percentages(counts)
        total = sum(counts)
        if total == 0:
            assert result == [0] * len(counts)
            return
        assert sum(result) == 100
        for count, pct in zip(counts, result):
            exact = count * 100 / total
            assert int(exact) <= pct <= int(exact) + 1

    @given(st.lists(st.integers(min_value=0, max_value=1000),
                    min_size=1, max_size=10))
    def test_deterministic(self, counts):
        assert (largest_remainder_percentages(counts)
                == largest_remainder_percentages(list(counts)))


class TestSurveyPercentages:
    def test_round_half_up_cases(self):
        assert percent_round_half_up(22, 35) == 63
        assert percent_round_half_up(23, 35) == 66
        assert percent_round_half_up(31, 35) == 89
        assert percent_round_half_up(1, 8) == 13
        assert percent_round_half_up(0, 10) == 0
        assert percent_round_half_up(10, 10) == 100
        assert percent_round_half_up(3, 0) == 0

    def test_survey_aggregation(self):
        records = []
        for i in range(35):
            records.append(FeedbackRecord(
                timestamp=NOON,
                issue_text="had trouble" if i < 4 else "",
                found_helpful=True if i < 22 else (False if i < 30 else None),
                understood_rights=True if i < 23 else False,
                would_recommend=True if i < 31 else None,
            ))
        stats = feedback_stats(records)
        assert stats.total == 35
        assert stats.with_issue_text == 4
        assert (stats.found_helpful.yes, stats.found_helpful.no,
                stats.found_helpful.answered) == (22, 8, 30)
        assert stats.found_helpful.percentage_yes == 63
        assert stats.understood_rights.percentage_yes == 66
        assert stats.understood_rights.answered == 35
        assert stats.would_recommend.percentage_yes == 89
        assert stats.would_recommend.answered == 31

    def test_window_filters_by_day(self):
        records = [
            FeedbackRecord(timestamp=dt.datetime(2024, 6, d, 8, 0),
                           found_helpful=True)
            for d in (10, 15, 20)
        ]
        stats = feedback_stats(records, window_from=dt.date(2024, 6, 15),
                               window_to=dt.date(2024, 6, 20))
        assert stats.total == 2
        with pytest.raises(BadRangeError):
            feedback_stats(records, window_from=dt.date(2024, 6, 21),
                           window_to=dt.date(2024, 6, 20))

    def test_empty(self):
        stats = feedback_stats([])
        assert stats.total == 0
        assert stats.found_helpful.percentage_yes == 0


def selected(pathway_id=None, label=None, role=None, when=NOON):
    payload = {}
    if pathway_id is not None:
        payload["pathway_id"] = pathway_id
    if label is not None:
        payload["pathway_label"] = label
    if role is not None:
        payload["role"] = role
    return event(EventKind.PATHWAY_SELECTED, payload, when=when)


class TestPathwayStats:
    WINDOW = (dt.date(2024, 6, 1), dt.date(2024, 6, 30))

    def test_only_selections_counted(self):
        events = [
            event(EventKind.PAGE_VIEW),
            selected("p1"),
            event(EventKind.QUESTION_ANSWERED, {"block_id": "b",
                                                "answer_id": "a"}),
            selected("p1"),
        ]
        stats = pathway_stats(events, *self.WINDOW)
        assert stats.total == 2
        assert stats.rows[0].count == 2

    def test_window_inclusive_on_both_ends(self):
        events = [
            selected("p", when=dt.datetime(2024, 5, 31, 23, 59)),
            selected("p", when=dt.datetime(2024, 6, 1, 0, 0)),
            selected("p", when=dt.datetime(2024, 6, 30, 23, 59)),
            selected("p", when=dt.datetime(2024, 7, 1, 0, 0)),
        ]
        assert pathway_stats(events, *self.WINDOW).total == 2

    def test_label_preference_order(self):
        events = [
            selected("p1", label="Rent raise"),
            selected("p2"),
            selected(),
        ]
        stats = pathway_stats(events, *self.WINDOW)
        assert sorted(r.label for r in stats.rows) == [
            "Rent raise", "p2", "unknown"]

    def test_rows_sorted_by_count_then_label(self):
        events = ([selected(label="bbb")] * 3 + [selected(label="aaa")] * 3
                  + [selected(label="ccc")] * 4)
        stats = pathway_stats(events, *self.WINDOW)
        assert [r.label for r in stats.rows] == ["ccc", "aaa", "bbb"]
        assert [r.percentage for r in stats.rows] == [40, 30, 30]

    def test_role_split(self):
        events = ([selected("p", role="tenant")] * 13
                  + [selected("p", role="landlord")] * 7
                  + [selected("p", role="agent")]
                  + [selected("p")])
        stats = pathway_stats(events, *self.WINDOW)
        assert stats.total == 22
        assert stats.role_total == 20
        assert stats.tenant_percentage == 65
        assert stats.landlord_percentage == 35
        assert stats.tenant_percentage + stats.landlord_percentage == 100

    def test_no_roles(self):
        stats = pathway_stats([selected("p")], *self.WINDOW)
        assert stats.role_total == 0
        assert stats.tenant_percentage == 0
        assert stats.landlord_percentage == 0

    def test_bad_window(self):
        with pytest.raises(BadRangeError):
            pathway_stats([], dt.date(2024, 2, 2), dt.date(2024, 2, 1))

    def test_random_events_match_independent_count(self):
        rng = random.Random(404)
        labels = ["rent", "repairs", "deposit", "noise", None]
        roles = ["tenant", "landlord", None, "other"]
        events = []
        for _ in range(600):
            when = dt.datetime(2024, rng.randint(5, 7), rng.randint(1, 28),
                               rng.randint(0, 23))
            if rng.random() < 0.3:
                events.append(event(EventKind.PAGE_VIEW, when=when))
                continue
            events.append(selected("pid", label=rng.choice(labels),
                                   role=rng.choice(roles), when=when))
        lo, hi = self.WINDOW
        expected_labels: dict[str, int] = {}
        expected_roles = {"tenant": 0, "landlord": 0}
        expected_total = 0
        for ev in events:
            if ev.kind is not EventKind.PATHWAY_SELECTED:
                continue
            if not lo <= ev.timestamp.date() <= hi:
                continue
            expected_total += 1
            name = ev.payload.get("pathway_label") or "pid"
            expected_labels[name] = expected_labels.get(name, 0) + 1
            if ev.payload.get("role") in expected_roles:
                expected_roles[ev.payload["role"]] += 1
        stats = pathway_stats(events, lo, hi)
        assert stats.total == expected_total
        assert {r.label: r.count for r in stats.rows} == expected_labels
        assert stats.role_total == sum(expected_roles.values())
        assert sum(r.percentage for r in stats.rows) == 100


class TestSanitizeFreeText:
    @pytest.mark.parametrize("raw,expected", [
        ("plain words", "plain words"),
        ("line\none\nline two", "line one line two"),
        ("crlf\r\nhere", "crlf  here"),
        ("tabbed\ttext", "tabbed text"),
        ("null\x00byte\x07bell", "nullbytebell"),
        ("  padded  ", "padded"),
        ("accents survive: été", "accents survive: été"),
        ("", ""),
    ])
    def test_examples(self, raw, expected):
        assert sanitize_free_text(raw) == expected

    @given(st.text(max_size=200))
    def test_output_has_no_control_chars(self, text):
        import unicodedata
        cleaned = sanitize_free_text(text)
        assert not any(unicodedata.category(c) == "Cc" for c in cleaned)
        assert cleaned == cleaned.strip()


class TestFeedbackLog:
    def test_round_trip_preserves_blank_vs_no(self, tmp_path):
        path = str(tmp_path / "feedback.jsonl")
        log = FeedbackLog(path)
        log.record(FeedbackRecord(timestamp=NOON, session_id="s1",
                                  issue_text="form was confusing",
                                  found_helpful=False,
                                  understood_rights=None,
                                  would_recommend=True))
        reloaded = FeedbackLog(path)
        assert reloaded.records() == log.records()
        rec = reloaded.records()[0]
        assert rec.found_helpful is False
        assert rec.understood_rights is None

    def test_len_and_copy(self):
        log = FeedbackLog()
        log.record(FeedbackRecord(timestamp=NOON))
        rows = log.records()
        rows.append("junk")
        assert len(log) == 1

    def test_corrupt_line_reported(self, tmp_path):
        path = tmp_path / "feedback.jsonl"
        path.write_text('{"timestamp": "not a time"}\n')
        with pytest.raises(ParseError, match="line 1"):
            FeedbackLog(str(path))
