"""Record real HTTP API responses into frontend/tests/fixtures/.

The web client's contract tests run against these recordings, so the
client is tested against what the service actually returns, not against
hand-written imitations.  Each file stores {"status": int, "body": ...}.
"""
from __future__ import annotations

import datetime as dt
import json
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from fastapi.testclient import TestClient  # noqa: E402

from lexpath import fixtures  # noqa: E402
from lexpath.cases import (  # noqa: E402
    CaseRecord,
    CaseStore,
    CriterionSummary,
    Polarity,
)
from lexpath.interchange import Bundle, BundleMetadata  # noqa: E402
from lexpath.service import ServiceState, create_app  # noqa: E402

OUT = (pathlib.Path(__file__).resolve().parent.parent
       / "frontend" / "tests" / "fixtures")
API = "/api/v1"


def save(name: str, resp) -> None:
    doc = {"status": resp.status_code, "body": resp.json()}
    path = OUT / f"{name}.json"
    path.write_text(json.dumps(doc, indent=2, ensure_ascii=False,
                               sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote {path.relative_to(OUT.parent.parent)} ({resp.status_code})")


def overstuffed_bundle() -> Bundle:
    """Mini schema with more summaries than the display cap, so the
    recorded prompt shows the cap actually applied by the server."""
    schema = fixtures.mini_lateness_schema()
    store = CaseStore(schema)
    base = dt.date(2017, 6, 1)
    for i in range(16):
        cid = f"REC-{i:03d}"
        store.add_case(CaseRecord(
            case_id=cid, citation=f"Rental Tribunal, file {cid}",
            decision_date=base + dt.timedelta(days=83 * i % 2300)))
        polarity = Polarity.APPLIED if i < 9 else Polarity.NOT_APPLIED
        store.link_criterion_summary(CriterionSummary(
            cid, "freq_late", polarity,
            f"Recorded example summary number {i}."))
    return Bundle(
        metadata=BundleMetadata(title="Overstuffed recording bundle",
                                locale="en-CA",
                                published_date=dt.date(2024, 5, 1)),
        schema=schema, store=store)


def main() -> int:
    OUT.mkdir(parents=True, exist_ok=True)
    state = ServiceState(bundle=fixtures.demo_bundle())
    with TestClient(create_app(state)) as client:
        save("health", client.get(f"{API}/health"))
        save("bundle", client.get(f"{API}/bundle"))

        created = client.post(f"{API}/sessions",
                              json={"referrer_class": "direct"})
        save("session_created", created)
        sid = created.json()["session_id"]

        for answer_id in ("landlord", "late", "no"):
            resp = client.post(f"{API}/sessions/{sid}/answers",
                               json={"answer_id": answer_id})
        save("prompt_with_examples", resp)

        for answer_id in ("yes", "yes"):
            resp = client.post(f"{API}/sessions/{sid}/answers",
                               json={"answer_id": answer_id})
        save("analysis", resp)

        save("error_session_complete",
             client.post(f"{API}/sessions/{sid}/answers",
                         json={"answer_id": "yes"}))
        save("revision_result",
             client.patch(f"{API}/sessions/{sid}/answers/2",
                          json={"answer_id": "yes"}))
        save("error_unknown_session",
             client.get(f"{API}/sessions/no-such-session"))

        sid2 = client.post(f"{API}/sessions", json={}).json()["session_id"]
        save("error_unknown_answer",
             client.post(f"{API}/sessions/{sid2}/answers",
                         json={"answer_id": "not-an-option"}))
        save("error_validation",
             client.post(f"{API}/sessions/{sid2}/answers", json={}))

        save("event_accepted", client.post(f"{API}/events", json={
            "kind": "PAGE_VIEW", "session_id": sid2,
            "payload": {"referrer_class": "direct"}}))
        save("feedback_recorded", client.post(f"{API}/feedback", json={
            "session_id": sid2, "issue_text": "recorded while testing",
            "found_helpful": True, "would_recommend": True}))
        save("stats_pathways", client.get(f"{API}/stats/pathways"))
        save("stats_feedback", client.get(f"{API}/stats/feedback"))

    capped_state = ServiceState(bundle=overstuffed_bundle())
    with TestClient(create_app(capped_state)) as client:
        save("prompt_capped_examples", client.post(f"{API}/sessions", json={}))
    return 0


if __name__ == "__main__":
    sys.exit(main())
