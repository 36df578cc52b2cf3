"""Walk the demo interview from the command line and print what a user
would see at every step: the question, the decided cases on each side,
and the final analysis.

By default it replays a scripted landlord path; pass --interactive to
answer the questions yourself.
"""
from __future__ import annotations

import argparse
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from lexpath import fixtures  # noqa: E402
from lexpath.sessions import (  # noqa: E402
    Analysis,
    SessionStatus,
    answer,
    start_session,
)

SCRIPTED_ANSWERS = ["landlord", "late", "no", "yes", "yes"]


def show_prompt(prompt) -> None:
    print(f"\n== {prompt.title}")
    if prompt.description:
        print(f"   {prompt.description}")
    for side, rows in (("applied", prompt.applied_examples),
                       ("not applied", prompt.not_applied_examples)):
        for case, summary in rows:
            print(f"   [{side}] {case.citation} "
                  f"({case.decision_date.isoformat()}): {summary.summary}")
    for ans in prompt.answers:
        print(f"   ({ans.id}) {ans.label}")


def show_analysis(analysis: Analysis) -> None:
    print("\n== Analysis (based on past decisions, not a prediction)")
    for conclusion in analysis.conclusions:
        print(f"\n* {conclusion.title}")
        print(f"  {conclusion.explanation}")
    if analysis.matched_cases:
        print("\nPast decisions that reached these outcomes:")
        for case, summary in analysis.matched_cases:
            print(f"  {case.citation} ({case.decision_date.isoformat()}): "
                  f"{summary.summary}")
    if analysis.next_steps:
        print("\nWhat you can do next:")
        for step in analysis.next_steps:
            print(f"  - {step.title}: {step.text}")
    print("\nYour answers:")
    for row in analysis.answers_review:
        print(f"  {row.index}. {row.criterion_title} -> {row.answer_label}")


def pick_answer(prompt, scripted: list[str], interactive: bool) -> str:
    if not interactive and scripted:
        choice = scripted.pop(0)
        print(f"   -> {choice}")
        return choice
    valid = {a.id for a in prompt.answers}
    while True:
        choice = input("   your answer id: ").strip()
        if choice in valid:
            return choice
        print(f"   (choose one of: {', '.join(sorted(valid))})")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--interactive", action="store_true",
                        help="answer the questions on stdin")
    parser.add_argument("--answers", default=",".join(SCRIPTED_ANSWERS),
                        help="comma-separated answer ids for scripted mode")
    args = parser.parse_args()

    bundle = fixtures.demo_bundle()
    scripted = [a for a in args.answers.split(",") if a]
    print(f"Bundle: {bundle.metadata.title} "
          f"(schema {bundle.schema.id} v{bundle.schema.version})")

    session, view = start_session(bundle.schema, bundle.store)
    while session.status is SessionStatus.IN_PROGRESS:
        show_prompt(view)
        choice = pick_answer(view, scripted, args.interactive)
        view = answer(session, choice, bundle.schema, bundle.store)
    show_analysis(view)
    return 0


if __name__ == "__main__":
    sys.exit(main())
