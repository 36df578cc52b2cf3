"""Regenerate the checked-in fixture files under fixtures/.

Everything is deterministic, so rerunning this script must leave the
files byte-identical unless fixture code changed.
"""
from __future__ import annotations

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from lexpath import fixtures, interchange  # noqa: E402

OUT = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


def main() -> int:
    OUT.mkdir(exist_ok=True)
    interchange.write_bundle_file(OUT / "demo_bundle.json", fixtures.demo_bundle())
    interchange.write_bundle_file(OUT / "mini_lateness_bundle.json",
                                  fixtures.mini_lateness_bundle())
    corpus = fixtures.generate_corpus(seed=11, n_cases=40)
    interchange.write_corpus_file(OUT / "demo_corpus.jsonl", corpus)
    for name in ("demo_bundle.json", "mini_lateness_bundle.json",
                 "demo_corpus.jsonl"):
        size = (OUT / name).stat().st_size
        print(f"wrote fixtures/{name} ({size} bytes)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
