#!/usr/bin/env python3
"""Regenerate the scheduler conformance fixtures from the timeline oracle.

For each selected corpus document this emits a JSON file carrying the
exported XHTML page, the media-duration fixtures, the scripted click events,
and 100 oracle-sampled visible-object sets (plus the sets one 10 ms tick
earlier and later, the allowed boundary skew). The scheduler test suite in
scheduler/test/oracle.test.ts replays these under a virtual clock.

Usage: python scripts/make_scheduler_fixtures.py
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "tests"))

from medex.oracle import timeline_oracle
from medex.resolver import compile_document
from medex.xhtml import emit_xhtml
from util import load_corpus

FIXTURE_DIR = ROOT / "scheduler" / "test" / "fixtures"
SAMPLES = 100
TICK_MS = 10

# every static document plus the dynamic ones the acceptance criterion names:
# media-dependent durations and a click-driven excl
DYNAMIC_PICKS = {"c13_excl_menu", "c14_audio_media", "c15_seq_after_media", "c16_par_media_mix"}


def main() -> int:
    FIXTURE_DIR.mkdir(parents=True, exist_ok=True)
    written = 0
    for entry in load_corpus():
        if entry.doc_class != "static" and entry.name not in DYNAMIC_PICKS:
            continue
        table = timeline_oracle(
            entry.source,
            events=entry.events,
            media_durations=entry.media_durations,
            horizon_ms=entry.horizon_ms,
        )
        end = entry.horizon_ms if entry.horizon_ms is not None else table.end_ms()
        if end <= 0:
            continue
        bundle = emit_xhtml(compile_document(entry.source))
        samples = []
        for k in range(SAMPLES):
            at = (k * end) // SAMPLES
            samples.append(
                {
                    "atMs": at,
                    "visible": sorted(table.active_at(at)),
                    "visibleEarlier": sorted(table.active_at(max(0, at - TICK_MS))),
                    "visibleLater": sorted(table.active_at(at + TICK_MS)),
                }
            )
        fixture = {
            "name": entry.name,
            "horizonMs": end,
            "mediaDurations": entry.media_durations,
            "events": [{"atMs": e.at_ms, "click": e.target} for e in entry.events],
            "html": bundle.html_bytes.decode("utf-8"),
            "samples": samples,
        }
        path = FIXTURE_DIR / f"{entry.name}.json"
        path.write_text(json.dumps(fixture, indent=1, sort_keys=True) + "\n")
        written += 1
    print(f"wrote {written} fixtures to {FIXTURE_DIR}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
