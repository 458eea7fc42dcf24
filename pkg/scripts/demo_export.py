#!/usr/bin/env python3
"""End-to-end demo: compile one corpus document and export every target.

Writes build/demo/pivot.xml plus SMIL and XHTML bundles, then round-trips
the emitted SMIL back through the importer and prints a short summary.

Usage: python scripts/demo_export.py [corpus-doc-name]
"""

from __future__ import annotations

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent

from medex.cli import main as medex
from medex.intermediate import parse_intermediate

DEFAULT_DOC = "c13_excl_menu"


def main() -> int:
    name = sys.argv[1] if len(sys.argv) > 1 else DEFAULT_DOC
    source = ROOT / "tests" / "corpus" / f"{name}.xml"
    if not source.exists():
        print(f"no corpus document named {name!r}", file=sys.stderr)
        return 2
    out = ROOT / "build" / "demo"
    out.mkdir(parents=True, exist_ok=True)

    steps = [
        ["compile", str(source), "--out", str(out / "pivot.xml")],
        ["export", str(source), "--to", "smil", "--out", str(out / "smil")],
        ["export", str(source), "--to", "xhtml", "--out", str(out / "xhtml")],
        ["import-smil", str(out / "smil" / "index.smil"), "--out", str(out / "reimported.xml")],
        ["inspect", str(source)],
    ]
    for argv in steps:
        print(f"$ medex {' '.join(argv)}")
        code = medex(argv)
        if code != 0:
            return code

    reimported = parse_intermediate((out / "reimported.xml").read_bytes())
    print(f"\nround trip kept {len(reimported.media)} assets, "
          f"{len(list(reimported.timing.walk()))} timing nodes")
    print(f"bundles in {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
