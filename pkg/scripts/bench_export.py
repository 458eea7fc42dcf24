#!/usr/bin/env python3
"""Measure the export pipeline on synthetic documents of growing size.

Usage: python scripts/bench_export.py [max-objects]
"""

from __future__ import annotations

import sys
import time

from medex.intermediate import serialize_intermediate
from medex.resolver import compile_document
from medex.smil import emit_smil
from medex.source import parse_source
from medex.xhtml import emit_xhtml


def synthetic(object_count: int) -> bytes:
    per_group = 50
    groups = []
    for group in range(max(1, object_count // per_group)):
        items = "".join(
            f'<object id="g{group}i{i}" kind="media" type="image" src="media/p{i % 7}.png">'
            f'<spatial left="{(i * 13) % 100}%" top="{(i * 7) % 100}%" '
            f'width="{(i % 10) + 1}%" height="{(i % 9) + 1}%"/>'
            f'<timing dur="{100 + (i % 11) * 10}ms"/></object>'
            for i in range(per_group)
        )
        kind = "seq" if group % 2 else "par"
        groups.append(f'<object id="group{group}" kind="{kind}">{items}</object>')
    return (
        '<doc width="1920" height="1080" title="bench">'
        f'<object id="root" kind="par">{"".join(groups)}</object></doc>'
    ).encode()


def main() -> int:
    top = int(sys.argv[1]) if len(sys.argv) > 1 else 2000
    sizes = [n for n in (100, 500, 1000, 2000, 5000, 10000) if n <= top]
    print(f"{'objects':>8} {'parse+compile':>14} {'smil':>8} {'xhtml':>8} {'serialize':>10}")
    for size in sizes:
        data = synthetic(size)
        t0 = time.perf_counter()
        doc = compile_document(parse_source(data))
        t1 = time.perf_counter()
        emit_smil(doc)
        t2 = time.perf_counter()
        emit_xhtml(doc)
        t3 = time.perf_counter()
        serialize_intermediate(doc)
        t4 = time.perf_counter()
        print(
            f"{size:>8} {t1 - t0:>13.3f}s {t2 - t1:>7.3f}s "
            f"{t3 - t2:>7.3f}s {t4 - t3:>9.3f}s"
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
