#!/usr/bin/env python3
"""Run every bundled preset over the bundled samples and report results.

For the callgraph presets the emitted edges are diffed against the
hand-annotated .edges / .methodedges files next to each sample.  For the
liveness presets the solved model is printed.  Exits nonzero on any diff.
"""

from __future__ import annotations

import sys
from pathlib import Path

from factlog import Database, evaluate, load_preset, run_fact_generation

ROOT = Path(__file__).resolve().parent.parent
SAMPLES = ROOT / "samples"

CALLGRAPHS = [
    ("callgraph-go", [SAMPLES / "example.go"], None),
    ("callgraph-go", [SAMPLES / "go" / "upgrade.go"], SAMPLES / "go" / "upgrade.edges"),
    (
        "callgraph-go-methods",
        [SAMPLES / "go" / "upgrade.go"],
        SAMPLES / "go" / "upgrade.methodedges",
    ),
    ("callgraph-c", [SAMPLES / "c" / "scheduler.c"], SAMPLES / "c" / "scheduler.edges"),
    ("callgraph-zig", [SAMPLES / "zig" / "scanner.zig"], SAMPLES / "zig" / "scanner.edges"),
]


def check_callgraphs() -> int:
    failures = 0
    for name, paths, annotation in CALLGRAPHS:
        preset = load_preset(name)
        db, stats, diagnostics = run_fact_generation(preset, paths)
        for line in diagnostics:
            print(f"  diagnostic: {line}")
        label = f"{name} on {', '.join(p.name for p in paths)}"
        if annotation is None:
            print(f"== {label}: {stats.fact_count} facts, {stats.function_count} functions")
            print("   " + "\n   ".join(db.to_dl_text().splitlines()))
            continue
        want_db = Database.from_dl_text(annotation.read_text(encoding="utf-8"))
        got_db = Database()
        for relation in want_db.relations:
            for row in db.tuples(relation):
                got_db.add(relation, row)
        got = got_db.to_dl_text()
        want = want_db.to_dl_text()
        if got == want:
            print(f"== {label}: {stats.fact_count} facts, matches {annotation.name}")
        else:
            failures += 1
            print(f"!! {label}: MISMATCH against {annotation.name}")
            got_set = set(got.splitlines())
            want_set = set(want.splitlines())
            for line in sorted(want_set - got_set):
                print(f"   missing: {line}")
            for line in sorted(got_set - want_set):
                print(f"   extra:   {line}")
    return failures


def show_liveness() -> None:
    preset = load_preset("liveness-arith")
    db, stats, _ = run_fact_generation(preset, [SAMPLES / "liveness.arith"])
    print(f"== liveness-arith on liveness.arith: {stats.fact_count} facts")
    solved = evaluate(preset.program(), db)
    rows = solved.sorted_tuples("live")
    print(f"   live model ({len(rows)} tuples):")
    for var, line in rows:
        print(f"   live({var!r}, {line})")


def main() -> int:
    failures = check_callgraphs()
    show_liveness()
    if failures:
        print(f"{failures} sample(s) diverged from their annotations", file=sys.stderr)
        return 1
    print("all annotated samples match")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
