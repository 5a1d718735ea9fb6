#!/usr/bin/env python3
"""Generate a synthetic C corpus with known call-graph ground truth.

Every generated function plants its calls in plain statement form, so the
expected function and edge counts are exact by construction.  Filler
statements, comments, and string literals deliberately contain call-shaped
text (fake(call), if(...), sizeof(...)) that a correct matcher must not
report.  A corpus_manifest.json records the planted totals:

    functions  total function definitions
    edges      per-file unique (caller, callee) pairs, summed over files
    lines      total physical newlines

Usage: make_c_corpus.py --out DIR [--lines 100000] [--seed 1]
"""

from __future__ import annotations

import argparse
import json
import random
from pathlib import Path

LIBRARY_CALLEES = ("printf", "putchar", "abs")

FILLERS = (
    "    int t{n} = a * {k} + b;",
    "    a = a + {k};",
    "    b ^= a >> {small};",
    "    /* fake(call) inside a comment {{ ignored */",
    "    // trailing note: not_a_call(b)",
    '    const char *m{n} = "junk(call) {{ /* tricky */";',
    "    a += sizeof(\"label(text)\");",
)

BLOCK_FILLERS = (
    "    if(a > {k}) {{\n        a = a - {small};\n    }}",
    "    while(b > {k}) {{\n        b = b - {small};\n    }}",
)


def _function(rng: random.Random, name: str, prior: list[str]) -> tuple[list[str], set[str]]:
    lines = [f"int {name}(int a, int b) {{"]
    callees: set[str] = set()
    pool = list(prior[-3:]) + list(LIBRARY_CALLEES)
    for n in range(rng.randint(4, 9)):
        roll = rng.random()
        if roll < 0.40:
            callee = rng.choice(pool)
            callees.add(callee)
            if callee == "printf":
                lines.append(f'    a += printf("%d:%d\\n", a, b);')
            else:
                lines.append(f"    a += {callee}(a, b);")
        elif roll < 0.55:
            callee = rng.choice(pool)
            callees.add(callee)
            lines.append(f"    if(b > {rng.randint(1, 9)}) {{")
            lines.append(f"        b = {callee}(b, a);")
            lines.append("    }")
        elif roll < 0.70:
            lines.append(
                rng.choice(BLOCK_FILLERS).format(k=rng.randint(1, 99), small=rng.randint(1, 9))
            )
        else:
            lines.append(
                rng.choice(FILLERS).format(n=n, k=rng.randint(1, 99), small=rng.randint(1, 9))
            )
    lines.append("    return a + b;")
    lines.append("}")
    lines.append("")
    return lines, callees


def _file(rng: random.Random, idx: int) -> tuple[str, int, int]:
    lines = [
        f"/* generated scheduler shard {idx} */",
        "#include <stdio.h>",
        "#include <stdlib.h>",
        "",
        f"static int state{idx} = 0;",
        "",
    ]
    functions = rng.randint(40, 60)
    names: list[str] = []
    edges = 0
    for j in range(functions):
        name = f"fn{idx}_{j}"
        body, callees = _function(rng, name, names)
        lines.extend(body)
        names.append(name)
        edges += len(callees)
    return "\n".join(lines) + "\n", functions, edges


def generate(out: str | Path, lines_target: int = 100_000, seed: int = 1) -> dict:
    rng = random.Random(seed)
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    totals = {"files": 0, "lines": 0, "functions": 0, "edges": 0, "seed": seed}
    idx = 0
    while totals["lines"] < lines_target:
        content, functions, edges = _file(rng, idx)
        (out / f"shard{idx:04d}.c").write_text(content, encoding="utf-8")
        totals["files"] += 1
        totals["lines"] += content.count("\n")
        totals["functions"] += functions
        totals["edges"] += edges
        idx += 1
    manifest = out / "corpus_manifest.json"
    manifest.write_text(json.dumps(totals, indent=2) + "\n", encoding="utf-8")
    return totals


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--lines", type=int, default=100_000)
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args()
    totals = generate(args.out, args.lines, args.seed)
    print(json.dumps(totals))


if __name__ == "__main__":
    main()
