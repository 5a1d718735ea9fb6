"""Ground facts and fact databases, with text and tab-separated serialization.

A fact line looks like ``edge("incr", "one").`` or ``next(1, 2).``: arguments
are double-quoted symbols (backslash escapes for the quote and the backslash)
or signed integers.  A Database maps relation names to sets of ground tuples;
serialization is always sorted so equal databases produce identical bytes.

Two on-disk formats are supported: a single ``.dl`` text of fact lines, and a
directory of per-relation ``<name>.facts`` files with tab-separated columns
and unquoted symbols (the layout Datalog engines such as Souffle consume).
"""

from __future__ import annotations

import re
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

from .errors import ArityMismatch, FactlogError, MalformedFact

_RELATION_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_INT_RE = re.compile(r"-?\d+")
_INT_TOKEN_RE = re.compile(r"-?\d+\Z")


@dataclass(frozen=True)
class Fact:
    relation: str
    args: tuple[str | int, ...]


def parse_fact_line(line: str) -> Fact:
    """Parse one ``relation(arg, ...)`` line into a Fact (trailing '.' optional)."""
    text = line.strip()
    pos = 0
    m = _RELATION_RE.match(text, pos)
    if m is None:
        raise MalformedFact(f"expected relation name in {line!r}")
    relation = sys.intern(m.group(0))
    pos = m.end()
    if pos >= len(text) or text[pos] != "(":
        raise MalformedFact(f"expected '(' after relation name in {line!r}")
    pos += 1
    args: list[str | int] = []
    while True:
        pos = _skip_spaces(text, pos)
        if pos < len(text) and text[pos] == ")" and not args:
            pos += 1
            break
        arg, pos = _parse_arg(text, pos, line)
        args.append(arg)
        pos = _skip_spaces(text, pos)
        if pos < len(text) and text[pos] == ",":
            pos += 1
            continue
        if pos < len(text) and text[pos] == ")":
            pos += 1
            break
        raise MalformedFact(f"expected ',' or ')' at offset {pos} in {line!r}")
    pos = _skip_spaces(text, pos)
    if pos < len(text) and text[pos] == ".":
        pos += 1
    if text[pos:].strip():
        raise MalformedFact(f"trailing text after fact in {line!r}")
    return Fact(relation, tuple(args))


def _skip_spaces(text: str, pos: int) -> int:
    while pos < len(text) and text[pos].isspace():
        pos += 1
    return pos


# \n, \r, and \t decode to control characters; any other \x folds to x
DECODE_ESCAPES = {"n": "\n", "r": "\r", "t": "\t"}
_ENCODE_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"}


def _parse_arg(text: str, pos: int, line: str) -> tuple[str | int, int]:
    if pos < len(text) and text[pos] == '"':
        chars = []
        pos += 1
        while pos < len(text):
            ch = text[pos]
            if ch == "\\" and pos + 1 < len(text):
                nxt = text[pos + 1]
                chars.append(DECODE_ESCAPES.get(nxt, nxt))
                pos += 2
                continue
            if ch == '"':
                return sys.intern("".join(chars)), pos + 1
            chars.append(ch)
            pos += 1
        raise MalformedFact(f"unterminated quoted symbol in {line!r}")
    m = _INT_RE.match(text, pos)
    if m is None:
        raise MalformedFact(f"expected quoted symbol or integer at offset {pos} in {line!r}")
    return int(m.group(0)), m.end()


def format_value(value: str | int) -> str:
    if isinstance(value, int):
        return str(value)
    escaped = "".join(_ENCODE_ESCAPES.get(ch, ch) for ch in value)
    return f'"{escaped}"'


def format_fact(fact: Fact) -> str:
    return f"{fact.relation}({', '.join(format_value(a) for a in fact.args)})."


def _tuple_key(tup: tuple[str | int, ...]):
    # Stable order even if a column mixes symbols and integers.
    return tuple((0, v, "") if isinstance(v, int) else (1, 0, v) for v in tup)


class Database:
    """Relations mapped to sets of ground tuples."""

    def __init__(self, relations: dict[str, set[tuple]] | None = None):
        self.relations: dict[str, set[tuple]] = {}
        if relations:
            for name, tuples in relations.items():
                for tup in tuples:
                    self.add(name, tup)

    def add(self, relation: str, tup: tuple) -> None:
        existing = self.relations.get(relation)
        if existing is None:
            self.relations[relation] = {tup}
            return
        if existing:
            sample = next(iter(existing))
            if len(sample) != len(tup):
                raise ArityMismatch(
                    f"relation {relation} holds {len(sample)}-tuples, got {len(tup)}-tuple"
                )
        existing.add(tup)

    def add_fact(self, fact: Fact) -> None:
        self.add(fact.relation, fact.args)

    def merge(self, other: "Database") -> None:
        for relation, tuples in other.relations.items():
            for tup in tuples:
                self.add(relation, tup)

    def tuples(self, relation: str) -> set[tuple]:
        return self.relations.get(relation, set())

    def sorted_tuples(self, relation: str) -> list[tuple]:
        return sorted(self.tuples(relation), key=_tuple_key)

    def fact_count(self, relations: Iterable[str] | None = None) -> int:
        names = self.relations if relations is None else relations
        return sum(len(self.relations.get(r, ())) for r in names)

    def iter_facts(self) -> Iterator[Fact]:
        """All facts ordered by (relation, args)."""
        for relation in sorted(self.relations):
            for tup in self.sorted_tuples(relation):
                yield Fact(relation, tup)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Database):
            return NotImplemented
        mine = {r: t for r, t in self.relations.items() if t}
        theirs = {r: t for r, t in other.relations.items() if t}
        return mine == theirs

    def __repr__(self) -> str:
        sizes = ", ".join(f"{r}:{len(t)}" for r, t in sorted(self.relations.items()))
        return f"Database({sizes})"

    # -- .dl fact text -------------------------------------------------------

    def to_dl_text(self) -> str:
        lines = [format_fact(f) for f in self.iter_facts()]
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_dl_text(cls, text: str) -> "Database":
        db = cls()
        # split on "\n" only: escaped symbols never contain real newlines,
        # but they may contain unicode separators that splitlines() honors
        for raw in text.split("\n"):
            line = raw.strip()
            if not line or line.startswith("//"):
                continue
            db.add_fact(parse_fact_line(line))
        return db

    # -- per-relation .facts files (tab separated) ---------------------------

    def write_facts_dir(self, directory: str | Path) -> list[Path]:
        """Write one sorted <relation>.facts file per relation."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        written = []
        for relation in sorted(self.relations):
            rows = []
            for tup in self.sorted_tuples(relation):
                cells = []
                for v in tup:
                    cell = str(v)
                    if "\t" in cell or "\n" in cell:
                        raise FactlogError(
                            f"symbol {cell!r} in {relation} cannot be written tab-separated; "
                            "use the dl format"
                        )
                    cells.append(cell)
                rows.append("\t".join(cells))
            path = directory / f"{relation}.facts"
            path.write_text("\n".join(rows) + ("\n" if rows else ""), encoding="utf-8")
            written.append(path)
        return written

    @classmethod
    def from_facts_dir(
        cls, directory: str | Path, column_types: dict[str, tuple[str | None, ...]] | None = None
    ) -> "Database":
        """Read every <relation>.facts file in a directory.

        column_types maps relation name to 'symbol'/'number' markers (None to
        infer); columns without a marker are read as integers when every
        character fits, symbols otherwise.
        """
        db = cls()
        directory = Path(directory)
        for path in sorted(directory.glob("*.facts")):
            cls._read_facts_file(db, path, column_types)
        return db

    @classmethod
    def from_facts_file(
        cls, path: str | Path, column_types: dict[str, tuple[str | None, ...]] | None = None
    ) -> "Database":
        """Read one <relation>.facts file (relation named after the file)."""
        db = cls()
        cls._read_facts_file(db, Path(path), column_types)
        return db

    @staticmethod
    def _read_facts_file(
        db: "Database", path: Path, column_types: dict[str, tuple[str | None, ...]] | None
    ) -> None:
        relation = path.stem
        types = (column_types or {}).get(relation)
        for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
            if raw == "":
                continue
            cells = raw.split("\t")
            values: list[str | int] = []
            for idx, cell in enumerate(cells):
                declared = types[idx] if types is not None and idx < len(types) else None
                if declared == "number":
                    try:
                        values.append(int(cell))
                    except ValueError:
                        raise MalformedFact(
                            f"{path}:{lineno}: column {idx + 1} of {relation!r} "
                            f"should be a number, got {cell!r}"
                        ) from None
                elif declared == "symbol":
                    values.append(sys.intern(cell))
                elif _INT_TOKEN_RE.match(cell):
                    values.append(int(cell))
                else:
                    values.append(sys.intern(cell))
            db.add(relation, tuple(values))
