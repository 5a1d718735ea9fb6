"""Datalog subset: parser, stratifier, semi-naive evaluator, and queries.

Grammar (whitespace-insensitive; ``//`` starts a line comment):

    program     := statement*
    statement   := declaration | clause
    declaration := '.decl' IDENT '(' [param (',' param)*] ')'
    param       := IDENT ':' ('symbol' | 'number')
    clause      := atom '.'
                 | atom ':-' literal (',' literal)* '.'
    literal     := ('!' | '¬')? atom
    atom        := IDENT '(' [term (',' term)*] ')'
    term        := STRING | INT | IDENT

In rule clauses an identifier term is a variable (``_`` is anonymous); fact
clauses must be ground, so unquoted identifiers there are rejected.  Missing
declarations are inferred: arity from first use, and a column is numeric only
when every constant observed in it is an integer, with types propagated
through rule variables.  Negation must be stratified; evaluation runs one
semi-naive fixpoint per stratum and returns the least model.
"""

from __future__ import annotations

import re
import sys
from bisect import bisect_right
from dataclasses import dataclass, field
from itertools import count
from typing import Iterable, Iterator, NamedTuple, Union

from .errors import (
    ArityMismatch,
    DatalogSyntaxError,
    TypeMismatch,
    UnknownRelation,
    UnsafeRule,
    UnstratifiableProgram,
)
from .facts import DECODE_ESCAPES, Database


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Variable:
    name: str


Term = Union[Variable, str, int]


@dataclass(frozen=True)
class Atom:
    relation: str
    terms: tuple[Term, ...]
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)

    @property
    def arity(self) -> int:
        return len(self.terms)

    def variables(self) -> Iterator[str]:
        for t in self.terms:
            if isinstance(t, Variable) and t.name != "_":
                yield t.name

    def is_ground(self) -> bool:
        return not any(isinstance(t, Variable) for t in self.terms)


@dataclass(frozen=True)
class BodyLiteral:
    atom: Atom
    positive: bool = True


@dataclass(frozen=True)
class DatalogRule:
    head: Atom
    body: tuple[BodyLiteral, ...]


@dataclass(frozen=True)
class Declaration:
    relation: str
    params: tuple[tuple[str, str | None], ...]  # (name, "symbol" | "number" | None)
    explicit: bool = False

    @property
    def arity(self) -> int:
        return len(self.params)

    def column_types(self) -> tuple[str | None, ...]:
        return tuple(t for _, t in self.params)


@dataclass
class DatalogProgram:
    declarations: dict[str, Declaration]
    facts: list[Atom]
    rules: list[DatalogRule]

    def all_relations(self) -> set[str]:
        return set(self.declarations)

    def idb_relations(self) -> set[str]:
        return {r.head.relation for r in self.rules}

    def edb_relations(self) -> set[str]:
        return self.all_relations() - self.idb_relations()


# ---------------------------------------------------------------------------
# Tokenizer


class _Token(NamedTuple):
    kind: str
    value: str
    line: int
    column: int


_TOKEN_RE = re.compile(
    r"""
      (?P<ws>\s+)
    | (?P<comment>//[^\n]*)
    | (?P<directive>\.[A-Za-z_][A-Za-z0-9_]*)
    | (?P<turnstile>:-)
    | (?P<string>"(?:\\.|[^"\\\n])*")
    | (?P<int>-?\d+)
    | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
    | (?P<punct>[(),.:])
    | (?P<neg>[!¬])
    """,
    re.VERBOSE,
)


def _tokenize(text: str) -> list[_Token]:
    line_starts = [0]
    for m in re.finditer(r"\n", text):
        line_starts.append(m.end())

    def loc(offset: int) -> tuple[int, int]:
        ln = bisect_right(line_starts, offset)
        return ln, offset - line_starts[ln - 1] + 1

    tokens: list[_Token] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            ln, col = loc(pos)
            raise DatalogSyntaxError(f"unexpected character {text[pos]!r}", ln, col)
        kind = m.lastgroup or ""
        if kind not in ("ws", "comment"):
            ln, col = loc(m.start())
            tokens.append(_Token(kind, m.group(0), ln, col))
        pos = m.end()
    ln, col = loc(len(text) - 1) if text else (1, 1)
    tokens.append(_Token("eof", "", ln, col + 1 if text else 1))
    return tokens


def _unescape(raw: str) -> str:
    # raw includes the surrounding quotes; the escape table matches the one
    # used when formatting facts, so written databases re-parse losslessly
    body = raw[1:-1]
    if "\\" not in body:
        return sys.intern(body)
    out: list[str] = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch == "\\" and i + 1 < len(body):
            nxt = body[i + 1]
            out.append(DECODE_ESCAPES.get(nxt, nxt))
            i += 2
        else:
            out.append(ch)
            i += 1
    return sys.intern("".join(out))


# ---------------------------------------------------------------------------
# Parser


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def error(self, message: str, tok: _Token | None = None) -> DatalogSyntaxError:
        tok = tok or self.peek()
        return DatalogSyntaxError(message, tok.line, tok.column)

    def expect(self, kind: str, value: str | None = None) -> _Token:
        tok = self.next()
        if tok.kind != kind or (value is not None and tok.value != value):
            want = value if value is not None else kind
            raise self.error(f"expected {want!r}, found {tok.value or 'end of input'!r}", tok)
        return tok

    def program(self) -> tuple[list[tuple[_Token, Declaration]], list[Atom], list[DatalogRule]]:
        decls: list[tuple[_Token, Declaration]] = []
        facts: list[Atom] = []
        rules: list[DatalogRule] = []
        while self.peek().kind != "eof":
            tok = self.peek()
            if tok.kind == "directive":
                if tok.value != ".decl":
                    raise self.error(f"unknown directive {tok.value!r}")
                decls.append(self.declaration())
            elif tok.kind == "ident":
                self.clause(facts, rules)
            else:
                raise self.error(f"expected a declaration or clause, found {tok.value!r}")
        return decls, facts, rules

    def declaration(self) -> tuple[_Token, Declaration]:
        start = self.expect("directive")
        name = self.expect("ident").value
        self.expect("punct", "(")
        params: list[tuple[str, str | None]] = []
        if not (self.peek().kind == "punct" and self.peek().value == ")"):
            while True:
                pname = self.expect("ident").value
                self.expect("punct", ":")
                ptype_tok = self.expect("ident")
                if ptype_tok.value not in ("symbol", "number"):
                    raise self.error(
                        f"unknown column type {ptype_tok.value!r} (expected symbol or number)",
                        ptype_tok,
                    )
                params.append((pname, ptype_tok.value))
                if self.peek().value == ",":
                    self.next()
                    continue
                break
        self.expect("punct", ")")
        return start, Declaration(sys.intern(name), tuple(params), explicit=True)

    def clause(self, facts: list[Atom], rules: list[DatalogRule]) -> None:
        head = self.atom()
        tok = self.next()
        if tok.kind == "punct" and tok.value == ".":
            for t in head.terms:
                if isinstance(t, Variable):
                    raise DatalogSyntaxError(
                        f"facts must be ground; {t.name!r} is a variable "
                        "(quote it to make a symbol)",
                        head.line,
                        head.column,
                    )
            facts.append(head)
            return
        if tok.kind != "turnstile":
            raise self.error(f"expected '.' or ':-' after atom, found {tok.value!r}", tok)
        body: list[BodyLiteral] = []
        while True:
            positive = True
            if self.peek().kind == "neg":
                self.next()
                positive = False
            body.append(BodyLiteral(self.atom(), positive))
            tok = self.next()
            if tok.kind == "punct" and tok.value == ",":
                continue
            if tok.kind == "punct" and tok.value == ".":
                break
            raise self.error(f"expected ',' or '.' in rule body, found {tok.value!r}", tok)
        rules.append(DatalogRule(head, tuple(body)))

    def atom(self) -> Atom:
        name_tok = self.expect("ident")
        self.expect("punct", "(")
        terms: list[Term] = []
        if not (self.peek().kind == "punct" and self.peek().value == ")"):
            while True:
                terms.append(self.term())
                if self.peek().value == ",":
                    self.next()
                    continue
                break
        self.expect("punct", ")")
        return Atom(sys.intern(name_tok.value), tuple(terms), name_tok.line, name_tok.column)

    def term(self) -> Term:
        tok = self.next()
        if tok.kind == "string":
            return _unescape(tok.value)
        if tok.kind == "int":
            return int(tok.value)
        if tok.kind == "ident":
            return Variable(sys.intern(tok.value))
        raise self.error(f"expected a term, found {tok.value or 'end of input'!r}", tok)


def parse_program(text: str) -> DatalogProgram:
    """Parse and validate a program: syntax, arity, safety, type consistency."""
    parser = _Parser(_tokenize(text))
    decl_list, facts, rules = parser.program()

    declared: dict[str, Declaration] = {}
    for tok, decl in decl_list:
        if decl.relation in declared:
            raise DatalogSyntaxError(
                f"duplicate declaration of {decl.relation!r}", tok.line, tok.column
            )
        declared[decl.relation] = decl

    arity = {name: (d.arity, None) for name, d in declared.items()}

    def check_arity(atom: Atom) -> None:
        seen = arity.get(atom.relation)
        if seen is None:
            arity[atom.relation] = (atom.arity, atom)
        elif seen[0] != atom.arity:
            raise ArityMismatch(
                f"{atom.relation!r} used with arity {atom.arity} at line {atom.line} "
                f"but has arity {seen[0]}"
            )

    for fact in facts:
        check_arity(fact)
    for rule in rules:
        check_arity(rule.head)
        for lit in rule.body:
            check_arity(lit.atom)
        _check_safety(rule)

    types = _infer_types(declared, facts, rules, arity)
    declarations: dict[str, Declaration] = {}
    for name, (n, _) in arity.items():
        if name in declared:
            params = tuple(
                (pname, types[(name, i)]) for i, (pname, _) in enumerate(declared[name].params)
            )
            declarations[name] = Declaration(name, params, explicit=True)
        else:
            params = tuple((f"x{i}", types[(name, i)]) for i in range(n))
            declarations[name] = Declaration(name, params, explicit=False)
    return DatalogProgram(declarations, facts, rules)


def _check_safety(rule: DatalogRule) -> None:
    positive_vars = set()
    for lit in rule.body:
        if lit.positive:
            positive_vars.update(lit.atom.variables())
    for t in rule.head.terms:
        if isinstance(t, Variable) and t.name == "_":
            raise UnsafeRule(
                f"'_' is not allowed in the head of the rule at line {rule.head.line}"
            )
    for v in rule.head.variables():
        if v not in positive_vars:
            raise UnsafeRule(
                f"head variable {v!r} at line {rule.head.line} does not occur "
                "in any positive body literal"
            )
    for lit in rule.body:
        if lit.positive:
            continue
        for v in lit.atom.variables():
            if v not in positive_vars:
                raise UnsafeRule(
                    f"variable {v!r} in negated {lit.atom.relation!r} at line "
                    f"{lit.atom.line} does not occur in any positive body literal"
                )
        for t in lit.atom.terms:
            if isinstance(t, Variable) and t.name == "_":
                raise UnsafeRule(
                    f"'_' is not allowed in negated {lit.atom.relation!r} at line {lit.atom.line}"
                )


def _infer_types(
    declared: dict[str, Declaration],
    facts: list[Atom],
    rules: list[DatalogRule],
    arity: dict[str, tuple[int, Atom | None]],
) -> dict[tuple[str, int], str | None]:
    """Union-find over (relation, column) nodes; constants and explicit
    declarations pin concrete types, rule variables merge nodes."""
    parent: dict[tuple[str, int], tuple[str, int]] = {}

    def find(x: tuple[str, int]) -> tuple[str, int]:
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    pinned: dict[tuple[str, int], str] = {}

    def constrain(node: tuple[str, int], t: str, where: str) -> None:
        root = find(node)
        existing = pinned.get(root)
        if existing is not None and existing != t:
            rel, col = node
            raise TypeMismatch(
                f"column {col + 1} of {rel!r} is used as both "
                f"{existing} and {t} ({where})"
            )
        pinned[root] = t

    def union(a: tuple[str, int], b: tuple[str, int]) -> None:
        ra, rb = find(a), find(b)
        if ra == rb:
            return
        ta, tb = pinned.get(ra), pinned.get(rb)
        if ta is not None and tb is not None and ta != tb:
            raise TypeMismatch(
                f"column {a[1] + 1} of {a[0]!r} ({ta}) is joined with "
                f"column {b[1] + 1} of {b[0]!r} ({tb})"
            )
        parent[rb] = ra
        if ta is None and tb is not None:
            pinned[ra] = tb
        pinned.pop(rb, None)

    for name, decl in declared.items():
        for i, (_, t) in enumerate(decl.params):
            if t is not None:
                constrain((name, i), t, "declared")

    def constrain_constants(atom: Atom, where: str) -> None:
        for i, t in enumerate(atom.terms):
            if isinstance(t, int):
                constrain((atom.relation, i), "number", where)
            elif isinstance(t, str):
                constrain((atom.relation, i), "symbol", where)

    for fact in facts:
        constrain_constants(fact, f"fact at line {fact.line}")
    for rule in rules:
        occurrences: dict[str, list[tuple[str, int]]] = {}
        for atom in [rule.head] + [lit.atom for lit in rule.body]:
            constrain_constants(atom, f"rule at line {rule.head.line}")
            for i, t in enumerate(atom.terms):
                if isinstance(t, Variable) and t.name != "_":
                    occurrences.setdefault(t.name, []).append((atom.relation, i))
        for nodes in occurrences.values():
            for other in nodes[1:]:
                union(nodes[0], other)

    return {
        (name, i): pinned.get(find((name, i)))
        for name, (n, _) in arity.items()
        for i in range(n)
    }


# ---------------------------------------------------------------------------
# Stratification


def stratify(program: DatalogProgram) -> list[set[str]]:
    """Partition relations into strata; every negated relation sits strictly
    below its users.  Raises UnstratifiableProgram on a negative cycle."""
    relations = sorted(program.all_relations())
    deps: dict[str, set[str]] = {r: set() for r in relations}
    negative: set[tuple[str, str]] = set()
    for rule in program.rules:
        h = rule.head.relation
        for lit in rule.body:
            deps[h].add(lit.atom.relation)
            if not lit.positive:
                negative.add((h, lit.atom.relation))

    sccs = _tarjan(relations, deps)  # emitted dependencies-first
    component = {rel: i for i, scc in enumerate(sccs) for rel in scc}
    for h, b in sorted(negative):
        if component[h] == component[b]:
            raise UnstratifiableProgram(
                f"{h!r} depends negatively on {b!r} inside a recursive cycle"
            )

    level: dict[int, int] = {}
    for i, scc in enumerate(sccs):
        lv = 0
        for rel in scc:
            for dep in deps[rel]:
                j = component[dep]
                if j != i:
                    lv = max(lv, level[j] + 1)
        level[i] = lv

    height = max(level.values(), default=-1) + 1
    out: list[set[str]] = [set() for _ in range(height)]
    for i, scc in enumerate(sccs):
        out[level[i]].update(scc)
    return out


def _tarjan(nodes: list[str], deps: dict[str, set[str]]) -> list[set[str]]:
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    sccs: list[set[str]] = []
    counter = count()

    for start in nodes:
        if start in index:
            continue
        index[start] = low[start] = next(counter)
        stack.append(start)
        on_stack.add(start)
        work: list[tuple[str, Iterator[str]]] = [(start, iter(sorted(deps[start])))]
        while work:
            node, it = work[-1]
            descended = False
            for succ in it:
                if succ not in index:
                    index[succ] = low[succ] = next(counter)
                    stack.append(succ)
                    on_stack.add(succ)
                    work.append((succ, iter(sorted(deps[succ]))))
                    descended = True
                    break
                if succ in on_stack:
                    low[node] = min(low[node], index[succ])
            if descended:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                comp: set[str] = set()
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.add(w)
                    if w == node:
                        break
                sccs.append(comp)
    return sccs


# ---------------------------------------------------------------------------
# Evaluation


_EMPTY: frozenset = frozenset()
_MISSING = object()


class _IndexCache:
    """Hash indexes per (relation, bound positions), rebuilt when a relation
    has grown since the index was built."""

    def __init__(self, relations: dict[str, set[tuple]]):
        self.relations = relations
        self.store: dict[tuple[str, tuple[int, ...]], tuple[int, dict]] = {}

    def lookup(self, rel: str, positions: tuple[int, ...], key: tuple) -> list[tuple] | tuple:
        tuples = self.relations.get(rel)
        if not tuples:
            return ()
        entry = self.store.get((rel, positions))
        if entry is None or entry[0] != len(tuples):
            mapping: dict[tuple, list[tuple]] = {}
            for t in tuples:
                mapping.setdefault(tuple(t[i] for i in positions), []).append(t)
            entry = (len(tuples), mapping)
            self.store[(rel, positions)] = entry
        return entry[1].get(key, ())


def _ground(atom: Atom, env: dict[str, object]) -> tuple:
    return tuple(env[t.name] if isinstance(t, Variable) else t for t in atom.terms)


def _eval_rule(
    relations: dict[str, set[tuple]],
    index: _IndexCache,
    rule: DatalogRule,
    delta_pos: int | None = None,
    delta_tuples: set[tuple] | None = None,
) -> Iterator[tuple]:
    """Yield head tuples derivable now.  With delta_pos set, the positive
    literal at that body position ranges over delta_tuples instead of its
    full relation (the semi-naive substitution)."""
    positives = [(i, lit.atom) for i, lit in enumerate(rule.body) if lit.positive]
    negatives = [lit.atom for lit in rule.body if not lit.positive]
    if delta_pos is not None:
        positives = [p for p in positives if p[0] == delta_pos] + [
            p for p in positives if p[0] != delta_pos
        ]

    def visit(k: int, env: dict[str, object]) -> Iterator[tuple]:
        if k == len(positives):
            for natom in negatives:
                if _ground(natom, env) in relations.get(natom.relation, _EMPTY):
                    return
            yield _ground(rule.head, env)
            return
        body_pos, atom = positives[k]
        bound: list[tuple[int, object]] = []
        free: list[tuple[int, str]] = []
        for i, t in enumerate(atom.terms):
            if isinstance(t, Variable):
                if t.name == "_":
                    continue
                if t.name in env:
                    bound.append((i, env[t.name]))
                else:
                    free.append((i, t.name))
            else:
                bound.append((i, t))
        if delta_pos is not None and body_pos == delta_pos:
            pool: Iterable = delta_tuples or ()
        elif not free and len(bound) == atom.arity:
            # fully ground: membership test
            probe = tuple(v for _, v in bound)
            if probe in relations.get(atom.relation, _EMPTY):
                yield from visit(k + 1, env)
            return
        elif bound:
            positions = tuple(i for i, _ in bound)
            key = tuple(v for _, v in bound)
            pool = index.lookup(atom.relation, positions, key)
        else:
            pool = relations.get(atom.relation, _EMPTY)
        for tup in pool:
            if any(tup[i] != v for i, v in bound):
                continue
            updates: dict[str, object] = {}
            clash = False
            for i, name in free:
                v = tup[i]
                prev = updates.get(name, _MISSING)
                if prev is not _MISSING and prev != v:
                    clash = True
                    break
                updates[name] = v
            if clash:
                continue
            yield from visit(k + 1, {**env, **updates} if updates else env)

    yield from visit(0, {})


def evaluate(program: DatalogProgram, edb: Database | None = None) -> Database:
    """Least model of the program over the given EDB (copied, not mutated).

    Per stratum: one naive seeding round, then semi-naive delta passes until
    no rule derives a new tuple.  EDB relations unknown to the program are
    carried through unchanged.
    """
    db = Database()
    if edb is not None:
        _check_edb(program, edb)
        for rel, tuples in edb.relations.items():
            db.relations.setdefault(rel, set()).update(tuples)
    for fact in program.facts:
        db.relations.setdefault(fact.relation, set()).add(tuple(fact.terms))
    for rel in program.all_relations():
        db.relations.setdefault(rel, set())

    strata = stratify(program)
    index = _IndexCache(db.relations)
    for stratum in strata:
        rules = [r for r in program.rules if r.head.relation in stratum]
        if not rules:
            continue
        recursive_positions = {
            id(rule): [
                i
                for i, lit in enumerate(rule.body)
                if lit.positive and lit.atom.relation in stratum
            ]
            for rule in rules
        }
        delta: dict[str, set[tuple]] = {}
        for rule in rules:
            rel = rule.head.relation
            known = db.relations[rel]
            fresh = {t for t in _eval_rule(db.relations, index, rule) if t not in known}
            if fresh:
                delta.setdefault(rel, set()).update(fresh)
        for rel, fresh in delta.items():
            db.relations[rel].update(fresh)

        while delta:
            derived: dict[str, set[tuple]] = {}
            for rule in rules:
                head_rel = rule.head.relation
                for pos in recursive_positions[id(rule)]:
                    dset = delta.get(rule.body[pos].atom.relation)
                    if not dset:
                        continue
                    known = db.relations[head_rel]
                    new_here = derived.get(head_rel)
                    for t in _eval_rule(db.relations, index, rule, pos, dset):
                        if t not in known and (new_here is None or t not in new_here):
                            if new_here is None:
                                new_here = derived.setdefault(head_rel, set())
                            new_here.add(t)
            delta = derived
            for rel, fresh in delta.items():
                db.relations[rel].update(fresh)
    return db


def _check_edb(program: DatalogProgram, edb: Database) -> None:
    for rel, tuples in edb.relations.items():
        decl = program.declarations.get(rel)
        if decl is None or not tuples:
            continue
        sample = next(iter(tuples))
        if len(sample) != decl.arity:
            raise ArityMismatch(
                f"input relation {rel!r} has arity {len(sample)}, "
                f"program expects {decl.arity}"
            )
        col_types = decl.column_types()
        checked = [(i, t) for i, t in enumerate(col_types) if t is not None]
        if not checked:
            continue
        for tup in tuples:
            for i, t in checked:
                v = tup[i]
                if t == "number" and not isinstance(v, int):
                    raise TypeMismatch(
                        f"{rel!r} column {i + 1} expects a number, got {v!r}"
                    )
                if t == "symbol" and not isinstance(v, str):
                    raise TypeMismatch(
                        f"{rel!r} column {i + 1} expects a symbol, got {v!r}"
                    )


# ---------------------------------------------------------------------------
# Queries


def parse_query(text: str) -> Atom:
    """Parse a query pattern like ``calls("main", X)``."""
    parser = _Parser(_tokenize(text))
    atom = parser.atom()
    tail = parser.next()
    if tail.kind == "punct" and tail.value == ".":
        tail = parser.next()
    if tail.kind != "eof":
        raise parser.error(f"unexpected trailing input {tail.value!r}", tail)
    return atom


def query(db: Database, pattern: str | Atom) -> set[tuple]:
    """Bindings of the pattern's variables over matching tuples.

    All-constant patterns act as a membership test: ``{()}`` when the fact
    holds, the empty set otherwise.
    """
    atom = parse_query(pattern) if isinstance(pattern, str) else pattern
    if atom.relation not in db.relations:
        raise UnknownRelation(f"unknown relation {atom.relation!r}")
    tuples = db.relations[atom.relation]
    if tuples:
        sample = next(iter(tuples))
        if len(sample) != atom.arity:
            raise ArityMismatch(
                f"{atom.relation!r} has arity {len(sample)}, query uses {atom.arity}"
            )
    var_order: list[str] = []
    for t in atom.terms:
        if isinstance(t, Variable) and t.name != "_" and t.name not in var_order:
            var_order.append(t.name)
    out: set[tuple] = set()
    for tup in tuples:
        env: dict[str, object] = {}
        ok = True
        for i, t in enumerate(atom.terms):
            if isinstance(t, Variable):
                if t.name == "_":
                    continue
                seen = env.get(t.name, _MISSING)
                if seen is _MISSING:
                    env[t.name] = tup[i]
                elif seen != tup[i]:
                    ok = False
                    break
            elif t != tup[i]:
                ok = False
                break
        if ok:
            out.add(tuple(env[v] for v in var_order))
    return out
