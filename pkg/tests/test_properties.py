"""Property-based checks: the engine against independent oracles, and
round-trip invariants for the text formats."""

from __future__ import annotations

from hypothesis import assume, given, settings
from hypothesis import strategies as st

from factlog import (
    GO,
    Database,
    Region,
    classify,
    evaluate,
    format_fact,
    parse_program,
    query,
)
from factlog.facts import Fact, parse_fact_line
from oracles import naive_evaluate, reachability

# ---------------------------------------------------------------------------
# Random Datalog programs

RELS = ("p", "q", "r", "s")
VARS = ("X", "Y", "Z", "W")
CONSTS = ('"a"', '"b"', '"c"', '"d"')


@st.composite
def programs(draw, negation: bool = False):
    """A safe program as text.  With negation=True relations are layered so
    the result is stratifiable by construction."""
    arity = {rel: draw(st.integers(1, 2)) for rel in RELS}
    layer = {rel: i for i, rel in enumerate(RELS)}
    lines = []
    for rel in RELS[:2]:
        for tup in draw(
            st.sets(
                st.tuples(*[st.sampled_from(CONSTS)] * arity[rel]), max_size=4
            )
        ):
            lines.append(f"{rel}({', '.join(tup)}).")
    n_rules = draw(st.integers(1, 5))
    for _ in range(n_rules):
        head_rel = draw(st.sampled_from(RELS))
        n_body = draw(st.integers(1, 3))
        body = []
        body_vars: list[str] = []
        for _ in range(n_body):
            rel = draw(st.sampled_from(RELS))
            if negation and layer[rel] > layer[head_rel]:
                rel = head_rel
            terms = [
                draw(st.sampled_from(VARS + CONSTS + ("_",)))
                for _ in range(arity[rel])
            ]
            body.append(f"{rel}({', '.join(terms)})")
            body_vars.extend(t for t in terms if t in VARS)
        if negation and body_vars and draw(st.booleans()):
            rel = draw(st.sampled_from(RELS[: layer[head_rel]] or RELS[:1]))
            if layer[rel] < layer[head_rel]:
                terms = [
                    draw(st.sampled_from(tuple(body_vars) + CONSTS))
                    for _ in range(arity[rel])
                ]
                body.append(f"!{rel}({', '.join(terms)})")
        head_pool = tuple(body_vars) + CONSTS
        head_terms = [
            draw(st.sampled_from(head_pool)) for _ in range(arity[head_rel])
        ]
        lines.append(f"{head_rel}({', '.join(head_terms)}) :- {', '.join(body)}.")
    return "\n".join(lines) + "\n"


def normalized(db: Database) -> dict[str, set[tuple]]:
    return {rel: set(rows) for rel, rows in db.relations.items() if rows}


class TestEngineAgainstOracle:
    @given(programs())
    @settings(max_examples=120, deadline=None)
    def test_negation_free_matches_naive(self, text):
        prog = parse_program(text)
        engine = normalized(evaluate(prog))
        oracle = {rel: rows for rel, rows in naive_evaluate(prog).items() if rows}
        assert engine == oracle

    @given(programs(negation=True))
    @settings(max_examples=120, deadline=None)
    def test_stratified_negation_matches_naive(self, text):
        prog = parse_program(text)
        engine = normalized(evaluate(prog))
        oracle = {rel: rows for rel, rows in naive_evaluate(prog).items() if rows}
        assert engine == oracle

    @given(programs())
    @settings(max_examples=50, deadline=None)
    def test_rule_order_is_irrelevant(self, text):
        lines = text.strip().splitlines()
        prog = parse_program(text)
        reordered = parse_program("\n".join(reversed(lines)) + "\n")
        assert normalized(evaluate(prog)) == normalized(evaluate(reordered))

    @given(programs(), st.sampled_from(RELS[:2]))
    @settings(max_examples=50, deadline=None)
    def test_monotone_in_the_edb(self, text, rel):
        prog = parse_program(text)
        assume(rel in prog.declarations)
        arity = prog.declarations[rel].arity
        base = normalized(evaluate(prog))
        extra = Database()
        extra.add(rel, tuple("zz" for _ in range(arity)))
        grown = normalized(evaluate(prog, extra))
        for name, rows in base.items():
            assert rows <= grown.get(name, set())


EDGES = st.sets(
    st.tuples(st.sampled_from("abcdefgh"), st.sampled_from("abcdefgh")),
    max_size=24,
)

TC = (
    "calls(X, Y) :- edge(X, Y).\n"
    "calls(X, Y) :- edge(X, K), calls(K, Y).\n"
)


class TestTransitiveClosure:
    @given(EDGES)
    @settings(max_examples=120, deadline=None)
    def test_calls_equals_bfs_reachability(self, edges):
        db = Database()
        for pair in edges:
            db.add("edge", pair)
        got = evaluate(parse_program(TC), db).tuples("calls")
        assert got == reachability(edges)

    @given(EDGES, st.sampled_from("abcdefgh"))
    @settings(max_examples=40, deadline=None)
    def test_query_projects_closure(self, edges, src):
        db = Database()
        for pair in edges:
            db.add("edge", pair)
        solved = evaluate(parse_program(TC), db)
        got = query(solved, f'calls("{src}", X)')
        want = {(b,) for (a, b) in reachability(edges) if a == src}
        assert got == want


SYMBOLS = st.text(st.characters(blacklist_categories=("Cs",)), max_size=12)
VALUES = st.one_of(SYMBOLS, st.integers(-10**9, 10**9))


class TestFormatRoundTrips:
    @given(st.tuples(VALUES, VALUES))
    @settings(max_examples=200)
    def test_fact_line_round_trip(self, args):
        fact = Fact("rel", args)
        assert parse_fact_line(format_fact(fact)) == fact

    @given(st.sets(st.tuples(VALUES, VALUES), max_size=8))
    @settings(max_examples=100)
    def test_dl_text_round_trip(self, rows):
        db = Database()
        for row in rows:
            db.add("m", row)
        assert Database.from_dl_text(db.to_dl_text()) == db


SOURCE = st.text(alphabet='abc ()"`\'/*\\\n{};', max_size=60)


class TestClassifierInvariants:
    @given(SOURCE)
    @settings(max_examples=200)
    def test_intervals_partition_the_source(self, source):
        smap = classify(source, GO)
        pos = 0
        for start, end, region in smap.intervals:
            assert start == pos and end > start
            assert isinstance(region, Region)
            pos = end
        assert pos == len(source)

    @given(SOURCE)
    @settings(max_examples=100)
    def test_line_col_roundtrip(self, source):
        smap = classify(source, GO)
        for offset in range(len(source)):
            line, col = smap.line_col(offset)
            lines = source.splitlines(keepends=True) or [""]
            assert source[offset] == (lines[line - 1] + "\n")[col - 1]
