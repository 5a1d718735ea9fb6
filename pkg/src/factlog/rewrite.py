"""Rewrite templates, rewrite rules, and template-driven fact generation.

A fact spec couples a match template with a rewrite template and an optional
rule.  The rule may re-match inside a bound hole and rewrite each inner match
into a fact line; the hole is then rebound to those lines, so the final
rewrite emits one fact per inner match:

    [match]
    func $f(...) $r? {$body*}

    [rule]
    where nested, rewrite $body { $c(...) -> edge("$f", "$c"). }

    [rewrite]
    $body

Rewrite templates substitute hole values and positional properties: ``$x`` is
the bound text, ``$x.line`` / ``$x.column`` are 1-based positions, and a
trailing ``+ n`` or ``- n`` after a positional property is folded into it at
substitution time (``next($x.line, $x.line + 1)``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterator, Union

from .errors import MalformedFact, MalformedHole, SpecFormatError, UnbalancedInput, UnboundHole
from .facts import Database, parse_fact_line
from .languages import LanguageDefinition, Region, SourceMap, classify, scan_balanced
from .templates import (
    Binding,
    Match,
    MatchEnvironment,
    Property,
    Template,
    first_match,
    iter_matches,
    parse_template,
)


# ---------------------------------------------------------------------------
# Rewrite templates


@dataclass(frozen=True)
class SubstLiteral:
    text: str


@dataclass(frozen=True)
class Substitution:
    name: str
    prop: Property = Property.VALUE
    offset: int = 0  # nonzero only for line/column properties


RewriteAtom = Union[SubstLiteral, Substitution]


@dataclass(frozen=True)
class RewriteTemplate:
    text: str
    atoms: tuple[RewriteAtom, ...]


_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_PROP_RE = re.compile(r"\.(line|column|value)(?![A-Za-z0-9_])")
_OFFSET_RE = re.compile(r"[ \t]*([+-])[ \t]*(\d+)")

_PROPS = {"line": Property.LINE, "column": Property.COLUMN, "value": Property.VALUE}


def parse_rewrite_template(text: str) -> RewriteTemplate:
    """Parse rewrite text into literal and substitution atoms."""
    atoms: list[RewriteAtom] = []
    lit: list[str] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch != "$":
            lit.append(ch)
            i += 1
            continue
        m = _NAME_RE.match(text, i + 1)
        if m is None:
            raise MalformedHole(f"'$' at offset {i} is not followed by a hole name")
        name = m.group(0)
        i = m.end()
        prop = Property.VALUE
        pm = _PROP_RE.match(text, i)
        if pm is not None:
            prop = _PROPS[pm.group(1)]
            i = pm.end()
        offset = 0
        if prop in (Property.LINE, Property.COLUMN):
            om = _OFFSET_RE.match(text, i)
            if om is not None:
                offset = int(om.group(1) + om.group(2))
                i = om.end()
        if lit:
            atoms.append(SubstLiteral("".join(lit)))
            lit.clear()
        atoms.append(Substitution(name, prop, offset))
    if lit:
        atoms.append(SubstLiteral("".join(lit)))
    return RewriteTemplate(text, tuple(atoms))


def substitute(template: RewriteTemplate, env: MatchEnvironment) -> str:
    """Instantiate a rewrite template against bound holes."""
    parts: list[str] = []
    for atom in template.atoms:
        if isinstance(atom, SubstLiteral):
            parts.append(atom.text)
            continue
        b = env[atom.name]
        if atom.prop is Property.VALUE:
            parts.append(b.text)
        elif atom.prop is Property.LINE:
            parts.append(str(b.line + atom.offset))
        else:
            parts.append(str(b.column + atom.offset))
    return "".join(parts)


# ---------------------------------------------------------------------------
# Rewrite rules


class CondOp(Enum):
    EQ = "=="
    NEQ = "!="


@dataclass(frozen=True)
class Condition:
    hole: str
    op: CondOp
    value: str

    def holds(self, text: str) -> bool:
        return (text == self.value) if self.op is CondOp.EQ else (text != self.value)


@dataclass(frozen=True)
class NestedRewrite:
    target: str
    inner_match: Template
    inner_rewrite: RewriteTemplate


@dataclass(frozen=True)
class RuleSpec:
    nested: bool = False
    conditions: tuple[Condition, ...] = ()
    nested_rewrites: tuple[NestedRewrite, ...] = ()

    def inner_hole_names(self) -> set[str]:
        names: set[str] = set()
        for nr in self.nested_rewrites:
            names.update(nr.inner_match.hole_names())
        return names


EMPTY_RULE = RuleSpec()


def parse_rule(text: str) -> RuleSpec:
    """Parse ``where nested, $h != "lit", rewrite $h { tin -> tout }``."""
    src = text.strip()
    if not src:
        return EMPTY_RULE
    cur = _Cursor(src)
    if cur.take_word() != "where":
        raise SpecFormatError(f"rule must start with 'where': {src[:40]!r}")
    nested = False
    conditions: list[Condition] = []
    rewrites: list[NestedRewrite] = []
    while True:
        cur.skip_ws()
        if cur.at_end():
            break
        word = cur.peek_word()
        if word == "nested":
            cur.take_word()
            nested = True
        elif word == "rewrite":
            cur.take_word()
            rewrites.append(_parse_rewrite_clause(cur))
        elif cur.peek() == "$":
            conditions.append(_parse_condition(cur))
        else:
            raise SpecFormatError(f"unexpected rule item at {cur.rest()[:40]!r}")
        cur.skip_ws()
        if cur.at_end():
            break
        if cur.peek() == ",":
            cur.advance(1)
            continue
        raise SpecFormatError(f"expected ',' between rule items at {cur.rest()[:40]!r}")
    return RuleSpec(nested, tuple(conditions), tuple(rewrites))


class _Cursor:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def peek_word(self) -> str:
        self.skip_ws()
        m = _NAME_RE.match(self.text, self.pos)
        return m.group(0) if m else ""

    def take_word(self) -> str:
        self.skip_ws()
        m = _NAME_RE.match(self.text, self.pos)
        if m is None:
            raise SpecFormatError(f"expected a word at {self.rest()[:40]!r}")
        self.pos = m.end()
        return m.group(0)

    def advance(self, n: int) -> None:
        self.pos += n

    def rest(self) -> str:
        return self.text[self.pos :]

    def expect(self, token: str) -> None:
        self.skip_ws()
        if not self.text.startswith(token, self.pos):
            raise SpecFormatError(f"expected {token!r} at {self.rest()[:40]!r}")
        self.pos += len(token)


def _parse_condition(cur: _Cursor) -> Condition:
    cur.expect("$")
    name = cur.take_word()
    cur.skip_ws()
    if cur.text.startswith("==", cur.pos):
        op = CondOp.EQ
    elif cur.text.startswith("!=", cur.pos):
        op = CondOp.NEQ
    else:
        raise SpecFormatError(f"expected '==' or '!=' after ${name}")
    cur.advance(2)
    cur.skip_ws()
    cur.expect('"')
    chars: list[str] = []
    while cur.pos < len(cur.text):
        ch = cur.text[cur.pos]
        if ch == "\\" and cur.pos + 1 < len(cur.text):
            chars.append(cur.text[cur.pos + 1])
            cur.advance(2)
            continue
        if ch == '"':
            cur.advance(1)
            return Condition(name, op, "".join(chars))
        chars.append(ch)
        cur.advance(1)
    raise SpecFormatError(f"unterminated string in condition on ${name}")


def _parse_rewrite_clause(cur: _Cursor) -> NestedRewrite:
    cur.expect("$")
    target = cur.take_word()
    cur.expect("{")
    body, end = _until_matching_brace(cur.text, cur.pos)
    cur.pos = end
    arrow = _find_arrow(body)
    if arrow == -1:
        raise SpecFormatError(f"rewrite clause for ${target} lacks '->'")
    inner_match = parse_template(body[:arrow].strip())
    inner_rewrite = parse_rewrite_template(body[arrow + 2 :].strip())
    return NestedRewrite(target, inner_match, inner_rewrite)


def _until_matching_brace(text: str, pos: int) -> tuple[str, int]:
    """Content between pos and its matching '}', quote aware."""
    depth = 1
    start = pos
    in_string = False
    while pos < len(text):
        ch = text[pos]
        if in_string:
            if ch == "\\":
                pos += 2
                continue
            if ch == '"':
                in_string = False
        elif ch == '"':
            in_string = True
        elif ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
            if depth == 0:
                return text[start:pos], pos + 1
        pos += 1
    raise SpecFormatError("unterminated '{' in rewrite clause")


def _find_arrow(body: str) -> int:
    in_string = False
    pos = 0
    while pos < len(body) - 1:
        ch = body[pos]
        if in_string:
            if ch == "\\":
                pos += 2
                continue
            if ch == '"':
                in_string = False
        elif ch == '"':
            in_string = True
        elif ch == "-" and body[pos + 1] == ">":
            return pos
        pos += 1
    return -1


# ---------------------------------------------------------------------------
# Fact specs


@dataclass(frozen=True)
class FactSpec:
    """A named (match template, rule, rewrite template) triple for one language."""

    name: str
    language: str
    match: Template
    rule: RuleSpec
    rewrite: RewriteTemplate


_SECTIONS = ("match", "rule", "rewrite")


def parse_fact_spec(text: str, name: str = "spec", language: str = "") -> FactSpec:
    """Parse the three-section spec format ([match], [rule], [rewrite])."""
    sections: dict[str, list[str]] = {}
    current: str | None = None
    for raw in text.splitlines():
        stripped = raw.strip()
        if stripped.startswith("[") and stripped.endswith("]") and stripped[1:-1] in _SECTIONS:
            current = stripped[1:-1]
            if current in sections:
                raise SpecFormatError(f"{name}: duplicate [{current}] section")
            sections[current] = []
            continue
        if current is None:
            if stripped and not stripped.startswith("#"):
                raise SpecFormatError(f"{name}: text before the first section header: {stripped!r}")
            continue
        sections[current].append(raw)
    for required in ("match", "rewrite"):
        if required not in sections:
            raise SpecFormatError(f"{name}: missing [{required}] section")
    match_text = _section_body(sections["match"])
    rewrite_text = _section_body(sections["rewrite"])
    rule_text = _section_body(sections.get("rule", []))
    if not match_text:
        raise SpecFormatError(f"{name}: [match] section is empty")
    return FactSpec(
        name=name,
        language=language,
        match=parse_template(match_text),
        rule=parse_rule(rule_text),
        rewrite=parse_rewrite_template(rewrite_text),
    )


def _section_body(lines: list[str]) -> str:
    start, end = 0, len(lines)
    while start < end and not lines[start].strip():
        start += 1
    while end > start and not lines[end - 1].strip():
        end -= 1
    return "\n".join(lines[start:end])


def load_fact_spec(path: str | Path, language: str = "") -> FactSpec:
    path = Path(path)
    return parse_fact_spec(path.read_text(encoding="utf-8"), name=path.stem, language=language)


# ---------------------------------------------------------------------------
# Rule application


def apply_rule(rule: RuleSpec, env: MatchEnvironment, smap: SourceMap) -> MatchEnvironment | None:
    """Apply conditions and nested rewrites; None means the rule vetoed the match.

    Conditions on holes bound by the outer match gate the whole rule;
    conditions naming holes bound only inside nested rewrites filter the
    individual inner matches instead.
    """
    inner_names = rule.inner_hole_names()
    for cond in rule.conditions:
        if cond.hole in env:
            if not cond.holds(env[cond.hole].text):
                return None
        elif cond.hole not in inner_names:
            raise UnboundHole(f"condition names unbound hole ${cond.hole}")
    bindings = dict(env.bindings)
    for nr in rule.nested_rewrites:
        target = env[nr.target]
        lines: list[str] = []
        for m in _collect_inner(nr.inner_match, smap, target.start, target.end, rule.nested):
            combined = MatchEnvironment({**bindings, **m.env.bindings})
            vetoed = False
            for cond in rule.conditions:
                if cond.hole in m.env and not cond.holds(m.env[cond.hole].text):
                    vetoed = True
                    break
            if vetoed:
                continue
            lines.append(substitute(nr.inner_rewrite, combined))
        bindings[nr.target] = Binding(
            "\n".join(lines), target.start, target.end, target.line, target.column
        )
    return MatchEnvironment(bindings)


def _collect_inner(
    template: Template, smap: SourceMap, lo: int, hi: int, nested: bool
) -> list[Match]:
    """Inner matches inside a bound span.

    Plain mode is the ordinary non-overlapping scan.  Nested mode additionally
    descends into every balanced subspan, emitting each enclosing match before
    the matches nested inside it, in source order otherwise.
    """
    if not nested:
        return list(iter_matches(template, smap, lo, hi))
    out: list[Match] = []
    pos = lo
    while pos < hi:
        m = first_match(template, smap, pos, hi)
        g = _next_group(smap, pos, hi)
        if m is None and g is None:
            break
        if m is not None and (g is None or m.start <= g[0]):
            out.append(m)
            for gs, ge in _iter_groups(smap, m.start, m.end):
                out.extend(_collect_inner(template, smap, gs + 1, ge - 1, True))
            pos = m.end
        else:
            gs, ge = g
            out.extend(_collect_inner(template, smap, gs + 1, ge - 1, True))
            pos = ge
    return out


def _next_group(smap: SourceMap, lo: int, hi: int) -> tuple[int, int] | None:
    return next(_iter_groups(smap, lo, hi), None)


def _iter_groups(smap: SourceMap, lo: int, hi: int) -> Iterator[tuple[int, int]]:
    """Top-level balanced groups within a window, skipping strings/comments."""
    opens = set(smap.language.open_chars)
    src = smap.source
    pos = lo
    while pos < hi:
        found = -1
        for s, e, kind in smap.intervals[smap.interval_index(pos) :]:
            if s >= hi:
                break
            if kind is not Region.CODE:
                continue
            for i in range(max(s, pos), min(e, hi)):
                if src[i] in opens:
                    found = i
                    break
            if found != -1:
                break
        if found == -1:
            return
        try:
            end = scan_balanced(smap, found, hi)
        except UnbalancedInput:
            pos = found + 1
            continue
        yield found, end
        pos = end


# ---------------------------------------------------------------------------
# Fact generation


@dataclass
class FileFacts:
    """Per-file generation result."""

    path: str
    facts: Database
    match_count: int
    diagnostics: list[str] = field(default_factory=list)


def facts_for_source(spec: FactSpec, lang: LanguageDefinition, path: str, source: str) -> FileFacts:
    """Run one fact spec over one source text."""
    smap = classify(source, lang)
    result = facts_for_smap(spec, smap, path)
    result.diagnostics[:0] = [f"{path}: {w}" for w in smap.warnings]
    return result


def facts_for_smap(spec: FactSpec, smap: SourceMap, path: str = "<memory>") -> FileFacts:
    """Run one fact spec over an already-classified source."""
    result = FileFacts(path, Database(), 0)
    for m in iter_matches(spec.match, smap):
        result.match_count += 1
        env = apply_rule(spec.rule, m.env, smap)
        if env is None:
            continue
        text = substitute(spec.rewrite, env)
        for raw in text.splitlines():
            line = raw.strip()
            if not line:
                continue
            try:
                result.facts.add_fact(parse_fact_line(line))
            except MalformedFact as exc:
                where = smap.line_of(m.start)
                result.diagnostics.append(f"{path}:{where}: dropped bad fact line: {exc}")
    return result


def generate_facts(spec: FactSpec, files: list[tuple[str, str]], lang: LanguageDefinition) -> tuple[Database, list[str]]:
    """Apply one spec to (path, source) pairs; returns merged facts and diagnostics."""
    db = Database()
    diagnostics: list[str] = []
    for path, source in files:
        result = facts_for_source(spec, lang, path, source)
        db.merge(result.facts)
        diagnostics.extend(result.diagnostics)
    return db, diagnostics
