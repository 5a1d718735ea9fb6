"""Language definitions and comment/string-aware classification of source text.

A LanguageDefinition is a small lexical profile: how comments start and stop,
how strings are quoted and escaped, and which characters pair up for balance
scanning.  classify() turns text plus a profile into a SourceMap that assigns
every offset to exactly one region kind (code, comment, string body, string
delimiter).  Template matching and balance scanning build on the partition so
that a ')' inside "a )" or /* ) */ never confuses them.

Definitions for go, c, zig, and the toy arithmetic language are registered at
import time.  Additional languages can be registered programmatically or
loaded from an INI-style config file (see load_language_file).
"""

from __future__ import annotations

import bisect
import configparser
import re
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

from .errors import LanguageError, UnbalancedInput


class Region(Enum):
    """Classification of a source offset."""

    CODE = "code"
    COMMENT = "comment"
    STRING_BODY = "string_body"
    STRING_DELIMITER = "string_delimiter"


DEFAULT_BALANCED_PAIRS = (("(", ")"), ("[", "]"), ("{", "}"))


@dataclass(frozen=True)
class LanguageDefinition:
    """Lexical profile of one language.

    Attributes:
        name: registry key, lower case by convention.
        line_comment_prefixes: each starts a comment that runs to end of line
            (the newline itself stays code).
        block_comment_pairs: (open, close) pairs; the delimiters are part of
            the comment region.
        string_delimiters: (open, close, escape) triples; escape may be None
            for raw strings.  Open and close delimiters are classified as
            STRING_DELIMITER, the contents as STRING_BODY.
        balanced_pairs: single-character (open, close) pairs used by balance
            scanning and expression holes.
        identifier_extra: characters that count as identifier constituents in
            addition to alphanumerics ('.' keeps qualified names together).
        value_prefix_chars: characters allowed as a unary prefix of one
            expression-hole unit ('*' lets go bind pointer types whole).
        nest_block_comments: whether block comments nest.
    """

    name: str
    line_comment_prefixes: tuple[str, ...] = ()
    block_comment_pairs: tuple[tuple[str, str], ...] = ()
    string_delimiters: tuple[tuple[str, str, str | None], ...] = ()
    balanced_pairs: tuple[tuple[str, str], ...] = DEFAULT_BALANCED_PAIRS
    identifier_extra: str = "_."
    value_prefix_chars: str = ""
    nest_block_comments: bool = False

    def __post_init__(self) -> None:
        if not self.name:
            raise LanguageError("language name must be nonempty")
        for open_, close in self.balanced_pairs:
            if len(open_) != 1 or len(close) != 1:
                raise LanguageError(f"{self.name}: balanced delimiters must be single characters")
            if open_ == close:
                raise LanguageError(f"{self.name}: balanced pair {open_!r} has identical open and close")
        _check_prefix_free(self.name, "line comment", self.line_comment_prefixes)
        _check_prefix_free(self.name, "block comment", tuple(o for o, _ in self.block_comment_pairs))
        _check_prefix_free(self.name, "string", tuple(o for o, _, _ in self.string_delimiters))
        for open_, close, escape in self.string_delimiters:
            if not open_ or not close:
                raise LanguageError(f"{self.name}: string delimiters must be nonempty")
            if escape is not None and len(escape) != 1:
                raise LanguageError(f"{self.name}: string escape must be a single character")

    def is_identifier_char(self, ch: str) -> bool:
        """True when ch may appear inside an identifier."""
        return ch.isalnum() or ch in self.identifier_extra

    @property
    def open_chars(self) -> str:
        return "".join(o for o, _ in self.balanced_pairs)

    @property
    def close_chars(self) -> str:
        return "".join(c for _, c in self.balanced_pairs)


def _check_prefix_free(lang: str, what: str, openers: tuple[str, ...]) -> None:
    # A prefix collision would make the scanner order-dependent.
    for a in openers:
        if not a:
            raise LanguageError(f"{lang}: empty {what} delimiter")
        for b in openers:
            if a is not b and b.startswith(a):
                raise LanguageError(f"{lang}: {what} delimiter {a!r} is a prefix of {b!r}")


@dataclass
class SourceMap:
    """Source text plus its region partition and line table."""

    source: str
    language: LanguageDefinition
    intervals: list[tuple[int, int, Region]]
    warnings: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        self._starts = [iv[0] for iv in self.intervals]
        self._line_starts = _line_start_table(self.source)

    def interval_index(self, offset: int) -> int:
        """Index into intervals of the interval containing offset."""
        return max(bisect.bisect_right(self._starts, offset) - 1, 0)

    def interval_at(self, offset: int) -> tuple[int, int, Region]:
        """The (start, end, region) interval containing offset."""
        if not 0 <= offset < len(self.source):
            raise IndexError(f"offset {offset} out of range")
        return self.intervals[self.interval_index(offset)]

    def region_at(self, offset: int) -> Region:
        """Region kind of the byte at offset."""
        return self.interval_at(offset)[2]

    def line_col(self, offset: int) -> tuple[int, int]:
        """1-based line and column; offset == len(source) is the end position."""
        if not 0 <= offset <= len(self.source):
            raise IndexError(f"offset {offset} out of range")
        line = bisect.bisect_right(self._line_starts, offset)
        col = offset - self._line_starts[line - 1] + 1
        return line, col

    def line_of(self, offset: int) -> int:
        return self.line_col(offset)[0]

    def line_count(self) -> int:
        """Number of physical newlines in the source."""
        return self.source.count("\n")


def _line_start_table(source: str) -> list[int]:
    starts = [0]
    pos = source.find("\n")
    while pos != -1:
        starts.append(pos + 1)
        pos = source.find("\n", pos + 1)
    return starts


# ---------------------------------------------------------------------------
# Classification


@lru_cache(maxsize=128)
def _opener_plan(lang: LanguageDefinition):
    """Master pattern over all comment/string openers plus a dispatch table."""
    table: dict[str, tuple[str, object]] = {}
    for prefix in lang.line_comment_prefixes:
        table[prefix] = ("line", None)
    for open_, close in lang.block_comment_pairs:
        table[open_] = ("block", close)
    for open_, close, escape in lang.string_delimiters:
        table[open_] = ("string", (close, escape))
    if not table:
        return None, table
    # Longest first so '//' wins over a hypothetical '/'.
    alts = sorted(table, key=len, reverse=True)
    pattern = re.compile("|".join(re.escape(a) for a in alts))
    return pattern, table


def classify(source: str, lang: LanguageDefinition) -> SourceMap:
    """Partition source into code/comment/string regions.

    Lenient: an unterminated string or block comment extends to end of input
    and adds a warning instead of failing.
    """
    intervals: list[tuple[int, int, Region]] = []
    warnings: list[str] = []
    pattern, table = _opener_plan(lang)
    n = len(source)
    pos = 0
    while pos < n and pattern is not None:
        m = pattern.search(source, pos)
        if m is None:
            break
        start = m.start()
        tok = m.group(0)
        if start > pos:
            intervals.append((pos, start, Region.CODE))
        kind, aux = table[tok]
        if kind == "line":
            end = source.find("\n", start)
            end = n if end == -1 else end  # newline stays code
            intervals.append((start, end, Region.COMMENT))
            pos = end
        elif kind == "block":
            close = aux
            end = _block_comment_end(source, start + len(tok), tok, close, lang.nest_block_comments)
            if end is None:
                warnings.append(f"unterminated block comment starting at offset {start}")
                end = n
            intervals.append((start, end, Region.COMMENT))
            pos = end
        else:  # string
            close, escape = aux
            intervals.append((start, start + len(tok), Region.STRING_DELIMITER))
            body_start = start + len(tok)
            body_end, close_end = _string_end(source, body_start, close, escape)
            if close_end is None:
                warnings.append(f"unterminated string starting at offset {start}")
                if body_end > body_start:
                    intervals.append((body_start, body_end, Region.STRING_BODY))
                pos = n
            else:
                if body_end > body_start:
                    intervals.append((body_start, body_end, Region.STRING_BODY))
                intervals.append((body_end, close_end, Region.STRING_DELIMITER))
                pos = close_end
    if pos < n:
        intervals.append((pos, n, Region.CODE))
    return SourceMap(source, lang, intervals, warnings)


def _block_comment_end(source: str, pos: int, open_: str, close: str, nest: bool) -> int | None:
    if not nest:
        end = source.find(close, pos)
        return None if end == -1 else end + len(close)
    depth = 1
    n = len(source)
    while pos < n:
        nxt_open = source.find(open_, pos)
        nxt_close = source.find(close, pos)
        if nxt_close == -1:
            return None
        if nxt_open != -1 and nxt_open < nxt_close:
            depth += 1
            pos = nxt_open + len(open_)
        else:
            depth -= 1
            pos = nxt_close + len(close)
            if depth == 0:
                return pos
    return None


def _string_end(source: str, pos: int, close: str, escape: str | None) -> tuple[int, int | None]:
    """Return (body_end, close_end); close_end is None when unterminated."""
    n = len(source)
    if escape is None:
        end = source.find(close, pos)
        if end == -1:
            return n, None
        return end, end + len(close)
    while pos < n:
        if source[pos] == escape:
            pos += 2  # escaped character never terminates the string
            continue
        if source.startswith(close, pos):
            return pos, pos + len(close)
        pos += 1
    return n, None


# ---------------------------------------------------------------------------
# Balance scanning


@lru_cache(maxsize=128)
def _pair_maps(lang: LanguageDefinition):
    open_to_close = dict(lang.balanced_pairs)
    close_set = frozenset(c for _, c in lang.balanced_pairs)
    chars = "".join(open_to_close) + "".join(close_set)
    finder = re.compile("[" + re.escape(chars) + "]") if chars else None
    return open_to_close, close_set, finder


def scan_balanced(smap: SourceMap, start: int, limit: int | None = None) -> int:
    """Offset one past the close matching the open delimiter at start.

    Delimiters inside comment or string regions are ignored.  Nesting of all
    pair kinds is honored via a stack; a close character that does not match
    the innermost open is ignored (lenient).  Raises UnbalancedInput when the
    limit is reached first.
    """
    source = smap.source
    hi = len(source) if limit is None else limit
    open_to_close, close_set, finder = _pair_maps(smap.language)
    if start >= hi or smap.region_at(start) is not Region.CODE or source[start] not in open_to_close:
        raise LanguageError(f"offset {start} is not an open delimiter in a code region")
    stack = [open_to_close[source[start]]]
    idx = bisect.bisect_right(smap._starts, start) - 1
    pos = start + 1
    for s, e, kind in smap.intervals[idx:]:
        if kind is not Region.CODE:
            continue
        lo = max(s, pos)
        if lo >= hi:
            break
        for m in finder.finditer(source, lo, min(e, hi)):
            ch = m.group(0)
            if ch in open_to_close:
                stack.append(open_to_close[ch])
            elif ch == stack[-1]:
                stack.pop()
                if not stack:
                    return m.start() + 1
            # a mismatched close is treated as plain text
        if e >= hi:
            break
    raise UnbalancedInput(f"no matching close for {source[start]!r} at offset {start}")


# ---------------------------------------------------------------------------
# Registry

_REGISTRY: dict[str, LanguageDefinition] = {}


def register_language(lang: LanguageDefinition, replace: bool = False) -> None:
    """Add a definition to the registry; replace guards accidental overrides."""
    if lang.name in _REGISTRY and not replace:
        raise LanguageError(f"language {lang.name!r} is already registered")
    _REGISTRY[lang.name] = lang


def get_language(name: str) -> LanguageDefinition:
    try:
        return _REGISTRY[name]
    except KeyError:
        known = ", ".join(sorted(_REGISTRY))
        raise LanguageError(f"unknown language {name!r} (known: {known})") from None


def language_names() -> list[str]:
    return sorted(_REGISTRY)


GO = LanguageDefinition(
    name="go",
    line_comment_prefixes=("//",),
    block_comment_pairs=(("/*", "*/"),),
    string_delimiters=(('"', '"', "\\"), ("`", "`", None), ("'", "'", "\\")),
    identifier_extra="_.",
    value_prefix_chars="*",
)

C = LanguageDefinition(
    name="c",
    line_comment_prefixes=("//",),
    block_comment_pairs=(("/*", "*/"),),
    string_delimiters=(('"', '"', "\\"), ("'", "'", "\\")),
    identifier_extra="_.",
)

ZIG = LanguageDefinition(
    name="zig",
    line_comment_prefixes=("//",),
    string_delimiters=(('"', '"', "\\"), ("'", "'", "\\")),
    identifier_extra="_.",
    value_prefix_chars="!?*@",
)

ARITH = LanguageDefinition(name="arith", identifier_extra="_")

for _lang in (GO, C, ZIG, ARITH):
    register_language(_lang)


# ---------------------------------------------------------------------------
# Config file loading

_CONFIG_KEYS = {
    "line_comments",
    "block_comments",
    "strings",
    "balanced",
    "identifier_extra",
    "value_prefix",
    "nest_block_comments",
}


def load_language_file(path: str) -> list[LanguageDefinition]:
    """Load language definitions from an INI file, one section per language.

    Keys (all optional): line_comments (whitespace-separated prefixes),
    block_comments and strings (comma-separated groups of whitespace-separated
    tokens: "open close" and "open close [escape]"), balanced (two-character
    "()" tokens), identifier_extra, value_prefix, nest_block_comments.
    """
    parser = configparser.ConfigParser(interpolation=None)
    read = parser.read(path)
    if not read:
        raise LanguageError(f"cannot read language config {path!r}")
    out = []
    for section in parser.sections():
        raw = dict(parser[section])
        unknown = set(raw) - _CONFIG_KEYS
        if unknown:
            raise LanguageError(f"{path}: [{section}] has unknown keys {sorted(unknown)}")
        blocks = []
        for group in _groups(raw.get("block_comments", "")):
            if len(group) != 2:
                raise LanguageError(f"{path}: [{section}] block comment group needs 'open close'")
            blocks.append((group[0], group[1]))
        strings = []
        for group in _groups(raw.get("strings", "")):
            if len(group) == 2:
                strings.append((group[0], group[1], None))
            elif len(group) == 3:
                strings.append((group[0], group[1], group[2]))
            else:
                raise LanguageError(f"{path}: [{section}] string group needs 'open close [escape]'")
        pairs = []
        for tok in raw.get("balanced", "").split():
            if len(tok) != 2:
                raise LanguageError(f"{path}: [{section}] balanced token {tok!r} needs two characters")
            pairs.append((tok[0], tok[1]))
        lang = LanguageDefinition(
            name=section,
            line_comment_prefixes=tuple(raw.get("line_comments", "").split()),
            block_comment_pairs=tuple(blocks),
            string_delimiters=tuple(strings),
            balanced_pairs=tuple(pairs) if pairs else DEFAULT_BALANCED_PAIRS,
            identifier_extra=raw.get("identifier_extra", "_."),
            value_prefix_chars=raw.get("value_prefix", ""),
            nest_block_comments=raw.get("nest_block_comments", "false").lower() in ("1", "true", "yes"),
        )
        register_language(lang, replace=True)
        out.append(lang)
    return out


def _groups(value: str) -> list[list[str]]:
    return [group.split() for group in value.split(",") if group.strip()]
