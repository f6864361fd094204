"""Query language: filter expressions over faces, captions, and metadata.

Grammar (keys and connectives case-insensitive, AND binds tighter):

    expr     := and_expr (OR and_expr)*
    and_expr := atom (AND atom)*
    atom     := key '=' '"' value '"' | '(' expr ')'

Values may contain any character except an unescaped quote (escape with
backslash). Parsing normalizes to disjunctive normal form: an OR of
AND-groups of filter leaves; parenthesized disjunctions distribute.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import product

from .errors import QuerySyntaxError

KEYS = ("name", "tag", "text", "textwindow", "channel", "show", "hour", "commercials")
TAGS = ("male", "female", "presenter")

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<lparen>\()
  | (?P<rparen>\))
  | (?P<eq>=)
  | (?P<word>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<quoted>"(?:[^"\\]|\\.)*")
  """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Filter:
    key: str
    value: str
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True)
class AndGroup:
    filters: tuple[Filter, ...]

    def find(self, key: str) -> list[Filter]:
        return [f for f in self.filters if f.key == key]


@dataclass(frozen=True)
class Query:
    groups: tuple[AndGroup, ...]

    def unparse(self) -> str:
        return " OR ".join(
            " AND ".join(f'{f.key}="{_escape(f.value)}"' for f in g.filters)
            for g in self.groups
        )


def _escape(value: str) -> str:
    return value.replace("\\", "\\\\").replace('"', '\\"')


def _unescape(raw: str) -> str:
    return re.sub(r"\\(.)", r"\1", raw)


class _Token:
    __slots__ = ("kind", "value", "offset")

    def __init__(self, kind: str, value: str, offset: int):
        self.kind = kind
        self.value = value
        self.offset = offset


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise QuerySyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            value = m.group()
            if kind == "word" and value.upper() in ("AND", "OR"):
                kind = value.upper().lower()  # 'and' / 'or'
            tokens.append(_Token(kind, value, pos))
        pos = m.end()
    tokens.append(_Token("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def parse(self) -> Query:
        groups = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            raise QuerySyntaxError(f"unexpected {tok.value!r}", tok.offset)
        query = Query(tuple(AndGroup(tuple(g)) for g in groups))
        _validate(query)
        return query

    def expr(self) -> list[list[Filter]]:
        groups = self.and_expr()
        while self.peek().kind == "or":
            conn = self.advance()
            groups.extend(self.and_expr(anchor=conn.offset))
        return groups

    def and_expr(self, anchor: int | None = None) -> list[list[Filter]]:
        groups = self.atom(anchor)
        while self.peek().kind == "and":
            conn = self.advance()
            rhs = self.atom(anchor=conn.offset)
            # distribute: (a OR b) AND (c OR d) -> ac, ad, bc, bd
            groups = [left + right for left, right in product(groups, rhs)]
        return groups

    def atom(self, anchor: int | None = None) -> list[list[Filter]]:
        tok = self.peek()
        if tok.kind == "lparen":
            self.advance()
            inner = self.expr()
            closing = self.advance()
            if closing.kind != "rparen":
                raise QuerySyntaxError("expected ')'", closing.offset)
            return inner
        if tok.kind == "word":
            self.advance()
            key = tok.value.lower()
            if key not in KEYS:
                raise QuerySyntaxError(f"unknown key {tok.value!r}", tok.offset)
            eq = self.advance()
            if eq.kind != "eq":
                raise QuerySyntaxError("expected '=' after key", eq.offset)
            val = self.advance()
            if val.kind != "quoted":
                raise QuerySyntaxError("expected quoted value", val.offset)
            value = _unescape(val.value[1:-1])
            return [[Filter(key, value, tok.offset)]]
        where = anchor if (anchor is not None and tok.kind == "end") else tok.offset
        raise QuerySyntaxError("expected a filter", where)


def _validate(query: Query) -> None:
    for group in query.groups:
        for f in group.filters:
            if f.key == "tag" and f.value.lower() not in TAGS:
                raise QuerySyntaxError(
                    f"tag must be one of {', '.join(TAGS)}", f.offset
                )
            if f.key == "commercials" and f.value.lower() not in ("include", "exclude"):
                raise QuerySyntaxError("commercials must be include or exclude", f.offset)
            if f.key == "textwindow":
                try:
                    seconds = float(f.value)
                except ValueError:
                    raise QuerySyntaxError("textwindow must be a number of seconds", f.offset) from None
                if seconds < 0:
                    raise QuerySyntaxError("textwindow must be non-negative", f.offset)
            if f.key == "hour":
                parse_hour_range(f.value, f.offset)
        if group.find("textwindow") and not group.find("text"):
            raise QuerySyntaxError(
                "textwindow requires a text filter in the same AND group",
                group.find("textwindow")[0].offset,
            )


def parse_hour_range(value: str, offset: int = 0) -> tuple[int, int]:
    """Parse "H" or "H1-H2" wall-clock hour ranges within [0, 24).

    H1 > H2 wraps around midnight (e.g. "22-2").
    """
    m = re.fullmatch(r"\s*(\d{1,2})\s*(?:-\s*(\d{1,2})\s*)?", value)
    if not m:
        raise QuerySyntaxError("hour must be H or H1-H2", offset)
    h1 = int(m.group(1))
    h2 = int(m.group(2)) if m.group(2) is not None else h1 + 1
    if h1 >= 24 or h2 > 24 or (m.group(2) is not None and h1 == h2):
        raise QuerySyntaxError("hours must lie within [0, 24) and differ", offset)
    return h1, h2


def parse(text: str) -> Query:
    """Parse a query string; raises QuerySyntaxError with a byte offset."""
    return _Parser(text).parse()
