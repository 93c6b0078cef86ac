"""The ``sparql`` quoter.

Only the SELECT header is parsed. Projection variables are bound by name to
the clause's variables (the whole dictionary, not just syntax arguments), so
``?Name`` in the query and ``Name`` in the clause become the same variable.
The WHERE part is kept verbatim after a brace/string integrity check.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .core import Quoter
from .errors import QuasiQuotationError
from .terms import (
    Atom,
    Compound,
    QuotationContent,
    SourcePos,
    Str,
    Term,
    Var,
    VarDict,
    make_list,
)

_SELECT = re.compile(r"SELECT(?![A-Za-z0-9_])", re.IGNORECASE)
_WHERE = re.compile(r"WHERE(?![A-Za-z0-9_])", re.IGNORECASE)
_VARNAME = re.compile(r"\w+")
_IRIREF = re.compile(r"<[^<>\"{}|^`\\\x00-\x20]*>")


@dataclass(frozen=True)
class SparqlQuery:
    projections: tuple[tuple[str, Var], ...]
    body: str
    origin: SourcePos

    def to_term(self) -> Term:
        pairs = make_list(Compound("=", (Atom(name), var)) for name, var in self.projections)
        return Compound("sparql_query", (pairs, Str(self.body)))


class _Scanner:
    def __init__(self, content: QuotationContent):
        self.content = content
        self.text = content.text

    def error(self, message: str, offset: int) -> QuasiQuotationError:
        return QuasiQuotationError(message, self.content.position(offset))

    def skip_layout(self, i: int) -> int:
        text, n = self.text, len(self.text)
        while i < n:
            if text[i].isspace():
                i += 1
            elif text[i] == "#":
                nl = text.find("\n", i)
                i = n if nl < 0 else nl + 1
            else:
                break
        return i

    def string_end(self, i: int) -> int:
        text = self.text
        quote = text[i]
        if text.startswith(quote * 3, i):
            end = i + 3
            while True:
                close = text.find(quote * 3, end)
                if close < 0:
                    raise self.error("unterminated string literal", i)
                backslashes = len(text[end:close]) - len(text[end:close].rstrip("\\"))
                if backslashes % 2 == 0:
                    return close + 3
                end = close + 1
        j = i + 1
        while j < len(text):
            c = text[j]
            if c == "\\":
                j += 2
            elif c == quote:
                return j + 1
            elif c in "\r\n":
                break
            else:
                j += 1
        raise self.error("unterminated string literal", i)

    def check_body(self, start: int) -> None:
        text, n = self.text, len(self.text)
        i = self.skip_layout(start)
        if i >= n or text[i] != "{":
            raise self.error("expected '{' after WHERE", i)
        opened: list[int] = []
        while i < n:
            c = text[i]
            if c == "{":
                opened.append(i)
                i += 1
            elif c == "}":
                if not opened:
                    raise self.error("unbalanced '}'", i)
                opened.pop()
                i += 1
            elif c in "\"'":
                i = self.string_end(i)
            elif c == "#":
                i = self.skip_layout(i)
            elif c == "<" and (m := _IRIREF.match(text, i)):
                i = m.end()
            else:
                i += 1
        if opened:
            raise self.error("unbalanced '{': group is never closed", opened[-1])

    def parse(self, var_dict: VarDict) -> SparqlQuery:
        text, n = self.text, len(self.text)
        i = self.skip_layout(0)
        m = _SELECT.match(text, i)
        if m is None:
            raise self.error("expected SELECT", i)
        i = m.end()
        names: list[str] = []
        after_comma = False
        while True:
            i = self.skip_layout(i)
            if i < n and text[i] == "?":
                vm = _VARNAME.match(text, i + 1)
                if vm is None:
                    raise self.error("malformed projection variable", i)
                if vm.group() in names:
                    raise self.error(f"duplicate projection variable ?{vm.group()}", i)
                names.append(vm.group())
                i = vm.end()
                after_comma = False
            elif i < n and text[i] == "," and names and not after_comma:
                after_comma = True
                i += 1
            elif (wm := _WHERE.match(text, i)) is not None and names and not after_comma:
                body_start = wm.end()
                break
            elif i >= n:
                raise self.error("expected WHERE", i)
            else:
                raise self.error("expected projection variable or WHERE", i)
        self.check_body(body_start)

        projections = []
        for name in names:
            var = var_dict.lookup(name)
            projections.append((name, var if var is not None else var_dict.fresh_var()))
        return SparqlQuery(tuple(projections), text[body_start:], self.content.start)


def parse_select(content: QuotationContent, var_dict: VarDict) -> SparqlQuery:
    return _Scanner(content).parse(var_dict)


def parse_sparql_select(content: QuotationContent, var_dict: VarDict) -> Term:
    """Parse ``SELECT ?A, ?B WHERE {...}`` into ``sparql_query(['A'=A, 'B'=B], Body)``."""
    return parse_select(content, var_dict).to_term()


def sparql(content: QuotationContent, syntax_args: list, var_dict: VarDict) -> Term:
    return parse_sparql_select(content, var_dict)


SPARQL_QUOTER = Quoter("sparql", sparql)
