"""The ``javascript`` quoter.

Only a tokenizer is needed for safe substitution: identifier tokens that
spell one of the quoter's variables become expression holes, everything else
is kept as literal text. At render time a hole is filled with the JavaScript
literal for the bound value, never with raw text.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, Union

from .core import Quoter, filter_qq_dict
from .errors import QuasiQuotationError, RenderError
from .terms import (
    CURLY,
    NIL,
    Atom,
    Compound,
    Float,
    Int,
    QuotationContent,
    Str,
    Term,
    Var,
    VarDict,
    comma_list,
    make_list,
    proper_list,
)
from .writer import format_term

KEYWORDS = frozenset(
    """break case catch continue debugger default delete do else finally for
    function if in instanceof new return switch this throw try typeof var void
    while with class const enum export extends import super null true false""".split()
)

PUNCTUATORS = sorted(
    """{ } ( ) [ ] . ; , < > <= >= == != === !== + - * % ++ -- << >> >>> & | ^
    ! ~ && || ? : = += -= *= %= <<= >>= >>>= &= |= ^= / /=""".split(),
    key=len,
    reverse=True,
)

_LINE_TERMINATORS = "\n\r\u2028\u2029"
_DIGITS = frozenset("0123456789")
_IDENT = re.compile(r"[A-Za-z_$][A-Za-z0-9_$]*")
_NUMBER = re.compile(r"0[xX][0-9a-fA-F]+|(?:[0-9]+(?:\.[0-9]*)?|\.[0-9]+)(?:[eE][+-]?[0-9]+)?")


class JsTokenError(ValueError):
    """Tokenizer failure at ``offset`` in the payload."""

    def __init__(self, message: str, offset: int):
        super().__init__(message)
        self.message = message
        self.offset = offset


@dataclass(frozen=True)
class JsToken:
    kind: str  # identifier keyword number string punctuator regex comment whitespace
    lexeme: str
    start: int
    end: int


def _regex_allowed(prev: Optional[JsToken]) -> bool:
    if prev is None or prev.kind == "keyword":
        return True
    return prev.kind == "punctuator" and prev.lexeme not in (")", "]", "}")


def tokenize_js(payload: str) -> list[JsToken]:
    tokens: list[JsToken] = []
    prev: Optional[JsToken] = None  # last significant token
    n = len(payload)
    i = 0
    while i < n:
        ch = payload[i]
        if ch.isspace() or ch in _LINE_TERMINATORS:
            j = i + 1
            while j < n and (payload[j].isspace() or payload[j] in _LINE_TERMINATORS):
                j += 1
            kind = "whitespace"
        elif payload.startswith("//", i):
            j = i + 2
            while j < n and payload[j] not in _LINE_TERMINATORS:
                j += 1
            kind = "comment"
        elif payload.startswith("/*", i):
            end = payload.find("*/", i + 2)
            if end < 0:
                raise JsTokenError("unterminated comment", i)
            j = end + 2
            kind = "comment"
        elif ch == "/" and _regex_allowed(prev):
            j = _scan_regex(payload, i)
            kind = "regex"
        elif ch in "\"'":
            j = _scan_string(payload, i)
            kind = "string"
        elif (m := _IDENT.match(payload, i)) is not None:
            j = m.end()
            kind = "keyword" if m.group() in KEYWORDS else "identifier"
        elif ch in _DIGITS or (ch == "." and i + 1 < n and payload[i + 1] in _DIGITS):
            m = _NUMBER.match(payload, i)
            j = m.end()
            if j < n and (_IDENT.match(payload, j) or payload[j] in _DIGITS):
                raise JsTokenError("identifier starts immediately after numeric literal", j)
            kind = "number"
        elif ch == "`":
            raise JsTokenError("template literals are not supported", i)
        else:
            for p in PUNCTUATORS:
                if payload.startswith(p, i):
                    j = i + len(p)
                    kind = "punctuator"
                    break
            else:
                raise JsTokenError(f"unexpected character {ch!r}", i)
        tok = JsToken(kind, payload[i:j], i, j)
        tokens.append(tok)
        if kind not in ("whitespace", "comment"):
            prev = tok
        i = j
    return tokens


def _scan_string(s: str, i: int) -> int:
    quote = s[i]
    j = i + 1
    while j < len(s):
        c = s[j]
        if c == quote:
            return j + 1
        if c == "\\":
            if s.startswith("\r\n", j + 1):
                j += 3
            else:
                j += 2
            continue
        if c in _LINE_TERMINATORS:
            break
        j += 1
    raise JsTokenError("unterminated string literal", i)


def _scan_regex(s: str, i: int) -> int:
    j = i + 1
    in_class = False
    while j < len(s):
        c = s[j]
        if c in _LINE_TERMINATORS:
            break
        if c == "\\":
            j += 2
            continue
        if c == "[":
            in_class = True
        elif c == "]":
            in_class = False
        elif c == "/" and not in_class:
            j += 1
            while j < len(s) and (s[j].isalnum() or s[j] in "_$"):
                j += 1
            return j
        j += 1
    raise JsTokenError("unterminated regular expression literal", i)


# -- partitioning ------------------------------------------------------------


@dataclass(frozen=True)
class Literal:
    text: str


@dataclass(frozen=True)
class ExprHole:
    var_id: int
    name: str = "_"


JsPart = Union[Literal, ExprHole]


def partition_js(tokens: Sequence[JsToken], qq_dict: VarDict) -> list[JsPart]:
    """Split tokens into literal text and holes for identifiers named in ``qq_dict``."""
    by_name = dict(qq_dict.entries)
    parts: list[JsPart] = []
    pending: list[str] = []

    def flush() -> None:
        if pending:
            parts.append(Literal("".join(pending)))
            pending.clear()

    for tok in tokens:
        if tok.kind == "identifier" and tok.lexeme in by_name:
            flush()
            parts.append(ExprHole(by_name[tok.lexeme], tok.lexeme))
        else:
            pending.append(tok.lexeme)
    flush()
    return parts


# -- value rendering ---------------------------------------------------------

_JS_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"}
_UNICODE_ESCAPED = frozenset("<>&\u2028\u2029")


def js_string(text: str) -> str:
    out = ['"']
    for ch in text:
        if ch in _JS_ESCAPES:
            out.append(_JS_ESCAPES[ch])
        elif ch in _UNICODE_ESCAPED or ord(ch) < 0x20 or ord(ch) == 0x7F:
            out.append(f"\\u{ord(ch):04X}")
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)


def _number(value: Union[int, float]) -> str:
    if isinstance(value, float):
        if not math.isfinite(value):
            raise RenderError(f"cannot render non-finite number {value!r} in JavaScript")
        return repr(value)
    return str(value)


def _key(t: Term) -> str:
    if isinstance(t, Atom):
        return t.name
    if isinstance(t, Str):
        return t.text
    raise RenderError(f"object key must be text, got {format_term(t)}")


def _pair(t: Term) -> tuple[Term, Term]:
    if isinstance(t, Compound) and t.arity == 2 and t.functor in ("=", "-", ":"):
        return t.args
    if isinstance(t, Compound) and t.arity == 1:
        return Atom(t.functor), t.args[0]
    raise RenderError(f"not a name-value pair: {format_term(t)}")


def _object(pairs: Sequence[tuple[Term, Term]]) -> str:
    seen = set()
    items = []
    for k, v in pairs:
        key = _key(k)
        if key in seen:
            raise RenderError(f"duplicate object key {key!r}")
        seen.add(key)
        items.append(f"{js_string(key)}:{render_js_value(v)}")
    return "{" + ",".join(items) + "}"


def render_js_value(value: Term) -> str:
    """Render a term as a JavaScript literal.

    numbers, atoms and strings (as JS strings), ``@true``/``@false``/``@null``,
    lists (arrays), ``object(Pairs)`` and ``{Name:Value, ...}`` (objects).
    """
    if isinstance(value, (Int, Float)):
        return _number(value.value)
    if value == NIL:
        return "[]"
    if isinstance(value, Atom):
        return js_string(value.name)
    if isinstance(value, Str):
        return js_string(value.text)
    if isinstance(value, Compound):
        if value.functor == "@" and value.arity == 1 and value.args[0] in (
            Atom("true"),
            Atom("false"),
            Atom("null"),
        ):
            return value.args[0].name
        if value.functor == "." and value.arity == 2:
            items = proper_list(value)
            if items is None:
                raise RenderError(f"cannot render partial list {format_term(value)}")
            return "[" + ",".join(render_js_value(x) for x in items) + "]"
        if value.functor == "object" and value.arity == 1:
            items = proper_list(value.args[0])
            if items is None:
                raise RenderError(f"object/1 needs a list of pairs: {format_term(value)}")
            return _object([_pair(p) for p in items])
        if value.functor == CURLY and value.arity == 1:
            return _object([_pair(p) for p in comma_list(value.args[0])])
    if value == Atom(CURLY):
        return "{}"
    shown = format_term(value) if isinstance(value, (Var, Compound, Atom)) else repr(value)
    raise RenderError(f"cannot render {shown} as a JavaScript value")


def render_script(parts: Sequence[JsPart], bindings: Mapping[int, Term]) -> str:
    out = []
    for p in parts:
        if isinstance(p, Literal):
            out.append(p.text)
        else:
            if p.var_id not in bindings:
                raise RenderError(f"unbound substitution variable {p.name}")
            out.append(render_js_value(bindings[p.var_id]))
    return "".join(out)


# -- term encoding and the quoter --------------------------------------------


def parts_to_term(parts: Sequence[JsPart]) -> Term:
    """``\\[Literal, js_expression(Var), ...]`` as produced by the quoter."""
    items = [
        Str(p.text) if isinstance(p, Literal) else Compound("js_expression", (Var(p.var_id, p.name),))
        for p in parts
    ]
    return Compound("\\", (make_list(items),))


def parts_from_term(term: Term) -> list[JsPart]:
    if isinstance(term, Compound) and term.functor == "\\" and term.arity == 1:
        term = term.args[0]
    items = proper_list(term)
    if items is None:
        raise RenderError(f"not a script part list: {format_term(term)}")
    parts: list[JsPart] = []
    for t in items:
        if isinstance(t, Str):
            parts.append(Literal(t.text))
        elif isinstance(t, Atom):
            parts.append(Literal(t.name))
        elif (
            isinstance(t, Compound)
            and t.functor == "js_expression"
            and t.arity == 1
            and isinstance(t.args[0], Var)
        ):
            parts.append(ExprHole(t.args[0].id, t.args[0].name))
        else:
            raise RenderError(f"not a script part: {format_term(t)}")
    return parts


def javascript(content: QuotationContent, syntax_args: list, var_dict: VarDict) -> Term:
    qq_dict = filter_qq_dict(var_dict, syntax_args)
    try:
        tokens = tokenize_js(content.text)
    except JsTokenError as e:
        raise QuasiQuotationError(e.message, content.position(e.offset)) from None
    return parts_to_term(partition_js(tokens, qq_dict))


JAVASCRIPT_QUOTER = Quoter("javascript", javascript)
