"""Tokenizer and term reader for a Prolog subset with quasi quotations.

A quasi quotation ``{|Syntax||text|}`` is read in three steps: ``{|`` is its
own token, the syntax term is read from ordinary tokens, and ``||...|}`` is
scanned in raw mode as a single token. The reader leaves a `QQPlaceholder`
where the quotation was and returns the quotation itself as pending work, so
quoters only run once the whole clause (and its variable dictionary) is known.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Optional, Union

from .errors import ReaderSyntaxError
from .operators import INFIX, PREFIX
from .terms import (
    CURLY,
    NIL,
    Atom,
    Compound,
    Float,
    Int,
    LineIndex,
    PendingQuotation,
    QQPlaceholder,
    QuotationContent,
    SourcePos,
    Str,
    Term,
    Var,
    VarDict,
    is_callable,
    make_list,
)

SYMBOL_CHARS = frozenset("+-*/\\^<>=~:.?@#&$")
SOLO_ATOMS = frozenset("!;")
PUNCT = frozenset("()[]{},|")

_ESCAPES = {
    "n": "\n",
    "t": "\t",
    "r": "\r",
    "a": "\a",
    "b": "\b",
    "f": "\f",
    "v": "\v",
    "e": "\x1b",
    "s": " ",
    "\\": "\\",
    "'": "'",
    '"': '"',
    "`": "`",
}


@dataclass(frozen=True)
class Token:
    kind: str  # atom variable integer float text_literal punct qq_open qq_body end
    lexeme: str  # raw source text
    pos: SourcePos
    value: Union[str, int, float, None] = None

    @property
    def end_offset(self) -> int:
        return self.pos.char_offset + len(self.lexeme)

    @property
    def quoted(self) -> bool:
        return self.kind == "atom" and self.lexeme.startswith("'")

    def is_punct(self, char: str) -> bool:
        return self.kind == "punct" and self.lexeme == char


def is_atom_start(ch: str) -> bool:
    return ch.isalpha() and not ch.isupper()


def is_var_start(ch: str) -> bool:
    return ch == "_" or ch.isupper()


def is_alnum(ch: str) -> bool:
    return ch == "_" or ch.isalnum()


class Tokenizer:
    """Turns source text into `Token` values, lazily."""

    def __init__(self, text: str, file: str = "<string>"):
        if "\0" in text:
            raise ReaderSyntaxError("NUL character in input", LineIndex(text, file).pos(text.index("\0")))
        self.text = text
        self.file = file
        self.lines = LineIndex(text, file)
        self._qq_open: Optional[SourcePos] = None

    def _error(self, message: str, offset: int) -> ReaderSyntaxError:
        return ReaderSyntaxError(message, self.lines.pos(offset))

    def _skip_layout(self, i: int) -> int:
        text, n = self.text, len(self.text)
        while i < n:
            ch = text[i]
            if ch.isspace():
                i += 1
            elif ch == "%":
                nl = text.find("\n", i)
                i = n if nl < 0 else nl + 1
            elif text.startswith("/*", i):
                close = text.find("*/", i + 2)
                if close < 0:
                    raise self._error("unterminated block comment", i)
                i = close + 2
            else:
                break
        return i

    def __iter__(self) -> Iterator[Token]:
        text, n = self.text, len(self.text)
        i = 0
        while True:
            i = self._skip_layout(i)
            if i >= n:
                if self._qq_open is not None:
                    raise ReaderSyntaxError("unterminated quasi quotation", self._qq_open)
                return
            pos = self.lines.pos(i)
            ch = text[i]

            if self._qq_open is not None and text.startswith("||", i):
                close = text.find("|}", i + 2)
                if close < 0:
                    raise ReaderSyntaxError("unterminated quasi quotation", self._qq_open)
                self._qq_open = None
                yield Token("qq_body", text[i : close + 2], pos)
                i = close + 2
            elif text.startswith("{|", i):
                self._qq_open = pos
                yield Token("qq_open", "{|", pos)
                i += 2
            elif ch.isascii() and ch.isdigit():
                tok = self._number(i, pos)
                yield tok
                i = tok.end_offset
            elif is_var_start(ch) or is_atom_start(ch):
                j = i + 1
                while j < n and is_alnum(text[j]):
                    j += 1
                name = text[i:j]
                yield Token("variable" if is_var_start(ch) else "atom", name, pos, name)
                i = j
            elif ch == "'" or ch == '"':
                value, j = self._quoted(i)
                kind = "atom" if ch == "'" else "text_literal"
                yield Token(kind, text[i:j], pos, value)
                i = j
            elif ch in PUNCT:
                yield Token("punct", ch, pos)
                i += 1
            elif ch in SOLO_ATOMS:
                yield Token("atom", ch, pos, ch)
                i += 1
            elif ch in SYMBOL_CHARS:
                j = i
                while j < n and text[j] in SYMBOL_CHARS:
                    j += 1
                sym = text[i:j]
                if sym == "." and (j >= n or text[j].isspace() or text[j] == "%"):
                    yield Token("end", ".", pos)
                else:
                    yield Token("atom", sym, pos, sym)
                i = j
            else:
                raise self._error(f"illegal character {ch!r}", i)

    def _number(self, i: int, pos: SourcePos) -> Token:
        text, n = self.text, len(self.text)
        if text.startswith(("0x", "0X"), i) and i + 2 < n and text[i + 2] in "0123456789abcdefABCDEF":
            j = i + 2
            while j < n and text[j] in "0123456789abcdefABCDEF":
                j += 1
            return Token("integer", text[i:j], pos, int(text[i + 2 : j], 16))
        if text.startswith("0'", i):
            raise self._error("character code literals are not supported", i)
        j = i
        while j < n and text[j].isdigit() and text[j].isascii():
            j += 1
        is_float = False
        if j + 1 < n and text[j] == "." and text[j + 1].isascii() and text[j + 1].isdigit():
            is_float = True
            j += 1
            while j < n and text[j].isascii() and text[j].isdigit():
                j += 1
        if j < n and text[j] in "eE":
            k = j + 1
            if k < n and text[k] in "+-":
                k += 1
            if k < n and text[k].isascii() and text[k].isdigit():
                is_float = True
                j = k
                while j < n and text[j].isascii() and text[j].isdigit():
                    j += 1
        lexeme = text[i:j]
        if is_float:
            return Token("float", lexeme, pos, float(lexeme))
        return Token("integer", lexeme, pos, int(lexeme))

    def _quoted(self, i: int) -> tuple[str, int]:
        text, n = self.text, len(self.text)
        quote = text[i]
        what = "quoted atom" if quote == "'" else "text literal"
        out = []
        j = i + 1
        while True:
            if j >= n:
                raise self._error(f"unterminated {what}", i)
            c = text[j]
            if c == quote:
                if j + 1 < n and text[j + 1] == quote:
                    out.append(quote)
                    j += 2
                    continue
                return "".join(out), j + 1
            if c != "\\":
                out.append(c)
                j += 1
                continue
            j += 1
            if j >= n:
                raise self._error(f"unterminated {what}", i)
            e = text[j]
            if e == "\n":
                j += 1
            elif e in _ESCAPES:
                out.append(_ESCAPES[e])
                j += 1
            elif e == "x" or e in "01234567":
                digits = "0123456789abcdefABCDEF" if e == "x" else "01234567"
                k = j + 1 if e == "x" else j
                start = k
                while k < n and text[k] in digits:
                    k += 1
                if k == start:
                    raise self._error("malformed character escape", j - 1)
                code = int(text[start:k], 16 if e == "x" else 8)
                if code > 0x10FFFF:
                    raise self._error("character code out of range", j - 1)
                out.append(chr(code))
                if k < n and text[k] == "\\":
                    k += 1
                j = k
            else:
                raise self._error(f"undefined escape sequence \\{e}", j - 1)


def tokenize(text: str, file: str = "<string>") -> list[Token]:
    return list(Tokenizer(text, file))


class ReadResult(NamedTuple):
    term: Term
    var_dict: VarDict
    quotations: list[PendingQuotation]


class Reader:
    """Reads consecutive fullstop-terminated terms from one text."""

    def __init__(self, text: str, file: str = "<string>"):
        self.text = text
        self.file = file
        self._tokenizer = Tokenizer(text, file)
        self._tokens = iter(self._tokenizer)
        self._buf: deque[Token] = deque()
        self._eof = self._tokenizer.lines.pos(len(text))

    # token stream helpers

    def _peek(self, k: int = 0) -> Optional[Token]:
        while len(self._buf) <= k:
            tok = next(self._tokens, None)
            if tok is None:
                return None
            self._buf.append(tok)
        return self._buf[k]

    def _next(self) -> Optional[Token]:
        tok = self._peek()
        if tok is not None:
            self._buf.popleft()
        return tok

    def _error(self, message: str, tok: Optional[Token]) -> ReaderSyntaxError:
        return ReaderSyntaxError(message, tok.pos if tok is not None else self._eof)

    def _expect(self, char: str) -> None:
        tok = self._next()
        if tok is None or not tok.is_punct(char):
            found = "end of file" if tok is None else repr(tok.lexeme)
            raise self._error(f"expected {char!r}, found {found}", tok)

    def skip_clause(self) -> None:
        """Discard tokens up to and including the next fullstop."""
        while True:
            tok = self._next()
            if tok is None or tok.kind == "end":
                return

    # reading

    def read(self) -> Optional[ReadResult]:
        """Read the next term, or return None at end of input."""
        if self._peek() is None:
            return None
        self._vars: dict[str, Var] = {}
        self._next_id = 1
        self._quotations: dict[int, PendingQuotation] = {}
        self._qq_count = 0

        term = self._parse(1200)
        tok = self._next()
        if tok is None:
            raise self._error("unexpected end of file (missing fullstop)", tok)
        if tok.kind != "end":
            raise self._error("operator expected", tok)

        var_dict = VarDict(tuple((name, v.id) for name, v in self._vars.items()), self._next_id)
        quotations = [self._quotations[i] for i in range(self._qq_count)]
        return ReadResult(term, var_dict, quotations)

    def _variable(self, name: str) -> Var:
        if name == "_":
            var = Var(self._next_id, "_")
            self._next_id += 1
            return var
        var = self._vars.get(name)
        if var is None:
            var = self._vars[name] = Var(self._next_id, name)
            self._next_id += 1
        return var

    def _parse(self, max_prec: int) -> Term:
        left, left_prec = self._primary(max_prec)
        while True:
            tok = self._peek()
            name = self._infix_name(tok)
            if name is None:
                break
            prec, kind = INFIX[name]
            left_max = prec - 1 if kind[0] == "x" else prec
            right_max = prec - 1 if kind[2] == "x" else prec
            if prec > max_prec or left_prec > left_max:
                break
            self._next()
            right = self._parse(right_max)
            left, left_prec = Compound(name, (left, right)), prec
        return left

    @staticmethod
    def _infix_name(tok: Optional[Token]) -> Optional[str]:
        if tok is None:
            return None
        if tok.is_punct(","):
            return ","
        if tok.kind == "atom" and not tok.quoted and tok.value in INFIX:
            return tok.value
        return None

    def _starts_term(self, tok: Optional[Token]) -> bool:
        if tok is None or tok.kind in ("end", "qq_body"):
            return False
        if tok.kind == "punct":
            return tok.lexeme in "([{"
        if tok.kind == "atom" and not tok.quoted and tok.value in INFIX and tok.value not in PREFIX:
            after = self._peek(1)
            return after is not None and after.is_punct("(") and after.pos.char_offset == tok.end_offset
        return True

    def _arguments(self) -> list[Term]:
        args = [self._parse(999)]
        while (tok := self._peek()) is not None and tok.is_punct(","):
            self._next()
            args.append(self._parse(999))
        return args

    def _primary(self, max_prec: int) -> tuple[Term, int]:
        tok = self._next()
        if tok is None:
            raise self._error("unexpected end of file", tok)
        kind = tok.kind

        if kind == "integer":
            return Int(tok.value), 0
        if kind == "float":
            return Float(tok.value), 0
        if kind == "variable":
            return self._variable(tok.value), 0
        if kind == "text_literal":
            return Str(tok.value), 0
        if kind == "qq_open":
            return self._quasi_quotation(tok), 0
        if kind == "atom":
            return self._atom_or_compound(tok, max_prec)
        if kind == "punct":
            if tok.lexeme == "(":
                inner = self._parse(1200)
                self._expect(")")
                return inner, 0
            if tok.lexeme == "[":
                nxt = self._peek()
                if nxt is not None and nxt.is_punct("]"):
                    self._next()
                    return NIL, 0
                items = self._arguments()
                tail = NIL
                nxt = self._peek()
                if nxt is not None and nxt.is_punct("|"):
                    self._next()
                    tail = self._parse(999)
                self._expect("]")
                return make_list(items, tail), 0
            if tok.lexeme == "{":
                nxt = self._peek()
                if nxt is not None and nxt.is_punct("}"):
                    self._next()
                    return Atom(CURLY), 0
                inner = self._parse(1200)
                self._expect("}")
                return Compound(CURLY, (inner,)), 0
        if kind == "end":
            raise self._error("unexpected fullstop", tok)
        raise self._error(f"unexpected {tok.lexeme!r}", tok)

    def _atom_or_compound(self, tok: Token, max_prec: int) -> tuple[Term, int]:
        name = tok.value
        nxt = self._peek()
        adjacent = nxt is not None and nxt.pos.char_offset == tok.end_offset
        if adjacent and nxt.is_punct("("):
            self._next()
            args = self._arguments()
            self._expect(")")
            return Compound(name, tuple(args)), 0
        if tok.quoted:
            return Atom(name), 0
        if name == "-" and adjacent and nxt.kind in ("integer", "float"):
            self._next()
            return (Int(-nxt.value) if nxt.kind == "integer" else Float(-nxt.value)), 0
        if name in PREFIX and self._starts_term(nxt):
            prec, kind = PREFIX[name]
            prec = min(prec, max_prec)
            arg = self._parse(prec - 1 if kind == "fx" else prec)
            return Compound(name, (arg,)), prec
        return Atom(name), 0

    def _quasi_quotation(self, opener: Token) -> QQPlaceholder:
        index = self._qq_count
        self._qq_count += 1
        syntax = self._parse(1200)
        body = self._next()
        if body is None or body.kind != "qq_body":
            raise self._error("expected '||' after quasi quotation syntax", body)
        if not is_callable(syntax):
            raise ReaderSyntaxError("invalid quasi quotation syntax term", opener.pos)
        start = self._tokenizer.lines.pos(body.pos.char_offset + 2)
        content = QuotationContent(body.lexeme[2:-2], start)
        self._quotations[index] = PendingQuotation(syntax, content, index, opener.pos)
        return QQPlaceholder(index)


def read_term(text: str, file: str = "<string>") -> ReadResult:
    """Read the first term of ``text``: ``(term, var_dict, quotations)``."""
    result = Reader(text, file).read()
    if result is None:
        raise ReaderSyntaxError("no term found", LineIndex(text, file).pos(len(text)))
    return result


def read_terms(text: str, file: str = "<string>") -> Iterator[ReadResult]:
    reader = Reader(text, file)
    while (result := reader.read()) is not None:
        yield result


def decompose_syntax(syntax: Term) -> tuple[str, list[Term]]:
    """Split a quotation's syntax term into its name and argument list."""
    if isinstance(syntax, Atom):
        return syntax.name, []
    if isinstance(syntax, Compound):
        return syntax.functor, list(syntax.args)
    raise TypeError(f"quasi quotation syntax must be callable, got {syntax!r}")
