"""Canonical term output.

Operators are written in functional notation, except ``:-``, ``,`` and ``=``
which stay infix so clauses and ``Name=Var`` pairs remain readable. The
output always reads back to the same term.
"""

from __future__ import annotations

import math
from typing import Optional

from .operators import is_operator
from .reader import SYMBOL_CHARS, is_alnum, is_atom_start
from .terms import CURLY, NIL, Atom, Compound, Float, Int, QQPlaceholder, Str, Term, Var, VarDict, list_items

_ESCAPES = {"\\": "\\\\", "\n": "\\n", "\t": "\\t", "\r": "\\r"}


def _quote(text: str, quote: str) -> str:
    out = [quote]
    for ch in text:
        if ch in _ESCAPES:
            out.append(_ESCAPES[ch])
        elif ch == quote:
            out.append("\\" + quote)
        elif ord(ch) < 0x20 or ord(ch) == 0x7F:
            out.append(f"\\x{ord(ch):x}\\")
        else:
            out.append(ch)
    out.append(quote)
    return "".join(out)


def _is_plain_name(name: str) -> bool:
    return bool(name) and is_atom_start(name[0]) and all(is_alnum(c) for c in name[1:])


def _is_symbol_name(name: str) -> bool:
    return (
        bool(name)
        and all(c in SYMBOL_CHARS for c in name)
        and name != "."
        and not name.startswith("/*")
    )


def format_atom(name: str, functor: bool = False) -> str:
    """Write an atom, quoting it when it would not read back as itself.

    Standalone operator atoms are quoted too, since quoted atoms never act
    as operators.
    """
    if _is_plain_name(name) or _is_symbol_name(name):
        if functor or not is_operator(name):
            return name
    elif not functor and name in ("[]", "{}", "!"):
        return name
    return _quote(name, "'")


def format_float(value: float) -> str:
    if not math.isfinite(value):
        raise ValueError(f"cannot write non-finite float {value!r}")
    text = repr(value)
    if "e" in text:
        mantissa, exponent = text.split("e")
        if "." not in mantissa:
            mantissa += ".0"
        return f"{mantissa}e{exponent}"
    return text


class _Writer:
    def __init__(self, var_dict: Optional[VarDict]):
        self.names = {var_id: name for name, var_id in (var_dict or ())}

    def write(self, t: Term, max_prec: int = 1200) -> str:
        text, prec = self._term(t)
        return f"({text})" if prec > max_prec else text

    def _term(self, t: Term) -> tuple[str, int]:
        if isinstance(t, Var):
            return self.names.get(t.id, f"_G{t.id}"), 0
        if isinstance(t, Int):
            return str(t.value), 0
        if isinstance(t, Float):
            return format_float(t.value), 0
        if isinstance(t, Str):
            return _quote(t.text, '"'), 0
        if isinstance(t, Atom):
            return format_atom(t.name), 0
        if isinstance(t, QQPlaceholder):
            return f"'$quasi_quotation'({t.index})", 0
        if isinstance(t, Compound):
            return self._compound(t)
        raise TypeError(f"not a term: {t!r}")

    def _compound(self, t: Compound) -> tuple[str, int]:
        f, args = t.functor, t.args
        if f == "." and len(args) == 2:
            items, tail = list_items(t)
            body = ",".join(self.write(x, 999) for x in items)
            if tail != NIL:
                body += "|" + self.write(tail, 999)
            return f"[{body}]", 0
        if f == CURLY and len(args) == 1:
            return "{" + self.write(args[0], 1200) + "}", 0
        if len(args) == 2:
            if f == ":-":
                return f"{self.write(args[0], 1199)} :- {self.write(args[1], 1199)}", 1200
            if f == ",":
                return f"{self.write(args[0], 999)},{self.write(args[1], 1000)}", 1000
            if f == "=":
                left, right = self.write(args[0], 699), self.write(args[1], 699)
                sep = " = " if left[-1] in SYMBOL_CHARS or right[0] in SYMBOL_CHARS else "="
                return f"{left}{sep}{right}", 700
        inner = ",".join(self.write(a, 999) for a in args)
        return f"{format_atom(f, functor=True)}({inner})", 0


def format_term(term: Term, var_dict: Optional[VarDict] = None) -> str:
    """Canonical text for ``term``; variables use their names from ``var_dict``."""
    return _Writer(var_dict).write(term)


def format_clause(term: Term, var_dict: Optional[VarDict] = None) -> str:
    text = format_term(term, var_dict)
    return text + (" ." if text[-1] in SYMBOL_CHARS else ".")
