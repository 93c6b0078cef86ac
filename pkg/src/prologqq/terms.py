"""Term values of the host language, source positions and variable dictionaries."""

from __future__ import annotations

import bisect
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence, Union


@dataclass(frozen=True)
class SourcePos:
    """A location in a source file.

    ``line`` and ``column`` are 1-based, ``char_offset`` is a 0-based count
    of characters (not bytes) from the start of the file.
    """

    file: str
    line: int
    column: int
    char_offset: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


class LineIndex:
    """Maps character offsets of one text to `SourcePos` values."""

    def __init__(self, text: str, file: str = "<string>"):
        self.file = file
        self._starts = [0]
        for i, ch in enumerate(text):
            if ch == "\n":
                self._starts.append(i + 1)

    def pos(self, offset: int) -> SourcePos:
        line = bisect.bisect_right(self._starts, offset) - 1
        return SourcePos(self.file, line + 1, offset - self._starts[line] + 1, offset)


def advance_pos(pos: SourcePos, text: str) -> SourcePos:
    """Return the position reached after reading ``text`` starting at ``pos``."""
    newlines = text.count("\n")
    if newlines:
        column = len(text) - text.rfind("\n")
        return SourcePos(pos.file, pos.line + newlines, column, pos.char_offset + len(text))
    return SourcePos(pos.file, pos.line, pos.column + len(text), pos.char_offset + len(text))


# -- terms -------------------------------------------------------------------


@dataclass(frozen=True)
class Atom:
    name: str


@dataclass(frozen=True)
class Var:
    """A logic variable. Identity is the ``id``; ``name`` is informational."""

    id: int
    name: str = field(default="_", compare=False)


@dataclass(frozen=True)
class Int:
    value: int


@dataclass(frozen=True)
class Float:
    value: float


@dataclass(frozen=True)
class Str:
    text: str


@dataclass(frozen=True)
class Compound:
    functor: str
    args: tuple

    def __post_init__(self):
        if not self.args:
            raise ValueError("compound terms need at least one argument")
        if not isinstance(self.args, tuple):
            object.__setattr__(self, "args", tuple(self.args))

    @property
    def arity(self) -> int:
        return len(self.args)


@dataclass(frozen=True)
class QQPlaceholder:
    """Marks where a quasi quotation's result will be spliced in."""

    index: int


Term = Union[Atom, Var, Int, Float, Str, Compound, QQPlaceholder]

NIL = Atom("[]")
CURLY = "{}"


def make_list(items: Iterable[Term], tail: Term = NIL) -> Term:
    result = tail
    for item in reversed(list(items)):
        result = Compound(".", (item, result))
    return result


def list_items(term: Term) -> tuple[list[Term], Term]:
    """Split a (possibly partial) list into its elements and its tail."""
    items = []
    while isinstance(term, Compound) and term.functor == "." and term.arity == 2:
        items.append(term.args[0])
        term = term.args[1]
    return items, term


def proper_list(term: Term) -> Optional[list[Term]]:
    items, tail = list_items(term)
    return items if tail == NIL else None


def is_callable(term: Term) -> bool:
    return isinstance(term, (Atom, Compound))


def term_vars(term: Term) -> Iterator[Var]:
    """Yield every variable occurrence in ``term``, depth first, left to right."""
    stack = [term]
    while stack:
        t = stack.pop()
        if isinstance(t, Var):
            yield t
        elif isinstance(t, Compound):
            stack.extend(reversed(t.args))


def comma_list(term: Term) -> list[Term]:
    """Flatten a right-nested ``','/2`` chain."""
    items = []
    while isinstance(term, Compound) and term.functor == "," and term.arity == 2:
        items.append(term.args[0])
        term = term.args[1]
    items.append(term)
    return items


# -- reader products ---------------------------------------------------------


@dataclass(frozen=True)
class VarDict:
    """Ordered ``Name = Var`` associations for one read term.

    Besides the named entries it owns the id supply for the term, so quoters
    can mint variables that never collide with the clause's own.
    """

    entries: tuple[tuple[str, int], ...] = ()
    next_id: int = 1
    _supply: Iterator[int] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self._supply is None:
            object.__setattr__(self, "_supply", itertools.count(self.next_id))

    def __iter__(self):
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def names(self) -> list[str]:
        return [name for name, _ in self.entries]

    def lookup(self, name: str) -> Optional[Var]:
        for n, var_id in self.entries:
            if n == name:
                return Var(var_id, n)
        return None

    def name_of(self, var_id: int) -> Optional[str]:
        for n, i in self.entries:
            if i == var_id:
                return n
        return None

    def vars(self) -> list[Var]:
        return [Var(i, n) for n, i in self.entries]

    def fresh_var(self, name: str = "_") -> Var:
        return Var(next(self._supply), name)

    def restrict(self, keep: Sequence[int]) -> "VarDict":
        """Entries whose variable id is in ``keep``, sharing the id supply."""
        keep = set(keep)
        return VarDict(
            tuple(e for e in self.entries if e[1] in keep), self.next_id, self._supply
        )


@dataclass(frozen=True)
class QuotationContent:
    """The raw material of one quasi quotation and where it starts in the file.

    ``start`` is the position of the first payload character, directly after
    the ``||`` separator.
    """

    text: str
    start: SourcePos

    def position(self, offset: int) -> SourcePos:
        """Absolute file position of the payload character at ``offset``."""
        return advance_pos(self.start, self.text[:offset])


@dataclass(frozen=True)
class PendingQuotation:
    syntax: Term
    content: QuotationContent
    placeholder_index: int
    pos: SourcePos  # the "{|" opener
