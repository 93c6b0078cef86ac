"""Quoter registry, deferred quotation expansion, and content access."""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Callable, Iterable, Iterator, Mapping, Optional, Sequence

from .errors import ConfigurationError, QuasiQuotationError
from .reader import ReadResult, decompose_syntax
from .terms import (
    Compound,
    PendingQuotation,
    QQPlaceholder,
    QuotationContent,
    SourcePos,
    Term,
    Var,
    VarDict,
)

Transform = Callable[[QuotationContent, list, VarDict], Term]


@dataclass(frozen=True)
class Quoter:
    """A named transformation from quoted text to a term.

    ``transform(content, syntax_args, var_dict)`` must be deterministic. It
    reports problems by raising `QuasiQuotationError` with a file position.
    """

    name: str
    transform: Transform


@dataclass(frozen=True)
class QuoterRegistry:
    quoters: Mapping[str, Quoter] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "quoters", MappingProxyType(dict(self.quoters)))

    def register(self, quoter: Quoter) -> "QuoterRegistry":
        if quoter.name in self.quoters:
            raise ConfigurationError(f"duplicate quasi quotation syntax {quoter.name}")
        return QuoterRegistry({**self.quoters, quoter.name: quoter})

    def lookup(self, name: str) -> Optional[Quoter]:
        return self.quoters.get(name)

    def names(self) -> list[str]:
        return list(self.quoters)

    def __contains__(self, name: str) -> bool:
        return name in self.quoters


def register(registry: QuoterRegistry, quoter: Quoter) -> QuoterRegistry:
    return registry.register(quoter)


def registry_of(quoters: Iterable[Quoter]) -> QuoterRegistry:
    registry = QuoterRegistry()
    for q in quoters:
        registry = registry.register(q)
    return registry


def filter_qq_dict(var_dict: VarDict, syntax_args: Sequence[Term]) -> VarDict:
    """Keep the dictionary entries whose variable is one of ``syntax_args``."""
    ids = {a.id for a in syntax_args if isinstance(a, Var)}
    return var_dict.restrict(ids)


def run_quoters(
    pending: Sequence[PendingQuotation], var_dict: VarDict, registry: QuoterRegistry
) -> list[Term]:
    """Call the quoter of every pending quotation, in placeholder order."""
    results = []
    for q in sorted(pending, key=lambda q: q.placeholder_index):
        name, args = decompose_syntax(q.syntax)
        quoter = registry.lookup(name)
        if quoter is None:
            raise QuasiQuotationError(f"unknown quasi quotation syntax {name}", q.pos)
        results.append(quoter.transform(q.content, args, var_dict))
    return results


def splice(term: Term, results: Sequence[Term]) -> Term:
    """Replace every `QQPlaceholder` by the result at its index."""
    if isinstance(term, QQPlaceholder):
        if term.index >= len(results):
            raise QuasiQuotationError(f"no quasi quotation for placeholder {term.index}")
        return results[term.index]
    if isinstance(term, Compound):
        args = tuple(splice(a, results) for a in term.args)
        if all(a is b for a, b in zip(args, term.args)):
            return term
        return Compound(term.functor, args)
    return term


def expand(
    term: Term,
    pending: Sequence[PendingQuotation],
    var_dict: VarDict,
    registry: QuoterRegistry,
) -> Term:
    """Run the quoters and splice their results over the placeholders.

    Quoter results are not searched for further placeholders.
    """
    if not pending:
        return term
    return splice(term, run_quoters(pending, var_dict, registry))


def expand_read(result: ReadResult, registry: QuoterRegistry) -> Term:
    return expand(result.term, result.quotations, result.var_dict, registry)


# -- content access ----------------------------------------------------------


def content_characters(content: QuotationContent) -> str:
    return content.text


class ContentReader:
    """Character source over quoted material that tracks file positions.

    ``pos`` is always the absolute position of the next character to be read.
    """

    def __init__(self, content: QuotationContent):
        self._content = content
        self._text = content.text
        self.offset = 0
        self.pos = content.start

    def __iter__(self) -> Iterator[str]:
        while (ch := self.read()) != "":
            yield ch

    def peek(self) -> str:
        return self._text[self.offset : self.offset + 1]

    def read(self) -> str:
        if self.offset >= len(self._text):
            return ""
        ch = self._text[self.offset]
        self.offset += 1
        p = self.pos
        if ch == "\n":
            self.pos = SourcePos(p.file, p.line + 1, 1, p.char_offset + 1)
        else:
            self.pos = SourcePos(p.file, p.line, p.column + 1, p.char_offset + 1)
        return ch

    def position_at(self, offset: int) -> SourcePos:
        return self._content.position(offset)

    def error(self, message: str, offset: Optional[int] = None) -> QuasiQuotationError:
        pos = self.pos if offset is None else self.position_at(offset)
        return QuasiQuotationError(message, pos)


def content_reader(content: QuotationContent) -> ContentReader:
    return ContentReader(content)
