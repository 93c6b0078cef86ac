"""Quasi quotations for a Prolog-subset term reader.

Read terms with `read_term`, then hand the pending quotations to `expand`
together with a `QuoterRegistry` (see `default_registry`).
"""

from .core import (
    Quoter,
    QuoterRegistry,
    content_characters,
    content_reader,
    expand,
    expand_read,
    filter_qq_dict,
    register,
)
from .errors import (
    ConfigurationError,
    PositionedError,
    QQError,
    QuasiQuotationError,
    ReaderSyntaxError,
    RenderError,
)
from .html import HTML_QUOTER
from .javascript import JAVASCRIPT_QUOTER
from .reader import Reader, ReadResult, decompose_syntax, read_term, read_terms, tokenize
from .sparql import SPARQL_QUOTER
from .terms import (
    Atom,
    Compound,
    Float,
    Int,
    PendingQuotation,
    QQPlaceholder,
    QuotationContent,
    SourcePos,
    Str,
    Var,
    VarDict,
)
from .writer import format_clause, format_term

__version__ = "0.1.0"

__all__ = [
    "Atom", "BUILTIN_QUOTERS", "Compound", "ConfigurationError", "Float", "HTML_QUOTER",
    "Int", "JAVASCRIPT_QUOTER", "PendingQuotation", "PositionedError", "QQError",
    "QQPlaceholder", "QuasiQuotationError", "QuotationContent", "Quoter", "QuoterRegistry",
    "ReadResult", "Reader", "ReaderSyntaxError", "RenderError", "SPARQL_QUOTER", "SourcePos",
    "Str", "Var", "VarDict", "content_characters", "content_reader", "decompose_syntax",
    "default_registry", "expand", "expand_read", "filter_qq_dict", "format_clause",
    "format_term", "read_term", "read_terms", "register", "tokenize",
]

BUILTIN_QUOTERS = {q.name: q for q in (HTML_QUOTER, JAVASCRIPT_QUOTER, SPARQL_QUOTER)}


def default_registry(names=None) -> QuoterRegistry:
    """Registry with the built-in quoters, optionally limited to ``names``."""
    registry = QuoterRegistry()
    for name in BUILTIN_QUOTERS if names is None else names:
        if name not in BUILTIN_QUOTERS:
            raise ConfigurationError(f"unknown quoter {name}")
        registry = registry.register(BUILTIN_QUOTERS[name])
    return registry
