"""Exception types shared by the reader, the expansion machinery and the quoters."""

from __future__ import annotations

from typing import TYPE_CHECKING, Optional

if TYPE_CHECKING:
    from .terms import SourcePos


class QQError(Exception):
    """Base class for every error raised by this package."""


class PositionedError(QQError):
    """An error tied to a location in a source file.

    ``str()`` yields the editor-friendly ``file:line:col: message`` form.
    """

    def __init__(self, message: str, pos: Optional["SourcePos"] = None):
        super().__init__(message)
        self.message = message
        self.pos = pos

    def __str__(self) -> str:
        if self.pos is None:
            return self.message
        return f"{self.pos.file}:{self.pos.line}:{self.pos.column}: {self.message}"


class ReaderSyntaxError(PositionedError):
    """Malformed host-language text (tokens, operators, brackets)."""


class QuasiQuotationError(PositionedError):
    """Raised while expanding a quasi quotation, by qq_core or by a quoter."""


class ConfigurationError(QQError):
    """Invalid quoter registry setup, e.g. a duplicate quoter name."""


class RenderError(QQError, ValueError):
    """A bound DOM or script could not be rendered (unbound hole, bad value)."""
