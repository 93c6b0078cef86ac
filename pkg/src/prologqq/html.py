"""The ``html`` quoter.

Quoted HTML is parsed strictly (the first error aborts), variables named in
the ``html(...)`` syntax arguments replace matching attribute values and
element content, and the resulting DOM is serialized with escaping so bound
values can never introduce markup.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass
from typing import Any, Mapping, Sequence, Union

from .core import Quoter, filter_qq_dict
from .errors import QuasiQuotationError, RenderError
from .terms import (
    Atom,
    Compound,
    Float,
    Int,
    QuotationContent,
    SourcePos,
    Str,
    Term,
    Var,
    VarDict,
    make_list,
    proper_list,
)
from .writer import format_float, format_term

VOID_ELEMENTS = frozenset(
    "area base br col embed hr img input link meta source track wbr".split()
)
# elements whose end tag may be left out before a sibling of the same name or at end of input
OPTIONAL_END = frozenset(["p", "li"])


@dataclass(frozen=True)
class Text:
    text: str


@dataclass(frozen=True)
class Hole:
    var_id: int
    name: str = "_"


AttrValue = Union[str, Hole]


@dataclass(frozen=True)
class Element:
    tag: str
    attrs: tuple[tuple[str, AttrValue], ...] = ()
    children: tuple["HtmlNode", ...] = ()


HtmlNode = Union[Element, Text, Hole]


class SubstitutionWarning(UserWarning):
    """A variable passed to the quoter did not replace anything."""

    def __init__(self, message: str, pos: SourcePos, name: str):
        super().__init__(message)
        self.pos = pos
        self.name = name


@dataclass(frozen=True)
class UnmatchedVariable:
    name: str
    var_id: int

    def __str__(self) -> str:
        return f"variable {self.name} matches no attribute value or element content"


# -- parsing -----------------------------------------------------------------

_NAME = re.compile(r"[A-Za-z][A-Za-z0-9:_.-]*")
_ATTR_NAME = re.compile(r"[^\s\"'>/=<]+")
_UNQUOTED_VALUE = re.compile(r"[^\s\"'=<>`]+")
_ENTITY = re.compile(r"&(?:#([0-9]+)|#[xX]([0-9a-fA-F]+)|([A-Za-z]+));")
_NAMED_ENTITIES = {"amp": "&", "lt": "<", "gt": ">", "quot": '"', "apos": "'"}


class _Frame:
    __slots__ = ("tag", "attrs", "children", "offset")

    def __init__(self, tag, attrs, offset):
        self.tag = tag
        self.attrs = attrs
        self.children = []
        self.offset = offset


class _HtmlParser:
    def __init__(self, content: QuotationContent):
        self.content = content
        self.text = content.text

    def error(self, message: str, offset: int) -> QuasiQuotationError:
        return QuasiQuotationError(message, self.content.position(offset))

    def decode(self, raw: str, base: int) -> str:
        out = []
        i = 0
        while (amp := raw.find("&", i)) >= 0:
            out.append(raw[i:amp])
            m = _ENTITY.match(raw, amp)
            if m is None:
                raise self.error("invalid character reference", base + amp)
            dec, hexa, name = m.groups()
            if name is not None:
                if name not in _NAMED_ENTITIES:
                    raise self.error(f"unknown entity &{name};", base + amp)
                out.append(_NAMED_ENTITIES[name])
            else:
                code = int(dec, 10) if dec is not None else int(hexa, 16)
                if code == 0 or code > 0x10FFFF or 0xD800 <= code <= 0xDFFF:
                    raise self.error("character reference out of range", base + amp)
                out.append(chr(code))
            i = m.end()
        out.append(raw[i:])
        return "".join(out)

    def parse(self) -> list[HtmlNode]:
        text, n = self.text, len(self.text)
        root: list[HtmlNode] = []
        stack: list[_Frame] = []

        def add(node: HtmlNode) -> None:
            siblings = stack[-1].children if stack else root
            if isinstance(node, Text) and siblings and isinstance(siblings[-1], Text):
                siblings[-1] = Text(siblings[-1].text + node.text)
            else:
                siblings.append(node)

        def close() -> None:
            frame = stack.pop()
            add(Element(frame.tag, tuple(frame.attrs), tuple(frame.children)))

        i = 0
        while i < n:
            if text[i] != "<":
                j = text.find("<", i)
                j = n if j < 0 else j
                add(Text(self.decode(text[i:j], i)))
                i = j
            elif text.startswith("<!--", i):
                end = text.find("-->", i + 4)
                if end < 0:
                    raise self.error("unterminated comment", i)
                i = end + 3
            elif text.startswith("</", i):
                m = _NAME.match(text, i + 2)
                if m is None:
                    raise self.error("malformed end tag", i)
                j = m.end()
                while j < n and text[j].isspace():
                    j += 1
                if j >= n or text[j] != ">":
                    raise self.error("unterminated end tag", i)
                tag = m.group().lower()
                if not stack or stack[-1].tag != tag:
                    expected = f", expected </{stack[-1].tag}>" if stack else ""
                    raise self.error(f"mismatched end tag </{tag}>{expected}", i)
                close()
                i = j + 1
            elif _NAME.match(text, i + 1):
                i = self.start_tag(i, stack, add, close)
            else:
                raise self.error("unescaped '<' in text", i)

        while stack:
            if stack[-1].tag not in OPTIONAL_END:
                raise self.error(f"end of input inside <{stack[-1].tag}>", stack[-1].offset)
            close()
        return root

    def start_tag(self, i, stack, add, close) -> int:
        text, n = self.text, len(self.text)
        m = _NAME.match(text, i + 1)
        tag = m.group().lower()
        j = m.end()
        attrs: list[tuple[str, AttrValue]] = []
        seen = set()
        self_closing = False
        while True:
            while j < n and text[j].isspace():
                j += 1
            if j >= n:
                raise self.error(f"unterminated tag <{tag}>", i)
            if text[j] == ">":
                j += 1
                break
            if text.startswith("/>", j):
                self_closing = True
                j += 2
                break
            am = _ATTR_NAME.match(text, j)
            if am is None:
                raise self.error(f"malformed attribute in <{tag}>", j)
            name = am.group().lower()
            if name in seen:
                raise self.error(f"duplicate attribute {name}", j)
            seen.add(name)
            j = am.end()
            k = j
            while k < n and text[k].isspace():
                k += 1
            value = ""
            if k < n and text[k] == "=":
                k += 1
                while k < n and text[k].isspace():
                    k += 1
                if k < n and text[k] in "\"'":
                    close_quote = text.find(text[k], k + 1)
                    if close_quote < 0:
                        raise self.error("unterminated attribute value", k)
                    value = self.decode(text[k + 1 : close_quote], k + 1)
                    j = close_quote + 1
                else:
                    vm = _UNQUOTED_VALUE.match(text, k)
                    if vm is None:
                        raise self.error(f"missing value for attribute {name}", k)
                    value = self.decode(vm.group(), k)
                    j = vm.end()
            attrs.append((name, value))

        if tag in OPTIONAL_END and stack and stack[-1].tag == tag:
            close()
        if self_closing or tag in VOID_ELEMENTS:
            add(Element(tag, tuple(attrs), ()))
        else:
            stack.append(_Frame(tag, attrs, i))
        return j


def parse_html_strict(content: Union[QuotationContent, str]) -> list[HtmlNode]:
    """Parse quoted HTML, raising a positioned `QuasiQuotationError` on the first error."""
    if isinstance(content, str):
        content = QuotationContent(content, SourcePos("<string>", 1, 1, 0))
    return _HtmlParser(content).parse()


# -- substitution ------------------------------------------------------------


def substitute_dom(
    dom: Sequence[HtmlNode], qq_dict: VarDict
) -> tuple[list[HtmlNode], list[UnmatchedVariable]]:
    """Turn attribute values and sole element content that spell a variable name into holes.

    Returns the new DOM and the dictionary entries that matched nothing.
    """
    by_name = dict(qq_dict.entries)
    used: set[str] = set()

    def hole(name: str) -> Hole:
        used.add(name)
        return Hole(by_name[name], name)

    def content(nodes: Sequence[HtmlNode]) -> tuple:
        if len(nodes) == 1 and isinstance(nodes[0], Text) and nodes[0].text in by_name:
            return (hole(nodes[0].text),)
        return tuple(element(n) if isinstance(n, Element) else n for n in nodes)

    def element(e: Element) -> Element:
        attrs = tuple(
            (a, hole(v)) if isinstance(v, str) and v in by_name else (a, v) for a, v in e.attrs
        )
        return Element(e.tag, attrs, content(e.children))

    result = list(content(dom))
    unmatched = [UnmatchedVariable(n, i) for n, i in qq_dict.entries if n not in used]
    return result, unmatched


# -- DOM <-> term ------------------------------------------------------------


def dom_to_term(dom: Sequence[HtmlNode]) -> Term:
    """Encode a DOM as ``[element(Tag, [Name=Value, ...], Content), "text", Var, ...]``."""

    def node(n: HtmlNode) -> Term:
        if isinstance(n, Text):
            return Str(n.text)
        if isinstance(n, Hole):
            return Var(n.var_id, n.name)
        attrs = make_list(
            Compound("=", (Atom(a), Var(v.var_id, v.name) if isinstance(v, Hole) else Str(v)))
            for a, v in n.attrs
        )
        return Compound("element", (Atom(n.tag), attrs, dom_to_term(n.children)))

    return make_list(node(n) for n in dom)


def dom_from_term(term: Term) -> list[HtmlNode]:
    items = proper_list(term)
    if items is None:
        raise RenderError(f"not an HTML node list: {format_term(term)}")
    nodes: list[HtmlNode] = []
    for t in items:
        if isinstance(t, (Str, Atom)):
            nodes.append(Text(t.text if isinstance(t, Str) else t.name))
        elif isinstance(t, Var):
            nodes.append(Hole(t.id, t.name))
        elif isinstance(t, Compound) and t.functor == "element" and t.arity == 3:
            tag, attrs, children = t.args
            pairs = []
            for a in proper_list(attrs) or ():
                name, value = a.args
                if isinstance(value, Var):
                    pairs.append((name.name, Hole(value.id, value.name)))
                else:
                    pairs.append((name.name, _scalar_text(value)))
            nodes.append(Element(tag.name, tuple(pairs), tuple(dom_from_term(children))))
        else:
            raise RenderError(f"not an HTML node: {format_term(t)}")
    return nodes


# -- serialization -----------------------------------------------------------


def escape_text(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def escape_attr(s: str) -> str:
    return escape_text(s).replace('"', "&quot;")


def _scalar_text(value: Any) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, Atom):
        return value.name
    if isinstance(value, Str):
        return value.text
    if isinstance(value, Int):
        return str(value.value)
    if isinstance(value, Float):
        return format_float(value.value)
    if isinstance(value, bool):
        raise RenderError(f"cannot render {value!r} as HTML text")
    if isinstance(value, (int, float)):
        return str(value)
    shown = format_term(value) if isinstance(value, (Var, Compound)) else repr(value)
    raise RenderError(f"cannot render {shown} as HTML text")


def serialize_html(dom: Sequence[HtmlNode], bindings: Mapping[int, Any]) -> str:
    """Serialize a DOM, filling holes from ``bindings`` (variable id to value).

    A value is a scalar (atom, string, number) or a node sequence, either as
    `HtmlNode` objects or in the term encoding of `dom_to_term`.
    """
    out: list[str] = []

    def bound(h: Hole) -> Any:
        if h.var_id not in bindings:
            raise RenderError(f"unbound substitution variable {h.name}")
        return bindings[h.var_id]

    def nodes(ns: Sequence[HtmlNode]) -> None:
        for n in ns:
            if isinstance(n, Text):
                out.append(escape_text(n.text))
            elif isinstance(n, Hole):
                value = bound(n)
                if isinstance(value, (list, tuple)):
                    nodes(value)
                elif isinstance(value, Compound) and value.functor == "." or value == Atom("[]"):
                    nodes(dom_from_term(value))
                else:
                    out.append(escape_text(_scalar_text(value)))
            else:
                out.append("<" + n.tag)
                for name, value in n.attrs:
                    text = _scalar_text(bound(value)) if isinstance(value, Hole) else value
                    out.append(f' {name}="{escape_attr(text)}"')
                out.append(">")
                if n.tag not in VOID_ELEMENTS:
                    nodes(n.children)
                    out.append(f"</{n.tag}>")

    nodes(dom)
    return "".join(out)


def html(content: QuotationContent, syntax_args: list, var_dict: VarDict) -> Term:
    """Quoter: parse ``content`` and substitute the variables given as syntax arguments."""
    qq_dict = filter_qq_dict(var_dict, syntax_args)
    dom, unmatched = substitute_dom(parse_html_strict(content), qq_dict)
    for u in unmatched:
        warnings.warn(SubstitutionWarning(str(u), content.start, u.name), stacklevel=2)
    return dom_to_term(dom)


HTML_QUOTER = Quoter("html", html)
