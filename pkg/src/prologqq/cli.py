"""``qq``: check, tokenize, expand and render files with quasi quotations.

Exit status is 0 on success, 1 for syntax or expansion errors and 2 for I/O
and usage errors. Diagnostics go to stderr as ``path:line:col: message``.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from typing import Optional, TextIO

from . import BUILTIN_QUOTERS, default_registry
from .core import QuoterRegistry, run_quoters, splice
from .errors import ConfigurationError, PositionedError, QQError, RenderError
from .html import SubstitutionWarning, dom_from_term, serialize_html
from .javascript import parts_from_term, render_script
from .reader import Reader, decompose_syntax, read_term, tokenize
from .terms import Term, term_vars
from .writer import format_clause

EXIT_OK, EXIT_ERROR, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qq", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=["check", "tokens", "expand", "render"])
    p.add_argument("file")
    p.add_argument(
        "--quoters",
        default=",".join(BUILTIN_QUOTERS),
        help="comma separated quoter names (default: %(default)s)",
    )
    p.add_argument(
        "--bind",
        action="append",
        default=[],
        metavar="NAME=TERM",
        help="bind a clause variable for render; may be repeated",
    )
    p.add_argument("-o", "--output", help="write output here instead of stdout")
    return p


class _Session:
    def __init__(self, path: str, text: str, registry: QuoterRegistry, err: TextIO):
        self.path = path
        self.text = text
        self.registry = registry
        self.err = err
        self.failed = False

    def diagnose(self, e: Exception) -> None:
        self.failed = True
        if isinstance(e, PositionedError) and e.pos is not None:
            print(str(e), file=self.err)
        else:
            print(f"{self.path}: {e}", file=self.err)

    def clauses(self):
        """Yield ``(read_result, quoter_results)`` for every clause that expands cleanly."""
        reader = Reader(self.text, self.path)
        while True:
            try:
                result = reader.read()
            except PositionedError as e:
                self.diagnose(e)
                reader.skip_clause()
                continue
            if result is None:
                return
            try:
                with warnings.catch_warnings(record=True) as caught:
                    warnings.simplefilter("always", SubstitutionWarning)
                    results = run_quoters(result.quotations, result.var_dict, self.registry)
            except PositionedError as e:
                self.diagnose(e)
                continue
            for w in caught:
                if isinstance(w.message, SubstitutionWarning):
                    print(f"{w.message.pos}: warning: {w.message}", file=self.err)
            yield result, results


def _parse_bindings(specs: list[str]) -> dict[str, Term]:
    bindings = {}
    for spec in specs:
        name, sep, text = spec.partition("=")
        name = name.strip()
        if not sep or not name or not (name[0].isupper() or name[0] == "_"):
            raise UsageError(f"--bind expects Name=Term, got {spec!r}")
        try:
            value = read_term(text + " .", f"<--bind {name}>")
        except PositionedError as e:
            raise RenderError(f"cannot parse binding {name}: {e.message}") from None
        if value.quotations or next(term_vars(value.term), None) is not None:
            raise RenderError(f"binding {name} must be a ground term without quotations")
        bindings[name] = value.term
    return bindings


def _render(session: _Session, bindings: dict[str, Term]) -> Optional[str]:
    outputs = []
    used = set()
    for result, values in session.clauses():
        by_id = {}
        for name, value in bindings.items():
            var = result.var_dict.lookup(name)
            if var is not None:
                by_id[var.id] = value
                used.add(name)
        for q, value in zip(result.quotations, values):
            syntax, _ = decompose_syntax(q.syntax)
            try:
                if syntax == "html":
                    outputs.append(serialize_html(dom_from_term(value), by_id))
                elif syntax == "javascript":
                    outputs.append(render_script(parts_from_term(value), by_id))
            except RenderError as e:
                session.diagnose(PositionedError(str(e), q.pos))
    for name in bindings:
        if name not in used:
            print(f"{session.path}: warning: binding {name} matches no clause variable", file=session.err)
    if session.failed:
        return None
    if not outputs:
        session.diagnose(RenderError("no html or javascript quasi quotation to render"))
        return None
    return "\n".join(outputs)


def _expand(session: _Session) -> str:
    lines = []
    for result, values in session.clauses():
        lines.append(format_clause(splice(result.term, values), result.var_dict))
    return "\n".join(lines)


def _tokens(session: _Session) -> str:
    try:
        toks = tokenize(session.text, session.path)
    except PositionedError as e:
        session.diagnose(e)
        return ""
    return "\n".join(f"{t.pos.line}:{t.pos.column}\t{t.kind}\t{json.dumps(t.lexeme, ensure_ascii=False)}" for t in toks)


def main(argv: Optional[list[str]] = None, stdout: TextIO = None, stderr: TextIO = None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = _parser().parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK

    try:
        if args.bind and args.command != "render":
            raise UsageError("--bind is only valid with render")
        names = [n.strip() for n in args.quoters.split(",") if n.strip()]
        registry = default_registry(names)
        bindings = _parse_bindings(args.bind)
    except (UsageError, ConfigurationError) as e:
        print(f"qq: {e}", file=stderr)
        return EXIT_USAGE
    except RenderError as e:
        print(f"qq: {e}", file=stderr)
        return EXIT_ERROR

    try:
        with open(args.file, encoding="utf-8") as f:
            text = f.read()
    except (OSError, UnicodeDecodeError) as e:
        print(f"qq: {args.file}: {getattr(e, 'strerror', None) or e}", file=stderr)
        return EXIT_USAGE

    session = _Session(args.file, text, registry, stderr)
    try:
        if args.command == "check":
            for _ in session.clauses():
                pass
            output = None
        elif args.command == "tokens":
            output = _tokens(session)
        elif args.command == "expand":
            output = _expand(session)
        else:
            output = _render(session, bindings)
    except QQError as e:
        session.diagnose(e)
        output = None

    if output:
        if not output.endswith("\n"):
            output += "\n"
        if args.output:
            try:
                with open(args.output, "w", encoding="utf-8") as f:
                    f.write(output)
            except OSError as e:
                print(f"qq: {args.output}: {e.strerror or e}", file=stderr)
                return EXIT_USAGE
        else:
            stdout.write(output)
    return EXIT_ERROR if session.failed else EXIT_OK
