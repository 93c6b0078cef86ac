import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import fixture_text
from prologqq.errors import ReaderSyntaxError
from prologqq.reader import Reader, decompose_syntax, read_term, read_terms, tokenize
from prologqq.terms import (
    NIL,
    Atom,
    Compound,
    Float,
    Int,
    LineIndex,
    QQPlaceholder,
    Str,
    Var,
    make_list,
    term_vars,
)


def kinds(text):
    return [(t.kind, t.lexeme) for t in tokenize(text)]


class TestTokenize:
    def test_minimal_clause(self):
        assert kinds("foo.") == [("atom", "foo"), ("end", ".")]

    def test_quasi_quotation_tokens(self):
        assert kinds("{|html(Date)||<b>x</b>|}.") == [
            ("qq_open", "{|"),
            ("atom", "html"),
            ("punct", "("),
            ("variable", "Date"),
            ("punct", ")"),
            ("qq_body", "||<b>x</b>|}"),
            ("end", "."),
        ]

    def test_unterminated_quasi_quotation_reports_opener(self):
        with pytest.raises(ReaderSyntaxError, match="unterminated quasi quotation") as exc:
            tokenize("{|a||b")
        assert exc.value.pos.char_offset == 0

    def test_unterminated_quasi_quotation_in_later_clause(self):
        with pytest.raises(ReaderSyntaxError) as exc:
            tokenize("a.\n  x({|q||never closed).\n")
        assert (exc.value.pos.line, exc.value.pos.column) == (2, 5)

    def test_raw_mode_ignores_escapes_quotes_and_comments(self):
        body = "||it's \\n % not a comment /* nor this \"|}"
        toks = tokenize("{|x" + body + ".")
        assert toks[2].kind == "qq_body"
        assert toks[2].lexeme == body

    def test_payload_ends_at_first_closer(self):
        toks = tokenize("a({|x||one|}, {|y||two|}).")
        bodies = [t.lexeme for t in toks if t.kind == "qq_body"]
        assert bodies == ["||one|}", "||two|}"]

    def test_comments_and_layout_skipped(self):
        assert kinds("% line\nfoo /* block\n */ . % tail") == [("atom", "foo"), ("end", ".")]

    def test_unterminated_block_comment(self):
        with pytest.raises(ReaderSyntaxError, match="block comment"):
            tokenize("a /* oops")

    @pytest.mark.parametrize(
        "text, message",
        [("'abc", "unterminated quoted atom"), ('x("abc', "unterminated text literal")],
    )
    def test_unterminated_quoted(self, text, message):
        with pytest.raises(ReaderSyntaxError, match=message) as exc:
            tokenize(text)
        assert exc.value.pos.char_offset == text.index(text.lstrip("x(")[0])

    def test_quoted_atom_is_inert(self):
        toks = tokenize("'{|not a quotation|}'.")
        assert [t.kind for t in toks] == ["atom", "end"]
        assert toks[0].value == "{|not a quotation|}"

    def test_symbol_atoms_and_fullstop(self):
        assert kinds("X =.. L.") == [
            ("variable", "X"),
            ("atom", "=.."),
            ("variable", "L"),
            ("end", "."),
        ]

    def test_fullstop_at_end_of_input(self):
        assert kinds("a.")[-1] == ("end", ".")

    def test_numbers(self):
        toks = tokenize("f(12, 1.5, 2.0e3, 0x1F, 3e2).")
        values = [t.value for t in toks if t.kind in ("integer", "float")]
        assert values == [12, 1.5, 2000.0, 31, 300.0]

    @pytest.mark.parametrize(
        "source, value",
        [
            (r"'a\nb'", "a\nb"),
            (r"'it''s'", "it's"),
            (r"'\x41\'", "A"),
            (r"'\101\'", "A"),
            ("'a\\\nb'", "ab"),
            (r"'\\'", "\\"),
        ],
    )
    def test_quoted_escapes(self, source, value):
        assert tokenize(source + ".")[0].value == value

    def test_undefined_escape(self):
        with pytest.raises(ReaderSyntaxError, match="undefined escape"):
            tokenize(r"'\q'.")

    def test_nul_rejected(self):
        with pytest.raises(ReaderSyntaxError, match="NUL"):
            tokenize("a\0.")

    def test_positions_are_consistent(self):
        text = fixture_text("clock_page.pl")
        toks = tokenize(text, "clock_page.pl")
        offsets = [t.pos.char_offset for t in toks]
        assert offsets == sorted(set(offsets))
        for t in toks:
            before = text[: t.pos.char_offset]
            assert t.pos.line == before.count("\n") + 1
            assert t.pos.column == len(before) - (before.rfind("\n") + 1) + 1
            assert text[t.pos.char_offset :].startswith(t.lexeme)


@settings(max_examples=200)
@given(st.text().filter(lambda s: "|}" not in s and "\0" not in s))
def test_raw_mode_fidelity(payload):
    toks = tokenize("{|x||" + payload + "|}.")
    bodies = [t for t in toks if t.kind == "qq_body"]
    assert len(bodies) == 1
    assert bodies[0].lexeme[2:-2] == payload


class TestReadTerm:
    def test_variable_identity(self):
        term, var_dict, quotations = read_term("f(X, Y, X).")
        assert term == Compound("f", (Var(1, "X"), Var(2, "Y"), Var(1, "X")))
        assert var_dict.entries == (("X", 1), ("Y", 2))
        assert quotations == []

    def test_clause_precedence(self):
        term, _, _ = read_term("a :- b, c.")
        assert term == Compound(":-", (Atom("a"), Compound(",", (Atom("b"), Atom("c")))))

    def test_operator_table(self):
        term, _, _ = read_term("X is 1 + 2 * 3 - -4.")
        x = Var(1, "X")
        rhs = Compound("-", (Compound("+", (Int(1), Compound("*", (Int(2), Int(3))))), Int(-4)))
        assert term == Compound("is", (x, rhs))

    def test_yfx_left_associative(self):
        term, _, _ = read_term("a - b - c.")
        assert term == Compound("-", (Compound("-", (Atom("a"), Atom("b"))), Atom("c")))

    def test_xfy_right_associative(self):
        term, _, _ = read_term("(a ; b ; c).")
        assert term == Compound(";", (Atom("a"), Compound(";", (Atom("b"), Atom("c")))))

    def test_xfx_priority_clash(self):
        with pytest.raises(ReaderSyntaxError, match="operator expected"):
            read_term("a = b = c.")

    def test_prefix_operators(self):
        term, _, _ = read_term(r"p :- \+ q, - (1), -(a), - a.")
        body = term.args[1]
        assert body.args[0] == Compound("\\+", (Atom("q"),))
        rest = body.args[1]
        assert rest.args[0] == Compound("-", (Int(1),))
        assert rest.args[1].args[0] == Compound("-", (Atom("a"),))
        assert rest.args[1].args[1] == Compound("-", (Atom("a"),))

    def test_negative_numbers(self):
        term, _, _ = read_term("f(-1, - 1, -2.5).")
        assert term.args == (Int(-1), Compound("-", (Int(1),)), Float(-2.5))

    def test_operator_atoms_as_arguments(self):
        term, _, _ = read_term("h(/, -, [], {}).")
        assert term.args == (Atom("/"), Atom("-"), NIL, Atom("{}"))

    def test_lists_and_curly(self):
        term, _, _ = read_term("f([a, b | T], [], {x, y}).")
        t = Var(1, "T")
        assert term.args[0] == make_list([Atom("a"), Atom("b")], t)
        assert term.args[1] == NIL
        assert term.args[2] == Compound("{}", (Compound(",", (Atom("x"), Atom("y"))),))

    def test_double_quoted_is_string(self):
        term, _, _ = read_term('f("a\\"b").')
        assert term.args == (Str('a"b'),)

    def test_anonymous_variables_are_fresh(self):
        term, var_dict, _ = read_term("f(_, _, A).")
        a, b, c = term.args
        assert a.id != b.id
        assert var_dict.entries == (("A", c.id),)

    def test_underscore_named_variable_in_dict(self):
        _, var_dict, _ = read_term("clock(_Request) :- true.")
        assert var_dict.names() == ["_Request"]

    def test_missing_fullstop(self):
        with pytest.raises(ReaderSyntaxError, match="missing fullstop"):
            read_term("foo")

    def test_unbalanced_parenthesis(self):
        with pytest.raises(ReaderSyntaxError) as exc:
            read_term("f(a.\n")
        assert exc.value.pos is not None

    def test_syntax_error_position(self):
        with pytest.raises(ReaderSyntaxError) as exc:
            read_term("a :-\n   b c.", "t.pl")
        assert (exc.value.pos.file, exc.value.pos.line, exc.value.pos.column) == ("t.pl", 2, 6)

    def test_read_terms_reads_all_clauses(self):
        results = list(read_terms("a. b(X) :- c(X). d."))
        assert [r.term for r in results][0] == Atom("a")
        assert len(results) == 3
        assert results[1].var_dict.entries == (("X", 1),)

    def test_reader_recovers_after_error(self):
        reader = Reader("a b. c.")
        with pytest.raises(ReaderSyntaxError):
            reader.read()
        reader.skip_clause()
        assert reader.read().term == Atom("c")
        assert reader.read() is None


class TestQuasiQuotationReading:
    def test_placeholder_and_pending(self):
        term, var_dict, quotations = read_term("f({|html(X)||<p>X</p>|}, X).")
        assert term == Compound("f", (QQPlaceholder(0), Var(1, "X")))
        (q,) = quotations
        assert q.syntax == Compound("html", (Var(1, "X"),))
        assert q.content.text == "<p>X</p>"
        assert q.placeholder_index == 0
        assert var_dict.entries == (("X", 1),)

    def test_indices_follow_textual_order(self):
        term, _, quotations = read_term("f({|a||1|}, g({|b||2|}), {|c||3|}).")
        assert [q.placeholder_index for q in quotations] == [0, 1, 2]
        assert [q.content.text for q in quotations] == ["1", "2", "3"]
        assert term.args[0] == QQPlaceholder(0)
        assert term.args[1] == Compound("g", (QQPlaceholder(1),))

    def test_content_start_position(self):
        text = "x :-\n  y({|html||abc|})."
        _, _, (q,) = read_term(text, "f.pl")
        offset = text.index("abc")
        assert q.content.start == LineIndex(text, "f.pl").pos(offset)
        assert text[offset : offset + len(q.content.text)] == q.content.text

    @pytest.mark.parametrize("syntax", ["X", "42", '"str"'])
    def test_invalid_syntax_term(self, syntax):
        with pytest.raises(ReaderSyntaxError, match="invalid quasi quotation syntax term") as exc:
            read_term(f"f({{|{syntax}||x|}}).")
        assert exc.value.pos.char_offset == 2

    def test_quotation_only_in_term_position(self):
        with pytest.raises(ReaderSyntaxError):
            read_term("f(a {|x||y|}).")

    def test_variables_in_syntax_enter_dictionary_in_order(self):
        _, var_dict, _ = read_term("p(A) :- {|javascript(B, A)||B|}, q(C).")
        assert var_dict.names() == ["A", "B", "C"]

    def test_clock_clause(self):
        text = fixture_text("clock_page.pl")
        results = list(read_terms(text, "clock_page.pl"))
        clock = results[-1]
        assert clock.term.functor == ":-"
        assert QQPlaceholder(0) in term_args_deep(clock.term)
        (q,) = clock.quotations
        date = clock.var_dict.lookup("Date")
        assert q.syntax == Compound("html", (date,))
        assert q.content.text.startswith("\n             <h1>My digital clock</h1>")


def term_args_deep(term):
    stack = [term]
    while stack:
        t = stack.pop()
        yield t
        if isinstance(t, Compound):
            stack.extend(t.args)


class TestDecomposeSyntax:
    def test_atom(self):
        assert decompose_syntax(Atom("sparql")) == ("sparql", [])

    def test_compound(self):
        date = Var(1, "Date")
        assert decompose_syntax(Compound("html", (date,))) == ("html", [date])

    def test_four_arguments(self):
        vs = [Var(i, n) for i, n in enumerate(["Complete", "OnClick", "ObjectID", "Remove"], 1)]
        assert decompose_syntax(Compound("javascript", tuple(vs))) == ("javascript", vs)


def test_term_vars_order():
    term, _, _ = read_term("f(A, g(B, A), C).")
    assert [v.name for v in term_vars(term)] == ["A", "B", "A", "C"]
