import pytest

from simforge.simscript import (
    IllegalCharacter,
    IndentationMismatch,
    UnexpectedToken,
    UnterminatedBlock,
    lex,
    parse,
    parse_source,
    static_check,
    to_source,
)
from simforge.simscript.nodes import Assign, BinOp, Call, ForRange, If, Num, While


class TestLexer:
    def test_assignment_tokens(self):
        kinds = [t.type for t in lex("x = 1")]
        assert kinds == ["NAME", "=", "NUMBER", "NEWLINE", "EOF"]

    def test_while_header_tokens(self):
        kinds = [t.type for t in lex("while x < 10:")]
        assert kinds == ["while", "NAME", "<", "NUMBER", ":", "NEWLINE", "EOF"]

    def test_illegal_character_position(self):
        with pytest.raises(IllegalCharacter) as err:
            lex("x @ 1")
        assert (err.value.line, err.value.col) == (1, 3)

    def test_tab_is_illegal(self):
        with pytest.raises(IllegalCharacter):
            lex("x\t= 1")

    def test_comments_stripped(self):
        kinds = [t.type for t in lex("x = 1  # set x\n# whole line\n")]
        assert "NUMBER" in kinds and kinds.count("NEWLINE") == 1

    def test_hash_inside_string_kept(self):
        tokens = lex("record('a#b', 0, 1)")
        strings = [t.value for t in tokens if t.type == "STRING"]
        assert strings == ["a#b"]

    def test_indent_dedent(self):
        kinds = [t.type for t in lex("if x > 0:\n    y = 1\nz = 2")]
        assert "INDENT" in kinds and "DEDENT" in kinds

    def test_bad_dedent(self):
        with pytest.raises(IndentationMismatch):
            lex("if x > 0:\n        y = 1\n  z = 2")

    def test_scientific_notation(self):
        tokens = lex("x = 1e300")
        assert any(t.type == "NUMBER" and t.value == "1e300" for t in tokens)

    def test_spans_are_one_based(self):
        tok = lex("alpha = 2")[0]
        assert (tok.line, tok.col) == (1, 1)


class TestParser:
    def test_for_with_prior_assignment(self):
        program = parse_source("x = 0\nfor t in range(10): x = x + 1")
        assert len(program.body) == 2
        assert isinstance(program.body[0], Assign)
        assert isinstance(program.body[1], ForRange)

    def test_incomplete_comparison(self):
        with pytest.raises(UnexpectedToken):
            parse_source("if x >")

    def test_block_without_body(self):
        with pytest.raises(UnterminatedBlock):
            parse_source("while x < 10:\n")

    def test_elif_desugars(self):
        program = parse_source("x = 1\nif x > 2:\n    y = 1\nelif x > 1:\n    y = 2\nelse:\n    y = 3")
        outer = program.body[1]
        assert isinstance(outer, If)
        assert isinstance(outer.orelse[0], If)
        assert outer.orelse[0].orelse  # the else suite

    def test_precedence(self):
        program = parse_source("x = 1 + 2 * 3 - 4 / 2")
        expr = program.body[0].value
        assert isinstance(expr, BinOp) and expr.op == "-"

    def test_unary_minus(self):
        program = parse_source("x = -1")
        assert program.body[0].value.operand == Num(value=1.0)

    def test_list_and_index(self):
        program = parse_source("xs = []\nxs.append(3)\ny = xs[0]")
        assert len(program.body) == 3

    def test_call_statement(self):
        program = parse_source("record('s', 0, 1)")
        assert isinstance(program.body[0].expr, Call)

    def test_append_only_method(self):
        with pytest.raises(UnexpectedToken):
            parse_source("xs.pop()")

    @pytest.mark.parametrize("source", [
        "x = 1\n",
        "x = 0\nwhile x < 5:\n    x = x + 1\n",
        "xs = []\nfor i in range(1, 4):\n    xs.append(i * 2)\n",
        "x = 1\nif x == 1:\n    y = 'one'\nelse:\n    y = 'other'\nrecord('x', 0, x)\n",
        "x = -3\ny = (x + 1) * (x - 1)\nz = 1e300\n",
        "b = True\nif b:\n    pass\n",
    ])
    def test_printer_round_trip(self, source):
        program = parse_source(source)
        assert parse_source(to_source(program)) == program


class TestStaticCheck:
    def test_use_before_assign(self):
        report = static_check(parse_source("y = x + 1"))
        assert not report.ok
        assert report.violations[0].code == "use-before-assign"

    def test_while_true_pass_lints(self):
        report = static_check(parse_source("while True: pass"))
        assert report.ok  # a warning, not a violation
        assert report.warnings and report.warnings[0].code == "termination-lint"

    def test_loop_assigning_condition_variable_is_clean(self):
        report = static_check(parse_source("x = 0\nwhile x < 10:\n    x = x + 1"))
        assert report.ok and not report.warnings

    def test_if_branches_must_both_assign(self):
        source = "c = 1\nif c > 0:\n    y = 1\nz = y"
        report = static_check(parse_source(source))
        assert any(v.code == "use-before-assign" for v in report.violations)

    def test_both_branches_assigning_counts(self):
        source = "c = 1\nif c > 0:\n    y = 1\nelse:\n    y = 2\nz = y"
        assert static_check(parse_source(source)).ok

    def test_loop_var_not_definite_after_loop(self):
        report = static_check(parse_source("for i in range(3):\n    pass\nx = i"))
        assert not report.ok

    def test_unknown_builtin(self):
        report = static_check(parse_source("x = open('f')"))
        assert any(v.code == "unknown-builtin" for v in report.violations)

    def test_wrong_arity(self):
        report = static_check(parse_source("x = rand_exp(1, 2)"))
        assert any(v.code == "wrong-arity" for v in report.violations)

    def test_output_builtin_not_a_value(self):
        report = static_check(parse_source("x = record('s', 0, 1)"))
        assert any(v.code == "output-in-expression" for v in report.violations)

    def test_append_before_assignment(self):
        report = static_check(parse_source("xs.append(1)"))
        assert any(v.code == "use-before-assign" for v in report.violations)
