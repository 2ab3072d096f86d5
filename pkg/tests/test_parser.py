from __future__ import annotations

import pytest

from metamorph import ParseError, parse, print_method, structural_eq
from metamorph.nodes import (
    Assign,
    Block,
    Call,
    Cast,
    ExprStmt,
    Ident,
    If,
    IntLit,
    Return,
    Switch,
    Unary,
    VarDecl,
    While,
)


def body(source: str):
    return parse(source).body.stmts


def test_minimal_method():
    ast = parse("void f() { int x = 0; }")
    assert ast.name == "f"
    assert ast.return_type == "void"
    assert len(ast.body.stmts) == 1
    assert isinstance(ast.body.stmts[0], VarDecl)


def test_compare_to_parses_with_two_top_level_statements(compare_to_source):
    ast = parse(compare_to_source)
    assert len(ast.body.stmts) == 2
    assert isinstance(ast.body.stmts[0], VarDecl)
    assert isinstance(ast.body.stmts[1], If)


def test_unbalanced_brace_is_a_parse_error():
    with pytest.raises(ParseError):
        parse("void f() {")


def test_modifiers_and_throws_are_discarded():
    ast = parse("public static synchronized int f(final int a) throws IOException, Foo { return a; }")
    assert ast.name == "f"
    assert ast.params[0].name == "a"


def test_single_statement_bodies_are_normalized_to_blocks():
    stmts = body("void f(int a) { if (a > 0) return; while (a > 0) a--; for (;;) break; }")
    assert isinstance(stmts[0].then, Block)
    assert isinstance(stmts[1].body, Block)
    assert isinstance(stmts[2].body, Block)


def test_else_if_chain_keeps_if_in_else_slot():
    stmts = body("void f(int a) { if (a == 0) { a = 1; } else if (a == 1) { a = 2; } else { a = 3; } }")
    top = stmts[0]
    assert isinstance(top.els, If)
    assert isinstance(top.els.els, Block)


def test_double_negation_is_simplified_at_construction():
    stmts = body("void f(boolean b) { boolean c = !!b; boolean d = !!!b; }")
    assert stmts[0].init == Ident("b")
    assert stmts[1].init == Unary("!", Ident("b"))


def test_switch_merges_consecutive_labels():
    stmts = body(
        """
        void f(int x) {
            switch (x) {
                case 0:
                case 1:
                    x = 2;
                    break;
                default:
                    x = 3;
            }
        }
        """
    )
    switch = stmts[0]
    assert isinstance(switch, Switch)
    assert len(switch.cases) == 1
    assert [label.value for label in switch.cases[0].labels] == [0, 1]
    assert switch.default_body is not None


def test_switch_rejects_duplicate_labels():
    with pytest.raises(ParseError):
        body("void f(int x) { switch (x) { case 1: break; case 1: break; } }")


def test_switch_rejects_default_before_cases():
    with pytest.raises(ParseError):
        body("void f(int x) { switch (x) { default: break; case 1: break; } }")


def test_switch_rejects_mixed_label_group():
    with pytest.raises(ParseError):
        body("void f(int x) { switch (x) { case 1: default: break; } }")


def test_negative_case_labels_fold_into_the_literal():
    stmts = body("void f(int x) { switch (x) { case -1: break; } }")
    assert stmts[0].cases[0].labels[0] == IntLit(-1)


def test_declaration_vs_expression_disambiguation():
    stmts = body("void f(int[] xs, int i) { Foo bar = baz(); int[] ys = xs; xs[i] = 1; foo(); }")
    assert isinstance(stmts[0], VarDecl) and stmts[0].type_name == "Foo"
    assert isinstance(stmts[1], VarDecl) and stmts[1].type_name == "int[]"
    assert isinstance(stmts[2], ExprStmt) and isinstance(stmts[2].expr, Assign)
    assert isinstance(stmts[3], ExprStmt) and isinstance(stmts[3].expr, Call)


def test_cast_vs_parenthesized_expression():
    stmts = body("int f(int a, Foo b) { int x = (int) a; Foo y = (Foo) b; return (a) - 1; }")
    assert isinstance(stmts[0].init, Cast)
    assert isinstance(stmts[1].init, Cast)
    ret = stmts[2]
    assert isinstance(ret, Return)
    assert ret.value.op == "-"
    assert ret.value.left == Ident("a")


def test_constructs_outside_the_subset_are_parse_errors():
    bad = [
        "void f() { List<String> xs; }",
        "void f() { int[] xs = new int[3]; }",
        "void f() { int a = 1, b = 2; }",
        "void f(int a, int b) { a = b = 1; }",
        "void f() { try { g(); } catch (Exception e) { } finally { } }",
        "void f(boolean c) { assert c : \"msg\"; }",
        "void f() { x => 1; }",
    ]
    for source in bad:
        with pytest.raises(ParseError):
            parse(source)


def test_trailing_input_is_a_parse_error():
    with pytest.raises(ParseError):
        parse("void f() { } void g() { }")


def test_comments_are_discarded():
    with_comments = """
    // leading comment
    void f(int a) {
        /* block
           comment */
        a = a + 1; // trailing
    }
    """
    assert structural_eq(parse(with_comments), parse("void f(int a) { a = a + 1; }"))


def test_string_escapes_round_trip():
    ast = parse('void f() { String s = "a\\n\\t\\"\\\\b"; }')
    assert ast.body.stmts[0].init.value == 'a\n\t"\\b'
    assert structural_eq(parse(print_method(ast)), ast)


def test_parse_error_carries_position():
    try:
        parse("void f() {\n  int x = ;\n}")
    except ParseError as exc:
        assert exc.line == 2
        assert exc.col > 0
    else:
        pytest.fail("expected ParseError")


def test_parse_errors_never_leak_other_exceptions():
    sources = ["", "int", "@Foo void f() {}", 'void f() { String s = "unterminated; }']
    for source in sources:
        with pytest.raises(ParseError):
            parse(source)
