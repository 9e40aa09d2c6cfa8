import pytest

from emoc.errors import MiniAlgNameError, MiniAlgSyntaxError
from emoc.lang import SourceUnit, parse, render
from emoc.lang import ast as A

SIMPLE = """\
fn main() {
    let x = 1 + 2 * 3;
    return x;
}
"""


def test_parse_simple():
    tree = parse(SIMPLE)
    assert len(tree.functions) == 1
    fn = tree.functions[0]
    assert fn.name == "main"
    assert fn.params == ()
    let = fn.body[0]
    assert isinstance(let, A.Let)
    # precedence: 1 + (2 * 3)
    assert let.value == A.Binary("+", A.IntLit(1),
                                 A.Binary("*", A.IntLit(2), A.IntLit(3)))


def test_render_parse_round_trip():
    tree = parse(SIMPLE)
    text = render(tree).text
    assert parse(text) == tree
    # rendering is a fixed point
    assert render(parse(text)).text == text


def test_comments_ignored():
    tree = parse("# leading comment\nfn f() { return 1; }  # trailing\n")
    assert tree == parse("fn f() { return 1; }")


def test_crlf_normalized():
    unit = SourceUnit.from_text("fn f() {\r\n    return 1;\r\n}\r\n")
    assert "\r" not in unit.text
    assert parse(unit) == parse("fn f() { return 1; }")


def test_range_normalized_to_three_args():
    one = parse("fn f() { for i in range(5) { } return 0; }")
    three = parse("fn f() { for i in range(0, 5, 1) { } return 0; }")
    assert one == three
    st = one.functions[0].body[0]
    assert isinstance(st, A.ForRange)
    assert (st.start, st.stop, st.step) == (A.IntLit(0), A.IntLit(5), A.IntLit(1))


def test_else_and_nesting():
    tree = parse("""
        fn f(a) {
            if a > 0 { return 1; } else { if a < 0 { return -1; } }
            return 0;
        }
    """)
    outer = tree.functions[0].body[0]
    assert isinstance(outer, A.If)
    assert isinstance(outer.orelse[0], A.If)


def test_short_circuit_operators_parse():
    tree = parse("fn f(a, b) { return a > 0 && b > 0 || a == b; }")
    top = tree.functions[0].body[0].value
    assert isinstance(top, A.Binary) and top.op == "||"
    assert top.left.op == "&&"


@pytest.mark.parametrize("bad", [
    "fn f() { return 1 }",          # missing semicolon
    "fn f( { return 1; }",          # bad parameter list
    "fn f() { let = 3; }",          # missing name
    "fn f() { return $; }",         # bad character
    "fn () { return 1; }",          # missing function name
])
def test_syntax_errors(bad):
    with pytest.raises(MiniAlgSyntaxError) as exc:
        parse(bad)
    assert exc.value.line >= 1


def test_syntax_error_has_position():
    with pytest.raises(MiniAlgSyntaxError) as exc:
        parse("fn f() {\n    return $;\n}")
    assert exc.value.line == 2


@pytest.mark.parametrize("bad", [
    "fn f() { return x; }",                      # unknown identifier
    "fn f() { x = 1; return x; }",               # assign before let
    "fn f() { return g(1); }",                   # unknown function
    "fn f(a) { return f(a, a); }",               # wrong arity
    "fn f() { return 0; } fn f() { return 1; }", # duplicate function
    "fn len(a) { return 0; }",                   # shadows a builtin
    "fn f(a, a) { return a; }",                  # duplicate parameter
    "fn f() { return len(1, 2); }",              # builtin arity
])
def test_name_errors(bad):
    with pytest.raises(MiniAlgNameError):
        parse(bad)


def test_let_scopes_forward_only():
    # a name becomes visible at its let and stays visible after the block
    parse("fn f() { let x = 1; if x > 0 { let y = x; x = y; } return x; }")
    with pytest.raises(MiniAlgNameError):
        parse("fn f() { return y; let y = 1; }")
