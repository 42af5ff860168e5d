import pytest
from hypothesis import given, settings, strategies as st

from hlsdiff.corpus import harness_programs, neutral_programs, planted_programs
from hlsdiff.minic import (
    ConflictingDirective,
    InvalidDirectiveParam,
    MiniCSyntaxError,
    UndeclaredSymbol,
    UnknownDirective,
    UnresolvedDirectiveTarget,
    check_hw_compat,
    format_program,
    parse_program,
)
from hlsdiff.minic import ast as A
from hlsdiff.minic.compat import MESSAGES
from hlsdiff.minic.printer import format_expr
from hlsdiff.minic.types import TypeSpec

SUM = """
fn sum(a: int[8]): int {
    int s = 0;
    for (int i = 0; i < len(a); i++) {
        s += a[i];
    }
    return s;
}
"""

ALL_CORPUS = planted_programs() + neutral_programs() + harness_programs()


def test_parse_sum():
    p = parse_program(SUM)
    assert p.entry == "sum"
    fn = p.function("sum")
    assert [prm.name for prm in fn.params] == ["a"]
    assert p.directives == ()


def test_width_directive_binds_to_qualified_variable():
    p = parse_program("""
fn main(a: int[8]): int {
    @width(acc, 9, unsigned)
    uint acc = 0;
    return acc;
}""")
    (b,) = p.directives
    assert (b.directive, b.target, b.params) == ("width", "main::acc", (9, False))


def test_fixed_directive_params():
    p = parse_program("""
fn main(x: float): float {
    @fixed(y, 16, 4)
    float y = x;
    return y;
}""")
    (b,) = p.directives
    assert b.params == (16, 4, True)


@pytest.mark.parametrize("src, exc", [
    ("fn main(): int { return 1 }", MiniCSyntaxError),
    ("fn main(): int { return q; }", UndeclaredSymbol),
    ("fn main(): int { @bogus(x, 1)\n int x = 0; return x; }", UnknownDirective),
    ("fn main(): int { @width(x, 0, signed)\n int x = 0; return x; }", InvalidDirectiveParam),
    ("fn main(): int { @width(y, 8, signed)\n int x = 0; return x; }", UnresolvedDirectiveTarget),
    ("fn main(): int { @width(x, 8, signed)\n @width(x, 9, signed)\n int x = 0; return x; }",
     ConflictingDirective),
])
def test_front_end_errors(src, exc):
    with pytest.raises(exc):
        parse_program(src)


@pytest.mark.parametrize("path", ALL_CORPUS, ids=lambda p: p.name)
def test_corpus_round_trip(path):
    p = parse_program(path.read_text())
    text = format_program(p)
    assert parse_program(text) == p
    assert format_program(parse_program(text)) == text


_names = st.sampled_from(["x", "y", "z"])
_leaf = st.one_of(st.integers(0, 2**31 - 1).map(A.Num), _names.map(A.Name))
_expr = st.recursive(
    _leaf,
    lambda kids: st.one_of(
        st.tuples(st.sampled_from(["+", "-", "*", "/", "%", "<", "<=", ">", ">=", "==", "!=", "&&", "||"]), kids, kids).map(lambda t: A.Binary(*t)),
        st.tuples(st.sampled_from(["-", "!"]), kids).map(lambda t: A.Unary(*t)),
    ),
    max_leaves=12,
)


@settings(max_examples=200, deadline=None)
@given(_expr)
def test_expression_print_parse_round_trip(e):
    src = f"fn main(x: int, y: int, z: int): int {{\n    return {format_expr(e)};\n}}\n"
    p = parse_program(src)
    (ret,) = p.function("main").body.stmts
    assert ret.value == e


def test_compat_clean_program():
    assert check_hw_compat(parse_program(SUM)).ok


def test_compat_reports_each_code():
    p = parse_program("""
import vector;

fn rec(n: int): int {
    if (n <= 0) {
        return 0;
    }
    return rec(n - 1) + 1;
}

fn main(a: int[], n: int): int {
    int b[n];
    int c[] = alloc(n);
    resize(c, 4);
    print(n);
    int r = rand();
    free(c);
    exit(0);
    return rec(n) + b[0] + r;
}""")
    rep = check_hw_compat(p)
    codes = {e.code for e in rep.errors}
    assert codes == set(MESSAGES)
    lines = rep.to_log().splitlines()
    assert all(line.startswith("ERROR E_") for line in lines)
    assert list(rep.errors) == sorted(rep.errors)


def test_compat_stack_limit_silences_recursion():
    p = parse_program("""
fn rec(n: int): int {
    @stack_limit(rec, 8)
    if (n <= 0) {
        return 0;
    }
    return rec(n - 1) + 1;
}""")
    assert check_hw_compat(p).ok


def test_typespec_bounds():
    assert TypeSpec("uint", 9).bounds() == (0, 511)
    assert TypeSpec("int", 12).bounds() == (-2048, 2047)
    assert TypeSpec("fixed", 8, 4, True).bounds() == (-8.0, 7.9375)
    with pytest.raises(ValueError):
        TypeSpec("int", 0)
