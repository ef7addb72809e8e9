import pytest

from generators import F
from jtableau.errors import ParseError
from jtableau.syntax import (
    BOTTOM,
    App,
    Atom,
    Bang,
    BarQuery,
    Const,
    Imp,
    Just,
    Neg,
    Sum,
    Var,
    formula_from_json,
    formula_to_json,
    parse_formula,
    parse_term,
    print_formula,
    rank,
    read_source,
    size,
    subterms,
)

A, B, p = Atom("A"), Atom("B"), Atom("p")
x, y, c = Var("x"), Var("y"), Const("c")


def test_parse_weakening_instance():
    assert F("x:A -> c*x:(B->A)") == Imp(Just(x, A), Just(App(c, x), Imp(B, A)))


def test_parse_nested_negation():
    assert F("~~p") == Neg(Neg(p))


def test_colon_binds_tighter_than_arrow():
    assert F("s:A -> B") == Imp(Just(Const("s"), A), B)


def test_arrow_is_right_associative():
    assert F("A -> B -> A") == Imp(A, Imp(B, A))


def test_term_operators_associate_left():
    assert parse_term("x*y*c") == App(App(x, y), c)
    assert parse_term("x+y+c") == Sum(Sum(x, y), c)
    assert parse_term("x+y*c") == Sum(x, App(y, c))


def test_naming_convention_and_declarations():
    assert parse_term("x") == Var("x")
    assert parse_term("c") == Const("c")
    assert parse_term("u", variables={"u"}) == Var("u")
    assert parse_term("x1", constants={"x1"}) == Const("x1")


def test_print_sum_in_front_of_colon_is_bracketed():
    assert print_formula(Just(Sum(Const("t"), Const("s")), A)) == "(t+s):A"


def test_print_falsum():
    assert print_formula(Imp(BOTTOM, BOTTOM)) == "False -> False"
    assert print_formula(Imp(BOTTOM, BOTTOM), unicode=True) == "⊥ → ⊥"


def test_print_checker_prefix():
    t = Const("t")
    assert print_formula(Just(Bang(t), Just(t, A))) == "!t:t:A"


def test_print_unicode_application():
    assert print_formula(F("x:A -> c*x:(B -> A)"), unicode=True) == "x:A → c·x:(B → A)"


@pytest.mark.parametrize("text", [
    "x:A -> c*x:(B -> A)",
    "~(x+y):A -> ~x:A",
    "!x:x:A",
    "@x:~x:p",
    "?(x*y):~x*y:p",
    "(x:p -> q) -> ~False",
    "c:(x:(p -> q) -> y:p -> x*y:q)",
])
def test_print_parse_round_trip(text):
    f = F(text)
    assert F(print_formula(f)) == f
    assert print_formula(f) == text


def test_rank():
    assert rank(x) == 0
    assert rank(c) == 0
    assert rank(Just(App(x, y), p)) == 2
    assert rank(Just(Bang(x), Just(x, p))) == 3


def test_size_counts_term_nodes():
    assert size(p) == 1
    assert size(Just(App(x, y), p)) == 5
    assert size(F("x:A -> c*x:(B -> A)")) == 11


def test_subterms():
    assert subterms(x) == {x}
    assert subterms(App(c, x)) == {App(c, x), c, x}
    t = Const("t")
    assert {BarQuery(t), t} <= subterms(BarQuery(t))


def test_json_round_trip():
    f = F("@x:~x:p -> (x+y):(p -> False)")
    assert formula_from_json(formula_to_json(f)) == f


@pytest.mark.parametrize("text, message", [
    ("x:A ->", "unexpected end of input"),
    ("(p -> q", "unbalanced parenthesis"),
    ("p & q", "unknown token"),
])
def test_parse_errors(text, message):
    with pytest.raises(ParseError, match=message):
        parse_formula(text)


def test_parse_error_has_position():
    with pytest.raises(ParseError) as info:
        parse_formula("p & q")
    assert info.value.column == 3


def test_read_source_skips_comments_and_collects_declarations():
    lines, variables, constants = read_source("# header\nvar u, v\nconst k\n\nu:p  # trailing\n")
    assert lines == [(5, "u:p")]
    assert variables == {"u", "v"}
    assert constants == {"k"}
