import random

import pytest
from hypothesis import given, strategies as st

from admtl.grammar import ParseError, infer_signature, parse_formula, parse_term, print_formula
from admtl.syntax import (
    ARITH_EXT, App, Box, Const, Eq, Forall, G, Implies, Not, Pred, Signature, Var, normalize,
)

from generators import SIG, rand_formula


def test_temporal_implication():
    phi = parse_formula("G p() -> G G p()")
    assert phi == Implies(G(Pred("p", ())), G(G(Pred("p", ()))))


def test_rigidity_conjunct_body():
    phi = parse_formula("forall x. (q(x) -> box q(x))")
    q = Pred("q", (Var("x"),))
    assert phi == Forall("x", Implies(q, Box(q)))


def test_term_in_formula_position():
    with pytest.raises(ParseError, match="term where formula expected"):
        parse_formula("forall x. x")


def test_error_carries_position():
    with pytest.raises(ParseError) as info:
        parse_formula("p(x) & & q(x)")
    assert info.value.pos == 7


@pytest.mark.parametrize("text", ["p(x, y)", "f(x) = y", "zz(x)"])
def test_signature_checks(text):
    sig = Signature(frozenset(), {"f": 2}, {"p": 1})
    with pytest.raises(ParseError):
        parse_formula(text, sig)


def test_inconsistent_arity_in_inference_mode():
    with pytest.raises(ParseError):
        parse_formula("p(x) & p(x, y)")


def test_function_equation_inferred():
    phi = parse_formula("f(x) = y")
    assert phi == Eq(App("f", (Var("x"),)), Var("y"))


def test_declared_constants():
    phi = parse_formula("p(c)", constants=["c"])
    assert phi == Pred("p", (Const("c"),))
    assert infer_signature("p(c) & f(c) = c", constants=["c"]) == Signature(
        frozenset({"c"}), {"f": 1}, {"p": 1})


def test_arithmetic_precedence():
    t = parse_term("x + y * succ(0)", ARITH_EXT)
    assert t == App("+", (Var("x"), App("*", (Var("y"), App("succ", (Const("0"),))))))


def test_implication_is_right_associative():
    a, b, c = (Pred(n, ()) for n in "abc")
    assert parse_formula("a() -> b() -> c()") == Implies(a, Implies(b, c))
    assert print_formula(Implies(Implies(a, b), c)) == "(a() -> b()) -> c()"


def test_quantifier_scope_is_maximal():
    phi = parse_formula("forall x. p(x) & q(x)")
    assert isinstance(phi, Forall)


def test_expand_flag():
    phi = parse_formula("box p()", expand=True)
    assert phi == normalize(Box(Pred("p", ())))


def test_negated_equation_prints_and_parses():
    phi = Not(Eq(Var("x"), Var("y")))
    assert print_formula(phi) == "~x = y"
    assert parse_formula("~x = y") == phi


def test_round_trip_corpus():
    """print then parse is the identity on 10^4 random formulas of height <= 6."""
    rng = random.Random(20240601)
    for _ in range(10_000):
        phi = rand_formula(rng, 6)
        text = print_formula(phi)
        back = parse_formula(text, SIG)
        assert back == phi, text
        assert print_formula(back) == text


@given(st.integers(0, 2**32 - 1))
def test_round_trip_without_signature(seed):
    phi = rand_formula(random.Random(seed), 5)
    text = print_formula(phi)
    assert parse_formula(text, constants=SIG.constants) == phi
