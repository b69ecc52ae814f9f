from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings

from nact.formula import (
    TRUE, And, Comprehension, EmptySet, Exists, FormulaSyntaxError, Member, Not,
    UnboundVariableError, Verum, alpha_equal, bound_var_count, canonicalize,
    expand_sugar, free_vars, has_sugar, length, parse, substitute, to_text,
)
from nact.refuter import set_term
from strategies import formulas, rename_bound

OMEGA = "forall x1 . (0 in x1 & (forall x2 . x2 in x1 -> x2 cup {x2} in x1)) -> x in x1"


def test_parse_examples():
    assert parse("x notin x") == Not(Member("x", "x"))
    assert parse("T") == Verum()
    assert parse("exists x1 . x1 in x") == Exists("x1", Member("x1", "x"))


def test_print_examples():
    assert to_text(Not(Member("x", "x"))) == "x notin x"
    assert to_text(canonicalize(Exists("x2", Member("x2", "x")))) == "exists x1 . x1 in x"
    assert to_text(And(TRUE, TRUE)) == "T & T"


@pytest.mark.parametrize("text, expected", [
    ("not not (x in x)", "x in x"),
    ("(x in x) & (x in x)", "x in x"),
    ("exists x7 . x7 in x", "exists x1 . x1 in x"),
    ("T & x in x", "x in x"),
    ("F | x in x", "x in x"),
    ("x in x & F", "F"),
    ("not T", "F"),
])
def test_canonicalize_examples(text, expected):
    assert to_text(canonicalize(parse(text))) == expected


def test_and_or_operands_are_ordered():
    a = canonicalize(parse("x in x & (exists x1 . x1 in x)"))
    b = canonicalize(parse("(exists x1 . x1 in x) & x in x"))
    assert a == b


def test_length_examples():
    assert length(TRUE) == 1
    assert length(parse("x notin x")) == 2
    assert length(parse("exists x1 . x1 in x")) == 2
    assert length(parse("x in x & x notin x")) == 4


def test_expand_sugar_examples():
    got = expand_sugar(parse("0 in x1", allow_free=True))
    assert alpha_equal(got, parse("exists z . (forall w . w notin z) & z in x1", allow_free=True))
    plain = parse("exists x1 . x1 in x")
    assert expand_sugar(plain) == plain


def test_expand_omega():
    f = parse(OMEGA)
    g = expand_sugar(f)
    assert not has_sugar(g)
    assert free_vars(g) == free_vars(f) == {"x"}
    assert bound_var_count(g) == bound_var_count(f) + 4


def test_substitute_examples():
    got = substitute(parse("x in b1"), "b1", set_term(parse("x = x")))
    assert to_text(got) == "x in {x1 : x1 = x1}"
    got = substitute(parse("exists x1 . x1 in b1"), "b1", set_term(parse("F")))
    assert to_text(got) == "exists x1 . x1 in {x2 : F}"
    f = parse("exists x1 . x1 in x")
    assert substitute(f, "b1", set_term(parse("F"))) == canonicalize(f)


def test_class_and_set_terms_differ():
    body = parse("x = x")
    assert Comprehension("x", body, False) != Comprehension("x", body, True)
    assert parse("{x : x = x} in x") != parse("{| x : x = x |} in x")


def test_parse_errors():
    with pytest.raises(FormulaSyntaxError, match="position"):
        parse("x in")
    with pytest.raises(UnboundVariableError):
        parse("x in y")
    with pytest.raises(FormulaSyntaxError):
        parse("x in x )")


def test_sugar_terms_parse():
    f = parse("{x} cup 0 in x")
    assert isinstance(f.left.right, EmptySet)
    assert free_vars(expand_sugar(f)) == {"x"}


@settings(max_examples=300, deadline=None)
@given(formulas())
def test_round_trip_on_canonical(f):
    c = canonicalize(f)
    assert parse(to_text(c)) == c


@settings(max_examples=300, deadline=None)
@given(formulas())
def test_canonicalize_idempotent(f):
    c = canonicalize(f)
    assert canonicalize(c) == c


@settings(max_examples=300, deadline=None)
@given(formulas())
def test_alpha_invariance(f):
    g = rename_bound(f, (f"v{i}" for i in itertools.count(50)))
    assert canonicalize(g) == canonicalize(f)
    assert length(g) == length(f)
    assert length(canonicalize(g)) == length(canonicalize(f))


@settings(max_examples=200, deadline=None)
@given(formulas(depth=2))
def test_expand_sugar_preserves_free_vars(f):
    sugared = parse(f"(0 in x | {{x}} cup 0 in x) & ({to_text(f)})")
    assert free_vars(expand_sugar(sugared)) == free_vars(sugared)
    assert not has_sugar(expand_sugar(sugared))
