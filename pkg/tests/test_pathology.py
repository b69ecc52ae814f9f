from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nact.checker import check_records
from nact.enumerate import GenConfig, enumerate_up_to
from nact.formula import Not, canonicalize, parse, subformulas, to_text
from nact.pathology import (
    N_MAX, check_patho, circle, classify_hereditary, detect_prim_patho,
    is_consistent_candidate,
)

SMALL = enumerate_up_to(GenConfig(max_length=4))


@pytest.mark.parametrize("n", range(1, N_MAX + 1))
def test_circles_are_prim_patho_and_negations_anti(n):
    c = circle(n)
    prim = detect_prim_patho(c)
    assert prim is not None and prim.kind == "circle" and prim.n == n
    assert check_patho(c, 100).kind == "prim-patho"
    assert check_patho(canonicalize(Not(c)), 300).kind == "anti-patho"


def test_detect_examples():
    assert str(detect_prim_patho(parse("x notin x"))) == "circle(1)"
    assert str(detect_prim_patho(parse("not (exists x1 . x in x1 & x1 in x)"))) == "circle(2)"
    assert detect_prim_patho(parse("x = x")) is None
    assert str(detect_prim_patho(parse("M(x)"))) == "mirimanoff"
    # a chain that does not return to x is not a circle
    assert detect_prim_patho(parse("not (exists x1 . x in x1 & x1 in x1)")) is None


def test_detect_circle_in_other_variable():
    f = parse("exists x1 . x1 notin x1 & x1 in x")
    assert detect_prim_patho(f) is None
    assert detect_prim_patho(parse("x1 notin x1", allow_free=True)).var == "x1"


def test_check_patho_examples():
    assert check_patho(parse("x notin x"), 100).is_patho
    v = check_patho(parse("x in x"), 300)
    assert v.kind == "anti-patho" and v.target == "x in x"
    assert check_patho(parse("x = x"), 1).kind == "unknown"
    assert check_patho(parse("x = x"), 300).kind == "non-patho"


def test_anti_patho_evidence_replays():
    v = check_patho(parse("x in x"), 300)
    assert v.is_anti and len(v.evidence) == 2
    for trace in v.evidence:
        assert check_records([s.to_record() for s in trace]).valid


def test_patho_and_anti_exclusive():
    for f in SMALL:
        v = check_patho(f, 100)
        assert not (v.is_patho and v.is_anti)


def test_budget_must_be_positive():
    with pytest.raises(ValueError):
        check_patho(parse("x in x"), 0)


def test_hereditary_examples():
    assert classify_hereditary(parse("(x notin x) & T"), 200).kind == "hereditary-patho"
    assert classify_hereditary(parse("x = x"), 200).kind == "hnp"
    deep = parse("exists x1 . exists x2 . x1 in x2 & x2 in x1 & x1 = x")
    assert classify_hereditary(deep, 1).kind == "unknown"


def test_consistent_candidate_examples():
    assert is_consistent_candidate(parse("x notin x"), 200) is False
    assert is_consistent_candidate(parse("x in x"), 200) is False
    assert is_consistent_candidate(parse("exists x1 . x1 in x"), 300) is True


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(SMALL), st.integers(1, 60), st.integers(0, 400))
def test_budget_monotone(f, low, extra):
    a = check_patho(f, low)
    b = check_patho(f, low + extra)
    if a.kind != "unknown":
        assert b.kind == a.kind


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(SMALL))
def test_hnp_means_no_patho_subformula(f):
    h = classify_hereditary(f, 100)
    if h.kind == "hnp":
        assert not any(check_patho(g, 100).is_patho for g in subformulas(f))
    if h.kind == "hereditary-patho":
        assert check_patho(parse(h.offending), 100).is_patho


def test_prim_negation_duality_on_enumeration():
    for f in SMALL:
        if detect_prim_patho(f) is not None:
            assert check_patho(canonicalize(Not(f)), 300).kind == "anti-patho", to_text(f)
