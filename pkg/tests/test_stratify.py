from __future__ import annotations

import pytest
from hypothesis import given, settings

from nact.enumerate import GenConfig, enumerate_up_to
from nact.formula import Not, canonicalize, expand_sugar, parse
from nact.stratify import StratificationError, is_nfum_closed_eligible, stratify
from oracles import brute_stratified, levels_valid
from strategies import formulas


def test_examples():
    r = stratify(parse("x1 in x", allow_free=True))
    assert r.stratified and r.levels == {"x1": 0, "x": 1}
    r = stratify(parse("x in x"))
    assert not r.stratified
    assert len(r.cycle) == 1 and sum(a.weight * s for a, s in r.cycle) != 0
    assert stratify(parse("x1 in x2 & x3 in x1", allow_free=True)).stratified


def test_cycle_witness_is_unsatisfiable():
    r = stratify(parse("exists x1 . exists x2 . x in x1 & x1 in x2 & x2 in x"))
    assert not r.stratified
    # walking the cycle accumulates a nonzero level offset
    assert sum(a.weight * s for a, s in r.cycle) != 0


def test_equality_keeps_levels():
    assert not stratify(parse("exists x1 . x1 = x & x1 in x")).stratified
    r = stratify(parse("exists x1 . x1 = x"))
    assert r.stratified and r.levels["x1"] == r.levels["x"]


def test_rejects_sugar_and_comprehension():
    with pytest.raises(StratificationError):
        stratify(parse("0 in x"))
    with pytest.raises(StratificationError):
        stratify(parse("x in {x : x = x}"))


def test_nfum_eligibility_examples():
    assert not is_nfum_closed_eligible(parse("x notin x"))
    assert is_nfum_closed_eligible(expand_sugar(parse("0 notin x")))
    assert not is_nfum_closed_eligible(parse("x in b1"))


def test_agrees_with_oracle_on_enumeration():
    fs = enumerate_up_to(GenConfig(max_length=8, max_bound_vars=2, equality=True))
    assert len(fs) > 1000
    for f in fs:
        assert stratify(f).stratified == brute_stratified(f), f


@settings(max_examples=300, deadline=None)
@given(formulas())
def test_agrees_with_oracle_on_random_formulas(f):
    c = canonicalize(f)
    assert stratify(c).stratified == brute_stratified(c)


@settings(max_examples=300, deadline=None)
@given(formulas())
def test_levels_are_valid_and_normalized(f):
    c = canonicalize(f)
    r = stratify(c)
    if r.stratified and r.levels:
        assert min(r.levels.values()) == 0
        assert levels_valid(c, r.levels)
        shifted = {k: v + 3 for k, v in r.levels.items()}
        assert levels_valid(c, shifted)


@settings(max_examples=200, deadline=None)
@given(formulas())
def test_negation_transparent(f):
    assert stratify(Not(f)).stratified == stratify(f).stratified
