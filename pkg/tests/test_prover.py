from __future__ import annotations

import copy
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nact.checker import TraceParseError, check_records, check_trace_file, parse_clause
from nact.formula import parse
from nact.prover import (
    Prover, _Skolem, clausify, clause_text, equality_axioms, normalize, subsumes, unify,
)
from nact.refuter import main_task


def russell_records():
    return main_task(parse("x notin x"), budget=1000).result.trace_records()


def test_russell_trace_valid():
    recs = russell_records()
    assert recs[-1]["clause"] == "$false"
    assert check_records(recs).valid
    assert str(check_records(recs)) == "valid"


def test_corrupted_premise_detected():
    recs = copy.deepcopy(russell_records())
    last = recs[-1]
    last["premises"] = [last["premises"][0], last["premises"][0]]
    res = check_records(recs)
    assert not res.valid and res.failed_step == last["index"]
    assert str(res).startswith(f"invalid({last['index']})")


def test_corrupted_clause_detected():
    recs = copy.deepcopy(russell_records())
    recs[2]["clause"] = "in(c0,c0)"
    assert check_records(recs).failed_step == 2


def test_forward_reference_rejected():
    recs = copy.deepcopy(russell_records())
    recs[2]["premises"] = [3]
    assert check_records(recs).failed_step == 2


def test_trace_must_end_in_false():
    recs = russell_records()[:-1]
    res = check_records(recs)
    assert not res.valid


def test_empty_trace():
    assert str(check_records([])).startswith("invalid(0)")


def test_trace_file_round_trip(tmp_path):
    path = tmp_path / "russell.jsonl"
    main_task(parse("x notin x")).result.write_trace(path)
    assert check_trace_file(path).valid
    bad = tmp_path / "bad.jsonl"
    bad.write_text("{not json\n")
    with pytest.raises(TraceParseError):
        check_trace_file(bad)


def test_parse_clause():
    lits = parse_clause("~in(V0,c0) | eq(f(V0),V1)")
    assert len(lits) == 2
    assert parse_clause("$false") == []


def test_unify_and_subsume():
    assert unify(("t", "X", "a"), ("t", ("b",), "Y"), {}) is not None
    assert unify(("t", "X"), ("t", ("f", "X")), {}) is None
    c = ((True, "in", ("X", "Y")),)
    d = ((True, "in", (("a",), ("b",))), (False, "in", ("Z", "Z")))
    assert subsumes(c, d)
    assert not subsumes(d, c)


def test_normalize_drops_tautologies_and_renames():
    lit = (True, "in", ("A", "B"))
    assert normalize([lit, (False, "in", ("A", "B"))]) is None
    n = normalize([(True, "in", ("Q", "R")), (True, "in", ("Q", "R"))])
    assert n == ((True, "in", ("V0", "V1")),)


def test_clausify_skolemizes():
    cs = clausify(parse("exists x1 . x1 in x"), {"x": "c"}, _Skolem("sk"))
    assert [clause_text(c) for c in cs] == ["in(sk0,c)"]


def test_equality_axioms_present():
    labels = {label for label, _ in equality_axioms()}
    assert {"eq_reflexivity", "eq_symmetry", "eq_transitivity"} <= labels
    assert len(labels) == 5


def test_budget_must_be_positive():
    with pytest.raises(ValueError):
        Prover().run([], [], 0)


@settings(max_examples=15, deadline=None)
@given(st.integers(10, 200), st.integers(0, 800))
def test_budget_monotone_on_russell(low, extra):
    a = main_task(parse("x notin x"), budget=low).result
    b = main_task(parse("x notin x"), budget=low + extra).result
    if a.refuted:
        assert b.refuted and len(b.trace) <= len(a.trace)


def test_trace_records_are_json():
    text = main_task(parse("x notin x")).result.trace_text()
    for line in text.splitlines():
        json.loads(line)
