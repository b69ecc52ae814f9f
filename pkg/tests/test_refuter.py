from __future__ import annotations

import itertools

import pytest

from nact.checker import check_records
from nact.enumerate import GenConfig, enumerate_up_to
from nact.formula import Equal, Not, parse, to_text
from nact.models import find_witness
from nact.prover import _Skolem, clause_text, clausify
from nact.refuter import (
    CT, CT_ES, AcceptedSet, SethoodError, assume_sethood, base_theory, fast_path_hint,
    main_task, main_task_parametric, refute,
)

V = AcceptedSet(parse("x = x"))
EMPTY = AcceptedSet(parse("F"))
SELF = AcceptedSet(parse("x in x"))


def _assumption(theory):
    (ax,) = [a for a in theory.axioms if a.role == "assumption"]
    return ax


@pytest.mark.parametrize("text, body", [
    ("x notin x", "y notin y"),
    ("F", "F"),
    ("x = x", "y = y"),
])
def test_assume_sethood_adds_one_constant(text, body):
    th = assume_sethood(parse(text), base_theory())
    assert len(th.constants) == 1
    (_, c), = th.constants
    ax = _assumption(th)
    assert to_text(ax.formula) == f"forall y . (y in {c} -> {body}) & ({body} -> y in {c})"
    assert any(a.role == "frame" for a in th.axioms)


def test_assume_sethood_rejects_parameters():
    with pytest.raises(SethoodError):
        assume_sethood(parse("x in b1"), base_theory())


def test_refute_examples():
    russell = assume_sethood(parse("x notin x"), base_theory())
    assert refute(russell, 1000).refuted
    assert not refute(base_theory(), 500).refuted
    universal = assume_sethood(parse("x = x"), base_theory())
    for budget in (50, 300, 1000):
        assert not refute(universal, budget).refuted
    assert find_witness(parse("x = x"), 1) is not None


def test_main_task_examples():
    v = main_task(parse("x notin x"), CT)
    assert v.verdict == "refuted" and v.result.steps <= 1000
    assert main_task(parse("x = x"), CT).verdict == "kept-provisional"
    assert main_task(parse("exists x1 . x1 in x"), CT).verdict == "kept-provisional"
    assert find_witness(parse("exists x1 . x1 in x"), 3) is not None


def test_trace_inputs_come_from_theory():
    v = main_task(parse("x notin x"))
    th = v.theory
    consts = {c: c for _, c in th.constants}
    texts = set()
    sk = _Skolem("sk")
    for ax in th.axioms:
        texts |= {clause_text(c) for c in clausify(ax.formula, consts, sk)}
    for rec in v.result.trace_records():
        if rec["rule"] == "input":
            assert rec["clause"] in texts


def test_parametric_examples():
    v = main_task_parametric(parse("x notin b1"), [V], 1000, 8)
    assert v.verdict == "provisional" and v.instances == ("x notin {x1 : x1 = x1}",)
    v = main_task_parametric(parse("x in b1"), [V, EMPTY], 1000, 8)
    assert v.verdict == "provisional" and len(v.instances) == 2
    v = main_task_parametric(parse("x notin b1"), [V, SELF], 1000, 8)
    assert v.verdict == "refuted" and to_text(v.instance) == "x notin {x1 : x1 in x1}"
    assert check_records(v.result.trace_records()).valid


def test_parametric_length_cap_and_must_include():
    v = main_task_parametric(parse("x notin b1"), [V, SELF], 1000, 2)
    assert v.instances == ()
    v = main_task_parametric(parse("x notin b1"), [V, SELF], 1000, 8, must_include=V)
    assert v.instances == ("x notin {x1 : x1 = x1}",)
    with pytest.raises(ValueError):
        main_task_parametric(parse("x in x"), [V], 100, 8)


def test_set_terms_inside_formula():
    assert main_task(parse("exists x1 . x1 in {x2 : x2 notin x2}")).refuted
    assert main_task(parse("x in {| x1 : x1 notin x1 |}")).refuted
    with pytest.raises(SethoodError):
        main_task(parse("{| x1 : x1 = x1 |} in x"))


def test_es_mode_uses_view():
    # with the Russell complement's set as ES the instance clash appears only in CT&ES
    v = main_task(parse("exists x1 . x1 in x"), CT_ES, [V, EMPTY], 300)
    assert not v.refuted
    assert v.theory.comprehension_count() == 3
    assert main_task(parse("x = x"), CT, [V, EMPTY]).theory.comprehension_count() == 1


def test_ct_verdicts_ignore_ledger_order():
    views = [list(p) for p in itertools.permutations([V, EMPTY, SELF])]
    for text in ("x notin x", "x in x", "exists x1 . x1 notin x"):
        outcomes = {
            (main_task(parse(text), CT, view, 400).result.outcome,
             main_task(parse(text), CT, view, 400).result.steps)
            for view in views
        }
        assert len(outcomes) == 1


def test_refuted_never_witnessed_small():
    for f in enumerate_up_to(GenConfig(max_length=5, equality=True)):
        v = main_task(f, CT, budget=300)
        if v.refuted:
            assert find_witness(f, 3) is None, to_text(f)
            assert check_records(v.result.trace_records()).valid


def test_fast_path_hint():
    assert fast_path_hint(Equal("x", "x")) == "universal"
    assert fast_path_hint(parse("x notin x"), [SELF]) == "complement-of-accepted"
    assert fast_path_hint(Not(Equal("x", "x"))) is None


def test_budget_must_be_positive():
    with pytest.raises(ValueError):
        refute(base_theory(), 0)
