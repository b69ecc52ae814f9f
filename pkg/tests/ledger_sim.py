"""Randomized ledger campaigns with an independent invariant audit."""

from __future__ import annotations

import random

from nact.formula import Not, canonicalize, to_text
from nact.ledger import (
    ACCEPTED, EXCLUDED, PENDING, REFUTED, Ledger, Verdict, apply_verdict, get_mode,
    check_invariants, j3_completion,
)
from nact.refuter import add_existing_sets, base_theory

FAKE_TRACE = ({"index": 0, "rule": "input", "premises": [], "literals": [], "clause": "$false"},)


def _neg_key(key_formula) -> str:
    return to_text(canonicalize(Not(key_formula)))


def _is_refutation(event: str) -> bool:
    return event in ("refuted", "crossed-by-negation") or event.startswith("revised-refuted")


def audit(ledger: Ledger, theories: list[tuple[int, set[str]]]) -> list[str]:
    """Re-derive the invariants from scratch, without the ledger's own checker."""
    bad = []
    second = {k for k, e in ledger.entries.items() if e.second_sort}
    for k, e in ledger.entries.items():
        if e.status == REFUTED and e.evidence not in ledger.traces:
            bad.append(f"no trace for {k}")
        if ledger.mode.cross_negation and e.status == REFUTED and not e.second_sort:
            other = ledger.entries.get(_neg_key(e.formula))
            if other is not None and other.status not in (REFUTED, EXCLUDED):
                bad.append(f"cross-negation broken at {k}")
    for step, labels in theories:
        for key in labels:
            if key in second:
                bad.append(f"second-sort {key} in a theory")
            e = ledger.entries[key]
            first_refuted = next((s for ev, s in e.log if _is_refutation(ev)), None)
            if first_refuted is not None and first_refuted <= step:
                bad.append(f"refuted {key} in a theory at step {step}")
    return bad


def run_random(mode_name: str, pool: list, rng: random.Random, steps: int) -> tuple[Ledger, int]:
    """Drive ``steps`` random verdicts; assert invariants after every one.

    Returns the ledger and the number of verdicts applied.
    """
    mode = get_mode(mode_name)
    led = Ledger(mode)
    theories: list[tuple[int, set[str]]] = []
    done = 0
    for _ in range(steps):
        if rng.random() < 0.08:
            j3_completion(led)
        f = rng.choice(pool)
        e = led.add(f)
        if e.status != PENDING:
            continue
        if mode.uses_es:
            view = led.es_view()
            led.record_theory(view)
            th = add_existing_sets(base_theory(), view)
            keys = {a.label[3:] for a in th.axioms if a.role == "es"}
            theories.append((led.step, keys))
        refuted = rng.random() < 0.4
        apply_verdict(led, e, Verdict(refuted, FAKE_TRACE if refuted else ()))
        done += 1
        problems = check_invariants(led) + audit(led, theories)
        assert not problems, problems
    j3_completion(led)
    problems = check_invariants(led) + audit(led, theories)
    assert not problems, problems
    return led, done


def final_statuses(led: Ledger) -> dict[str, str]:
    return {k: e.status for k, e in led.entries.items()}


__all__ = ["run_random", "audit", "final_statuses", "FAKE_TRACE", "ACCEPTED"]
