"""Sethood assumptions and bounded refutation (the main task).

A :class:`Theory` is an immutable list of closed axioms over constants.
Extensionality is always present.  Assuming that ``{x : A(x)}`` is a set adds
a fresh constant ``c`` and the comprehension axiom ``forall y . y in c <-> A(y)``.

Comprehension terms inside ``A`` are handled before clausification:

* a set term ``{v : B}`` becomes the constant of that set, and its own
  comprehension axiom is added (with role ``term``);
* a class term ``{| v : B |}`` is never reified: ``u in {| v : B |}`` is
  unfolded to ``B(u)`` (Church schema at the meta level).  A class term in
  any other position is rejected.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .formula import (
    And, Comprehension, EmptySet, Equal, Exists, Falsum, Forall, Implies,
    Member, Mirimanoff, Not, Or, Singleton, Union, Verum, canonicalize,
    free_vars, is_param, length, params, rename_free, substitute, to_text,
)
from .models import EXTENSIONALITY
from .prover import ProofStep, Prover, _Skolem, clausify, equality_axioms

__all__ = [
    "Axiom", "Theory", "RefutationResult", "MainTaskVerdict", "ParametricVerdict",
    "AcceptedSet", "SethoodError", "base_theory", "assume_sethood", "refute",
    "main_task", "main_task_parametric", "set_term", "set_key", "fast_path_hint",
    "comprehension_axiom",
]

CT = "CT"
CT_ES = "CT-and-ES"


class SethoodError(ValueError):
    """The formula cannot constitute a set in the requested theory."""


@dataclass(frozen=True)
class Axiom:
    label: str
    formula: object
    role: str  # frame | assumption | es | term


@dataclass(frozen=True)
class Theory:
    axioms: tuple[Axiom, ...]
    constants: tuple[tuple[str, str], ...] = ()  # (set key, constant)

    def constant_for(self, key: str) -> str | None:
        for k, c in self.constants:
            if k == key:
                return c
        return None

    def comprehension_count(self) -> int:
        return sum(1 for a in self.axioms if a.role in ("assumption", "es", "term"))


@dataclass(frozen=True)
class AcceptedSet:
    """A set visible to the refuter: its constituting formula in ``x``."""

    formula: object

    @property
    def key(self) -> str:
        return to_text(self.formula)

    @property
    def length(self) -> int:
        return length(self.formula)


def base_theory() -> Theory:
    return Theory((Axiom("extensionality", EXTENSIONALITY, "frame"),))


def _iff(a, b):
    return And(Implies(a, b), Implies(b, a))


def set_key(term: Comprehension) -> str:
    """Canonical text of the formula constituting a set term, in ``x``."""
    return to_text(canonicalize(rename_free(term.body, term.var, "x")))


def set_term(formula) -> Comprehension:
    """The set-operator term ``{x : A}`` (closed when A has only x free)."""
    return Comprehension("x", formula, False)


def comprehension_axiom(constant: str, formula):
    y = "y"
    return Forall(y, _iff(Member(y, constant), rename_free(formula, "x", y)))


class _Builder:
    def __init__(self, theory: Theory) -> None:
        self.axioms = list(theory.axioms)
        self.constants = list(theory.constants)

    def constant(self, key: str) -> str | None:
        for k, c in self.constants:
            if k == key:
                return c
        return None

    def register(self, formula, role: str, label: str, *, force_new: bool = False) -> str:
        key = to_text(canonicalize(formula))
        if not force_new:
            known = self.constant(key)
            if known is not None:
                return known
        name = f"c{len(self.constants)}"
        self.constants.append((key, name))
        # reify the body first so nested set terms get constants too
        body = self.reify(canonicalize(formula))
        self.axioms.append(Axiom(label or key, comprehension_axiom(name, body), role))
        return name

    def term(self, t) -> str:
        if isinstance(t, str):
            return t
        if isinstance(t, Comprehension):
            if t.is_class:
                raise SethoodError("class terms only occur to the right of 'in'")
            return self.register(rename_free(t.body, t.var, "x"), "term", "")
        if isinstance(t, (EmptySet, Singleton, Union)):
            raise SethoodError("expand sugar before refutation")
        raise TypeError(f"not a term: {t!r}")

    def reify(self, f):
        if isinstance(f, (Verum, Falsum)):
            return f
        if isinstance(f, Member):
            r = f.right
            if isinstance(r, Comprehension) and r.is_class:
                left = self.term(f.left)
                return self.reify(rename_free(r.body, r.var, left))
            return Member(self.term(f.left), self.term(r))
        if isinstance(f, Equal):
            return Equal(self.term(f.left), self.term(f.right))
        if isinstance(f, Mirimanoff):
            raise SethoodError("the Mirimanoff marker has no first-order axiom")
        if isinstance(f, Not):
            return Not(self.reify(f.body))
        if isinstance(f, (And, Or, Implies)):
            return type(f)(self.reify(f.left), self.reify(f.right))
        if isinstance(f, (Exists, Forall)):
            return type(f)(f.var, self.reify(f.body))
        raise TypeError(f"not a formula: {f!r}")

    def build(self) -> Theory:
        return Theory(tuple(self.axioms), tuple(self.constants))


def _check_set_constituting(A) -> None:
    fv = free_vars(A)
    leftover = sorted(v for v in fv if is_param(v))
    if leftover:
        raise SethoodError(f"unsubstituted parameters {leftover}")
    if fv - {"x"}:
        raise SethoodError(f"free variables other than x: {sorted(fv - {'x'})}")


def assume_sethood(A, theory: Theory) -> Theory:
    """Extend ``theory`` by a fresh constant for ``{x : A}`` and its axiom."""
    _check_set_constituting(A)
    b = _Builder(theory)
    b.register(A, "assumption", f"Set({{x : {to_text(canonicalize(A))}}})", force_new=True)
    return b.build()


def add_existing_sets(theory: Theory, sets: Iterable[AcceptedSet]) -> Theory:
    b = _Builder(theory)
    for s in sets:
        _check_set_constituting(s.formula)
        b.register(s.formula, "es", f"ES {s.key}")
    return b.build()


# --------------------------------------------------------------------------
# Refutation
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class RefutationResult:
    outcome: str  # refuted | exhausted
    steps: int
    budget: int
    trace: tuple[ProofStep, ...] = ()
    saturated: bool = False

    @property
    def refuted(self) -> bool:
        return self.outcome == "refuted"

    def trace_records(self) -> list[dict]:
        return [s.to_record() for s in self.trace]

    def trace_text(self) -> str:
        return "".join(json.dumps(r, sort_keys=True) + "\n" for r in self.trace_records())

    def write_trace(self, path: str | Path) -> None:
        Path(path).write_text(self.trace_text())


def _clauses(theory: Theory):
    constants = {c: c for _, c in theory.constants}
    sk = _Skolem("sk")
    usable, support = [], []
    for ax in theory.axioms:
        # set terms inside A are part of what the assumption asserts
        target = support if ax.role in ("assumption", "term") else usable
        for c in clausify(ax.formula, constants, sk):
            target.append((ax.label, c))
    usable.extend(equality_axioms())
    return usable, support


def refute(theory: Theory, budget: int, *, prover: Prover | None = None) -> RefutationResult:
    """Bounded search for falsum.

    Clauses of the sethood assumption (and of set terms it mentions) form
    the set of support; with no assumption every clause is support.
    Exhaustion is a result, not an error, and never counts as evidence of
    consistency.
    """
    if budget <= 0:
        raise ValueError("budget must be positive")
    usable, support = _clauses(theory)
    res = (prover or Prover()).run(usable, support, budget)
    if res.refuted:
        return RefutationResult("refuted", res.steps_used, budget, tuple(res.trace))
    return RefutationResult("exhausted", res.steps_used, budget, saturated=res.saturated)


@dataclass(frozen=True)
class MainTaskVerdict:
    formula: object
    mode: str
    result: RefutationResult
    theory: Theory = field(repr=False)

    @property
    def refuted(self) -> bool:
        return self.result.refuted

    @property
    def verdict(self) -> str:
        return "refuted" if self.refuted else "kept-provisional"


def _theory_for(A, mode: str, ledger_view: Sequence[AcceptedSet] | None) -> Theory:
    if mode not in (CT, CT_ES):
        raise ValueError(f"unknown refutation frame {mode!r}")
    th = base_theory()
    if mode == CT_ES and ledger_view:
        th = add_existing_sets(th, ledger_view)
    return assume_sethood(A, th)


def main_task(A, mode: str = CT, ledger_view: Sequence[AcceptedSet] | None = None,
              budget: int = 1000) -> MainTaskVerdict:
    """Try to derive falsum from Set({x : A}).

    In ``CT`` mode the ledger view is ignored, so verdicts cannot depend on
    which other sets were accepted earlier.
    """
    th = _theory_for(A, mode, ledger_view)
    return MainTaskVerdict(A, mode, refute(th, budget), th)


@dataclass(frozen=True)
class ParametricVerdict:
    formula: object
    refuted: bool
    instance: object | None
    instances: tuple[str, ...]
    result: RefutationResult | None = None

    @property
    def verdict(self) -> str:
        return "refuted" if self.refuted else "provisional"


def instances(A, sets: Sequence[AcceptedSet], length_cap: int,
              must_include: AcceptedSet | None = None) -> list:
    """All substitutions of accepted set terms for A's parameters within the cap.

    With ``must_include`` only combinations using that set are produced.
    """
    ps = params(A)
    out, seen = [], set()
    for combo in itertools.product(sets, repeat=len(ps)):
        if must_include is not None and all(s.key != must_include.key for s in combo):
            continue
        f = A
        for p, s in zip(ps, combo):
            f = substitute(f, p, set_term(s.formula))
        if length(f) > length_cap:
            continue
        text = to_text(f)
        if text not in seen:
            seen.add(text)
            out.append(f)
    return out


def main_task_parametric(A, ledger_view: Sequence[AcceptedSet], budget: int, length_cap: int,
                         mode: str = CT, must_include: AcceptedSet | None = None) -> ParametricVerdict:
    """Run the main task on every admissible instance; refuted if any instance is."""
    if not params(A):
        raise ValueError("formula has no parameters")
    done: list[str] = []
    for inst in instances(A, ledger_view, length_cap, must_include):
        done.append(to_text(inst))
        v = main_task(inst, mode, ledger_view, budget)
        if v.refuted:
            return ParametricVerdict(A, True, inst, tuple(done), v.result)
    return ParametricVerdict(A, False, None, tuple(done))


def fast_path_hint(A, ledger_view: Sequence[AcceptedSet] = ()) -> str | None:
    """Advisory reason to expect sethood; never used as a verdict."""
    text = to_text(canonicalize(A))
    if text == "x = x":
        return "universal"
    negated = to_text(canonicalize(Not(A)))
    if any(s.key == negated for s in ledger_view):
        return "complement-of-accepted"
    return None
