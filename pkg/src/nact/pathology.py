"""Pathology classification of formulas.

Primitive pathological formulas are the circles ``not (x in^n x)`` and the
Mirimanoff marker ``M(x)``.  A formula is *patho* when it is provably
equivalent to a circle ``circle_n(v)`` for one of its free variables ``v``
and some ``n <= n_max``; it is *anti-patho* when it is provably equivalent to
the negation of one.

Each equivalence splits into two unsatisfiability questions (for patho:
``f & not P`` and ``not f & P``).  A question is settled negatively by a
finite countermodel (membership need not be extensional, the logic is pure
first order with equality) and positively by a refutation.  Per question the
search runs small models, then the prover, then the remaining model sizes;
each phase is limited by the budget, so a larger budget can only settle more
questions, and a settled question never changes its answer.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .formula import (
    And, Exists, Member, Mirimanoff, Not, canonicalize, free_vars, subformulas, to_text,
)
from .models import satisfy
from .prover import (
    ClausificationError, ProofStep, Prover, _Skolem, clausify, equality_axioms, mentions_equality,
)

__all__ = [
    "PrimPatho", "PathologyVerdict", "HereditaryVerdict", "circle",
    "detect_prim_patho", "check_patho", "classify_hereditary",
    "is_consistent_candidate", "N_MAX",
]

N_MAX = 4
MODEL_N = 3
_SMALL_N = 2


@dataclass(frozen=True)
class PrimPatho:
    kind: str  # circle | mirimanoff
    n: int = 0
    var: str = "x"

    def __str__(self) -> str:
        return f"circle({self.n})" if self.kind == "circle" else "mirimanoff"


def circle(n: int, var: str = "x"):
    """Canonical ``not (var in y1 & y1 in y2 & ... & y_{n-1} in var)``."""
    if n < 1:
        raise ValueError("circle length must be at least 1")
    if n == 1:
        return Not(Member(var, var))
    names = [f"_c{i}" for i in range(1, n)]
    chain = [var] + names + [var]
    body = Member(chain[0], chain[1])
    for a, b in zip(chain[1:-1], chain[2:]):
        body = And(body, Member(a, b))
    for name in reversed(names):
        body = Exists(name, body)
    return canonicalize(Not(body))


def detect_prim_patho(f) -> PrimPatho | None:
    """Syntactic recognition of the primitive pathological formulas."""
    if isinstance(f, Mirimanoff):
        return PrimPatho("mirimanoff", 0, f.term if isinstance(f.term, str) else "x")
    if not isinstance(f, Not):
        return None
    atoms: list[tuple[str, str]] = []
    binders: list[str] = []

    def walk(g, scope: frozenset) -> bool:
        if isinstance(g, Exists):
            if g.var in scope:
                return False
            binders.append(g.var)
            return walk(g.body, scope | {g.var})
        if isinstance(g, And):
            return walk(g.left, scope) and walk(g.right, scope)
        if isinstance(g, Member) and isinstance(g.left, str) and isinstance(g.right, str):
            atoms.append((g.left, g.right))
            return True
        return False

    if not walk(f.body, frozenset()):
        return None
    bound = set(binders)
    if len(bound) != len(binders):
        return None
    free = {v for a in atoms for v in a} - bound
    if len(free) != 1 or len(atoms) != len(binders) + 1:
        return None
    succ: dict[str, str] = {}
    for u, v in atoms:
        if u in succ:
            return None
        succ[u] = v
    (start,) = free
    seen, cur = [], start
    while cur in succ and cur not in seen:
        seen.append(cur)
        cur = succ[cur]
    if cur != start or len(seen) != len(atoms) or set(seen) != bound | free:
        return None
    return PrimPatho("circle", len(atoms), start)


# --------------------------------------------------------------------------
# Bounded equivalence checks
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class _Answer:
    status: str  # unsat | sat | unknown
    steps: int
    trace: tuple[ProofStep, ...] = ()


def _constants(f) -> dict[str, str]:
    return {v: "k" + v for v in sorted(free_vars(f))}


def _unsat(g, budget: int, model_n: int) -> _Answer:
    used = 0
    small = min(_SMALL_N, model_n)
    m = satisfy(g, small, budget=budget)
    used += m.steps
    if m.found:
        return _Answer("sat", used)
    try:
        clauses = clausify(g, _constants(g), _Skolem("sk"))
    except ClausificationError:
        clauses = None
    if clauses is not None:
        # without '=' in the goal the equality axioms cannot contribute
        frame = equality_axioms() if mentions_equality(clauses) else []
        res = Prover().run(frame, [("goal", c) for c in clauses], budget)
        used += res.steps_used
        if res.refuted:
            return _Answer("unsat", used, tuple(res.trace))
    if model_n > small:
        m = satisfy(g, model_n, budget=budget)
        used += m.steps
        if m.found:
            return _Answer("sat", used)
    return _Answer("unknown", used)


def _equivalence(f, target, budget: int, model_n: int) -> tuple[str, int, tuple]:
    """proved | disproved | unknown for ``f <-> target``."""
    a = _unsat(And(f, Not(target)), budget, model_n)
    b = _unsat(And(Not(f), target), budget, model_n)
    steps = a.steps + b.steps
    if "sat" in (a.status, b.status):
        return "disproved", steps, ()
    if a.status == b.status == "unsat":
        return "proved", steps, (a.trace, b.trace)
    return "unknown", steps, ()


@dataclass(frozen=True)
class PathologyVerdict:
    kind: str  # prim-patho | patho | anti-patho | non-patho | unknown
    patho_status: str  # proved | disproved | unknown
    anti_status: str
    steps: int
    prim: PrimPatho | None = None
    target: str | None = None
    # one refutation trace per direction of the proved equivalence
    evidence: tuple[tuple[ProofStep, ...], ...] = ()

    @property
    def is_patho(self) -> bool:
        return self.patho_status == "proved"

    @property
    def is_anti(self) -> bool:
        return self.anti_status == "proved"


def _targets(f, n_max: int):
    fv = sorted(free_vars(f)) or ["x"]
    for v in fv:
        for n in range(1, n_max + 1):
            yield circle(n, v)


def check_patho(f, budget: int, *, n_max: int = N_MAX, model_n: int = MODEL_N) -> PathologyVerdict:
    """Bounded classification of ``f`` against circle targets up to ``n_max``.

    No formula is equivalent both to a circle and to a negated circle (a
    variable outside every membership cycle separates them), so at most one
    of the two statuses can be proved.
    """
    if budget <= 0:
        raise ValueError("budget must be positive")
    return _check_cached(f, budget, n_max, model_n)


@lru_cache(maxsize=65536)
def _check_cached(f, budget: int, n_max: int, model_n: int) -> PathologyVerdict:
    prim = detect_prim_patho(f)
    if prim is not None:
        anti = "disproved" if prim.kind == "circle" else "unknown"
        return PathologyVerdict("prim-patho", "proved", anti, 0, prim, to_text(f))
    if any(isinstance(g, Mirimanoff) for g in subformulas(f)):
        return PathologyVerdict("unknown", "unknown", "unknown", 0)
    steps = 0
    patho_states, anti_states = [], []
    for t in _targets(f, n_max):
        st, used, trace = _equivalence(f, t, budget, model_n)
        steps += used
        patho_states.append(st)
        if st == "proved":
            return PathologyVerdict("patho", "proved", "disproved", steps, None, to_text(t), trace)
        st, used, trace = _equivalence(f, Not(t), budget, model_n)
        steps += used
        anti_states.append(st)
        if st == "proved":
            target = to_text(canonicalize(Not(t)))
            return PathologyVerdict("anti-patho", "disproved", "proved", steps, None, target, trace)
    patho = _summary(patho_states)
    anti = _summary(anti_states)
    kind = "non-patho" if patho == anti == "disproved" else "unknown"
    return PathologyVerdict(kind, patho, anti, steps)


def _summary(states: list[str]) -> str:
    if "proved" in states:
        return "proved"
    if "unknown" in states or not states:
        return "unknown"
    return "disproved"


# --------------------------------------------------------------------------
# Hereditary notions
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class HereditaryVerdict:
    kind: str  # hereditary-patho | hnp | unknown
    offending: str | None = None
    steps: int = 0


def _distinct_subformulas(f) -> list:
    out, seen = [], set()
    for g in subformulas(f):
        if g not in seen:
            seen.add(g)
            out.append(g)
    return out


def classify_hereditary(f, budget: int, **kw) -> HereditaryVerdict:
    """hereditary-patho if some subformula is patho; hnp if none can be."""
    steps = 0
    unknown = False
    for g in _distinct_subformulas(f):
        v = check_patho(g, budget, **kw)
        steps += v.steps
        if v.is_patho:
            return HereditaryVerdict("hereditary-patho", to_text(g), steps)
        if v.patho_status != "disproved":
            unknown = True
    return HereditaryVerdict("unknown" if unknown else "hnp", None, steps)


def is_consistent_candidate(f, budget: int, **kw) -> bool | None:
    """No patho and no anti-patho subformula in ``f`` or ``not f``.

    Returns None when some check ran out of budget and nothing decisive
    was found.
    """
    unknown = False
    for g in _distinct_subformulas(f) + [Not(f)]:
        v = check_patho(g, budget, **kw)
        if v.is_patho or v.is_anti:
            return False
        if v.patho_status != "disproved" or v.anti_status != "disproved":
            unknown = True
    return None if unknown else True
