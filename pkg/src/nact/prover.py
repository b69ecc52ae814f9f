"""Clausal resolution prover with a given-clause loop.

Terms: a variable is a ``str`` starting with an upper-case letter; a
compound is a tuple ``(functor, *args)`` and a constant is ``(name,)``.
A literal is ``(positive, predicate, args)``; predicates are ``in`` and
``eq``.  Equality is axiomatised explicitly (reflexivity, symmetry,
transitivity, substitutivity of ``in`` in both argument places).

The search is deterministic: the lightest unprocessed clause (ties by age)
is selected, factored, and resolved against every processed clause.  Every
generated clause costs one step, so the step budget alone decides where a
run stops and a larger budget replays the same run further.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field

from .formula import (
    And, Comprehension, Equal, Exists, Falsum, Forall, Implies, Member,
    Mirimanoff, Not, Or, Verum, free_vars,
)

__all__ = [
    "Clause", "ProofStep", "ProofResult", "Prover", "clausify", "equality_axioms",
    "clause_text", "term_text", "ClausificationError", "mentions_equality",
]


class ClausificationError(ValueError):
    pass


# --------------------------------------------------------------------------
# Terms, unification
# --------------------------------------------------------------------------

def is_var(t) -> bool:
    return isinstance(t, str)


def term_text(t) -> str:
    if isinstance(t, str):
        return t
    if len(t) == 1:
        return t[0]
    return t[0] + "(" + ",".join(term_text(a) for a in t[1:]) + ")"


def literal_text(lit) -> str:
    sign, pred, args = lit
    body = pred + "(" + ",".join(term_text(a) for a in args) + ")"
    return body if sign else "~" + body


def clause_text(lits) -> str:
    if not lits:
        return "$false"
    return " | ".join(literal_text(l) for l in lits)


def _walk(t, s):
    while isinstance(t, str) and t in s:
        t = s[t]
    return t


def _occurs(v, t, s) -> bool:
    t = _walk(t, s)
    if isinstance(t, str):
        return t == v
    return any(_occurs(v, a, s) for a in t[1:])


def unify(a, b, s: dict) -> dict | None:
    stack = [(a, b)]
    s = dict(s)
    while stack:
        x, y = stack.pop()
        x, y = _walk(x, s), _walk(y, s)
        if x == y:
            continue
        if isinstance(x, str):
            if _occurs(x, y, s):
                return None
            s[x] = y
        elif isinstance(y, str):
            if _occurs(y, x, s):
                return None
            s[y] = x
        else:
            if x[0] != y[0] or len(x) != len(y):
                return None
            stack.extend(zip(x[1:], y[1:]))
    return s


def _subst(t, s):
    t = _walk(t, s)
    if isinstance(t, str):
        return t
    if len(t) == 1:
        return t
    return (t[0],) + tuple(_subst(a, s) for a in t[1:])


def _subst_lit(lit, s):
    return (lit[0], lit[1], tuple(_subst(a, s) for a in lit[2]))


def _rename(t, suffix: str):
    if isinstance(t, str):
        return t + suffix
    if len(t) == 1:
        return t
    return (t[0],) + tuple(_rename(a, suffix) for a in t[1:])


def _match(pattern, target, s: dict) -> dict | None:
    """One-way matching: bind variables of ``pattern`` only."""
    stack = [(pattern, target)]
    s = dict(s)
    while stack:
        p, t = stack.pop()
        if isinstance(p, str):
            if p in s:
                if s[p] != t:
                    return None
            else:
                s[p] = t
        else:
            if isinstance(t, str) or p[0] != t[0] or len(p) != len(t):
                return None
            stack.extend(zip(p[1:], t[1:]))
    return s


def subsumes(c, d) -> bool:
    """``c`` theta-subsumes ``d`` (variables of d treated as constants)."""
    if len(c) > len(d):
        return False

    def rec(i: int, s: dict) -> bool:
        if i == len(c):
            return True
        sign, pred, args = c[i]
        for lit in d:
            if lit[0] == sign and lit[1] == pred:
                s2 = _match(("t",) + args, ("t",) + lit[2], s)
                if s2 is not None and rec(i + 1, s2):
                    return True
        return False

    return rec(0, {})


def _functors(t, out: set) -> None:
    if not isinstance(t, str):
        out.add(t[0])
        for a in t[1:]:
            _functors(a, out)


def features(lits) -> frozenset:
    """Symbols every clause subsuming ``lits`` must be built from (a subset test
    on features is a cheap necessary condition for subsumption)."""
    out: set = set()
    for sign, pred, args in lits:
        out.add((sign, pred))
        for a in args:
            _functors(a, out)
    return frozenset(out)


def _vars_in(t, out: list) -> None:
    if isinstance(t, str):
        if t not in out:
            out.append(t)
    else:
        for a in t[1:]:
            _vars_in(a, out)


def _blind(t) -> str:
    if isinstance(t, str):
        return "?"
    if len(t) == 1:
        return t[0]
    return t[0] + "(" + ",".join(_blind(a) for a in t[1:]) + ")"


def _lit_blind_key(lit):
    return (not lit[0], lit[1], tuple(_blind(a) for a in lit[2]))


def normalize(lits) -> tuple | None:
    """Deduplicate, sort, rename variables to V0, V1, ...; None for tautologies."""
    uniq = list(dict.fromkeys(lits))
    pos = {(l[1], l[2]) for l in uniq if l[0]}
    if any((l[1], l[2]) in pos for l in uniq if not l[0]):
        return None
    uniq.sort(key=_lit_blind_key)
    order: list[str] = []
    for l in uniq:
        for a in l[2]:
            _vars_in(a, order)
    ren = {v: f"V{i}" for i, v in enumerate(order)}
    out = [_rename_lit(l, ren) for l in uniq]
    out.sort(key=lambda l: (_lit_blind_key(l), literal_text(l)))
    # renaming again after the tie-break keeps names in first-occurrence order
    order = []
    for l in out:
        for a in l[2]:
            _vars_in(a, order)
    ren = {v: f"V{i}" for i, v in enumerate(order)}
    return tuple(_rename_lit(l, ren) for l in out)


def _rename_map(t, ren: dict):
    if isinstance(t, str):
        return ren.get(t, t)
    if len(t) == 1:
        return t
    return (t[0],) + tuple(_rename_map(a, ren) for a in t[1:])


def _rename_lit(lit, ren: dict):
    return (lit[0], lit[1], tuple(_rename_map(a, ren) for a in lit[2]))


def _weight_term(t) -> int:
    if isinstance(t, str):
        return 1
    return 1 + sum(_weight_term(a) for a in t[1:])


def weight(lits) -> int:
    return sum(1 + sum(_weight_term(a) for a in l[2]) for l in lits)


# --------------------------------------------------------------------------
# Clausification
# --------------------------------------------------------------------------

def _nnf(f, positive: bool = True):
    """Negation normal form over And/Or/Exists/Forall and literals."""
    if isinstance(f, Verum):
        return ("true",) if positive else ("false",)
    if isinstance(f, Falsum):
        return ("false",) if positive else ("true",)
    if isinstance(f, Member):
        return ("lit", positive, "in", (f.left, f.right))
    if isinstance(f, Equal):
        return ("lit", positive, "eq", (f.left, f.right))
    if isinstance(f, Mirimanoff):
        raise ClausificationError("the Mirimanoff marker is outside the prover's language")
    if isinstance(f, Not):
        return _nnf(f.body, not positive)
    if isinstance(f, And):
        return ("and" if positive else "or", _nnf(f.left, positive), _nnf(f.right, positive))
    if isinstance(f, Or):
        return ("or" if positive else "and", _nnf(f.left, positive), _nnf(f.right, positive))
    if isinstance(f, Implies):
        if positive:
            return ("or", _nnf(f.left, False), _nnf(f.right, True))
        return ("and", _nnf(f.left, True), _nnf(f.right, False))
    if isinstance(f, Exists):
        return ("exists" if positive else "forall", f.var, _nnf(f.body, positive))
    if isinstance(f, Forall):
        return ("forall" if positive else "exists", f.var, _nnf(f.body, positive))
    raise ClausificationError(f"cannot clausify {f!r}")


class _Skolem:
    def __init__(self, prefix: str, start: int = 0) -> None:
        self.prefix = prefix
        self.counter = itertools.count(start)
        self.var_counter = itertools.count()

    def function(self) -> str:
        return f"{self.prefix}{next(self.counter)}"

    def variable(self) -> str:
        return f"U{next(self.var_counter)}"


def _term(name, env: dict, constants: dict):
    if isinstance(name, Comprehension):
        raise ClausificationError("comprehension terms must be replaced by constants first")
    if not isinstance(name, str):
        raise ClausificationError(f"unsupported term {name!r}")
    if name in env:
        return env[name]
    if name in constants:
        return (constants[name],)
    raise ClausificationError(f"free variable {name!r} has no constant")


def _skolemize(n, env: dict, universals: list, constants: dict, sk: _Skolem):
    kind = n[0]
    if kind in ("true", "false"):
        return n
    if kind == "lit":
        _, sign, pred, args = n
        return ("lit", sign, pred, tuple(_term(a, env, constants) for a in args))
    if kind in ("and", "or"):
        return (kind, _skolemize(n[1], env, universals, constants, sk),
                _skolemize(n[2], env, universals, constants, sk))
    if kind == "forall":
        v = sk.variable()
        return _skolemize(n[2], {**env, n[1]: v}, universals + [v], constants, sk)
    if kind == "exists":
        fn = sk.function()
        value = (fn,) + tuple(universals) if universals else (fn,)
        return _skolemize(n[2], {**env, n[1]: value}, universals, constants, sk)
    raise AssertionError(kind)


_CNF_LIMIT = 4096


def _cnf(n) -> list[list]:
    kind = n[0]
    if kind == "true":
        return []
    if kind == "false":
        return [[]]
    if kind == "lit":
        return [[(n[1], n[2], n[3])]]
    if kind == "and":
        return _cnf(n[1]) + _cnf(n[2])
    if kind == "or":
        left, right = _cnf(n[1]), _cnf(n[2])
        if len(left) * len(right) > _CNF_LIMIT:
            raise ClausificationError("clause normal form too large")
        return [a + b for a in left for b in right]
    raise AssertionError(kind)


def clausify(f, constants: dict[str, str], sk: _Skolem) -> list[tuple]:
    """Clauses of the universal closure-free sentence ``f``.

    ``constants`` maps free names of ``f`` to constant symbols.  Clauses are
    normalised; tautologies are dropped.
    """
    missing = set(free_vars(f)) - set(constants)
    if missing:
        raise ClausificationError(f"free variables without constants: {sorted(missing)}")
    nnf = _nnf(f)
    sko = _skolemize(nnf, {}, [], constants, sk)
    out = []
    for lits in _cnf(sko):
        c = normalize(lits)
        if c is not None and c not in out:
            out.append(c)
    return out


def equality_axioms() -> list[tuple[str, tuple]]:
    X, Y, Z = "X", "Y", "Z"
    eq = lambda a, b, s=True: (s, "eq", (a, b))  # noqa: E731
    mem = lambda a, b, s=True: (s, "in", (a, b))  # noqa: E731
    raw = [
        ("eq_reflexivity", [eq(X, X)]),
        ("eq_symmetry", [eq(X, Y, False), eq(Y, X)]),
        ("eq_transitivity", [eq(X, Y, False), eq(Y, Z, False), eq(X, Z)]),
        ("eq_in_left", [eq(X, Y, False), mem(X, Z, False), mem(Y, Z)]),
        ("eq_in_right", [eq(X, Y, False), mem(Z, X, False), mem(Z, Y)]),
    ]
    return [(label, normalize(lits)) for label, lits in raw]


def mentions_equality(clauses) -> bool:
    return any(lit[1] == "eq" for c in clauses for lit in c)


# --------------------------------------------------------------------------
# Given-clause loop
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Clause:
    id: int
    lits: tuple
    rule: str  # input | resolve | factor
    parents: tuple[int, ...] = ()
    literals: tuple[int, ...] = ()
    label: str = ""

    @property
    def weight(self) -> int:
        return weight(self.lits)

    def text(self) -> str:
        return clause_text(self.lits)


@dataclass(frozen=True)
class ProofStep:
    index: int
    rule: str
    premises: tuple[int, ...]
    literals: tuple[int, ...]
    clause: str
    label: str = ""

    def to_record(self) -> dict:
        rec = {
            "index": self.index,
            "rule": self.rule,
            "premises": list(self.premises),
            "literals": list(self.literals),
            "clause": self.clause,
        }
        if self.label:
            rec["label"] = self.label
        return rec


@dataclass
class ProofResult:
    refuted: bool
    steps_used: int
    budget: int
    saturated: bool = False
    trace: list[ProofStep] = field(default_factory=list)


class _Queue:
    """Waiting clauses, selectable by weight or by age."""

    def __init__(self) -> None:
        self.by_weight: list[tuple[int, int]] = []
        self.by_age: list[int] = []
        self.taken: set[int] = set()
        self.pushed = 0

    def push(self, c: Clause) -> None:
        heapq.heappush(self.by_weight, (c.weight, c.id))
        heapq.heappush(self.by_age, c.id)
        self.pushed += 1

    def __bool__(self) -> bool:
        return len(self.taken) < self.pushed

    def pop(self, by_age: bool) -> int:
        while True:
            cid = heapq.heappop(self.by_age) if by_age else heapq.heappop(self.by_weight)[1]
            if cid not in self.taken:
                self.taken.add(cid)
                return cid


class Prover:
    """One proof attempt over fixed usable and support clause sets.

    ``usable`` clauses are never selected as given clauses; with an empty
    ``support`` every clause is treated as support.
    """

    def __init__(self, *, max_weight: int = 40, max_literals: int = 6, age_ratio: int = 4) -> None:
        self.max_weight = max_weight
        self.max_literals = max_literals
        # every age_ratio-th given clause is the oldest waiting one
        self.age_ratio = age_ratio

    def run(self, usable: list[tuple[str, tuple]], support: list[tuple[str, tuple]],
            budget: int) -> ProofResult:
        if budget <= 0:
            raise ValueError("budget must be positive")
        if not support:
            usable, support = [], list(usable)
        clauses: list[Clause] = []
        seen: set[tuple] = set()
        processed: list[Clause] = []
        feats: dict[int, frozenset] = {}
        queue = _Queue()

        def subsumed(lits) -> bool:
            f = features(lits)
            n = len(lits)
            return any(
                len(p.lits) <= n and feats[p.id] <= f and subsumes(p.lits, lits)
                for p in processed
            )

        def add(lits, rule, parents=(), literals=(), label="") -> Clause | None:
            if lits in seen:
                return None
            seen.add(lits)
            c = Clause(len(clauses), lits, rule, parents, literals, label)
            clauses.append(c)
            return c

        for label, lits in usable:
            c = add(lits, "input", label=label)
            if c is not None:
                if not lits:
                    return self._result(clauses, c, 0, budget)
                feats[c.id] = features(lits)
                processed.append(c)
        for label, lits in support:
            c = add(lits, "input", label=label)
            if c is not None:
                if not lits:
                    return self._result(clauses, c, 0, budget)
                queue.push(c)

        steps = 0
        picks = 0
        while queue:
            picks += 1
            cid = queue.pop(by_age=self.age_ratio > 0 and picks % self.age_ratio == 0)
            given = clauses[cid]
            if subsumed(given.lits):
                continue
            feats[given.id] = features(given.lits)
            processed.append(given)
            for new_lits, rule, parents, lit_idx in self._inferences(given, processed):
                if steps >= budget:
                    return ProofResult(False, steps, budget)
                steps += 1
                if new_lits is None:
                    continue
                if not new_lits:
                    c = add(new_lits, rule, parents, lit_idx)
                    return self._result(clauses, c, steps, budget)
                if len(new_lits) > self.max_literals or weight(new_lits) > self.max_weight:
                    continue
                if new_lits in seen:
                    continue
                if subsumed(new_lits):
                    continue
                c = add(new_lits, rule, parents, lit_idx)
                queue.push(c)
        return ProofResult(False, steps, budget, saturated=True)

    def _inferences(self, given: Clause, processed: list[Clause]):
        g = given.lits
        # factors of the given clause
        for i, j in itertools.combinations(range(len(g)), 2):
            a, b = g[i], g[j]
            if a[0] != b[0] or a[1] != b[1]:
                continue
            s = unify(("t",) + a[2], ("t",) + b[2], {})
            if s is None:
                continue
            lits = [_subst_lit(l, s) for k, l in enumerate(g) if k != j]
            yield normalize(lits), "factor", (given.id,), (i, j)
        # binary resolvents with processed clauses (the given is among them)
        for other in processed:
            o = tuple((l[0], l[1], tuple(_rename(a, "_") for a in l[2])) for l in other.lits)
            for i, a in enumerate(g):
                for j, b in enumerate(o):
                    if a[0] == b[0] or a[1] != b[1]:
                        continue
                    s = unify(("t",) + a[2], ("t",) + b[2], {})
                    if s is None:
                        continue
                    lits = [_subst_lit(l, s) for k, l in enumerate(g) if k != i]
                    lits += [_subst_lit(l, s) for k, l in enumerate(o) if k != j]
                    yield normalize(lits), "resolve", (given.id, other.id), (i, j)

    @staticmethod
    def _result(clauses: list[Clause], empty: Clause, steps: int, budget: int) -> ProofResult:
        needed: set[int] = set()
        stack = [empty.id]
        while stack:
            cid = stack.pop()
            if cid in needed:
                continue
            needed.add(cid)
            stack.extend(clauses[cid].parents)
        order = sorted(needed)
        index = {cid: k for k, cid in enumerate(order)}
        trace = [
            ProofStep(
                index[cid], clauses[cid].rule,
                tuple(index[p] for p in clauses[cid].parents),
                clauses[cid].literals, clauses[cid].text(), clauses[cid].label,
            )
            for cid in order
        ]
        return ProofResult(True, steps, budget, trace=trace)
