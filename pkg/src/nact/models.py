"""Finite membership structures: evaluation, witness search, slimness.

A relation on ``{0..n-1}`` is encoded as an integer with bit ``j*n + i`` set
iff ``i E j``; bits for one element's members are contiguous, so numeric
order of the encoding is lexicographic order of member sets from the last
element down.  Extensional search walks columns in that order and prunes any
column already used, which preserves numeric order.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Callable, Iterator

from .formula import (
    And, Comprehension, EmptySet, Equal, Exists, Falsum, Forall, Implies,
    Member, Mirimanoff, Not, Or, Singleton, Union, Verum, free_vars, is_param,
)

__all__ = [
    "FiniteStructure", "SearchResult", "evaluate", "compile_formula",
    "find_witness", "find_witness_exhaustive", "satisfy", "slim_check",
    "check_axiom", "relations", "extensional_relations", "EXTENSIONALITY",
]


@dataclass(frozen=True)
class FiniteStructure:
    size: int
    members: frozenset[tuple[int, int]]  # (a, b) means a E b

    @classmethod
    def from_code(cls, n: int, code: int) -> "FiniteStructure":
        pairs = frozenset(
            (i, j) for j in range(n) for i in range(n) if code >> (j * n + i) & 1
        )
        return cls(n, pairs)

    @property
    def code(self) -> int:
        return sum(1 << (j * self.size + i) for i, j in self.members)

    def matrix(self) -> tuple[tuple[bool, ...], ...]:
        return tuple(
            tuple((i, j) in self.members for j in range(self.size)) for i in range(self.size)
        )

    def elements_of(self, j: int) -> frozenset[int]:
        return frozenset(i for i, k in self.members if k == j)

    def is_extensional(self) -> bool:
        cols = [self.elements_of(j) for j in range(self.size)]
        return len(set(cols)) == len(cols)

    def to_dict(self, witness: int | None = None) -> dict:
        out = {
            "size": self.size,
            "adjacency": [sorted(self.elements_of(j)) for j in range(self.size)],
        }
        if witness is not None:
            out["witness"] = witness
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "FiniteStructure":
        pairs = frozenset((i, j) for j, col in enumerate(data["adjacency"]) for i in col)
        return cls(int(data["size"]), pairs)

    def to_json(self, witness: int | None = None) -> str:
        return json.dumps(self.to_dict(witness), sort_keys=True)


# --------------------------------------------------------------------------
# Evaluation
# --------------------------------------------------------------------------

Evaluator = Callable[[tuple, int, list], bool]


def _var_slot(name, slots: dict[str, int]) -> int:
    if isinstance(name, str):
        if name not in slots:
            raise ValueError(f"unassigned variable {name!r}")
        return slots[name]
    if isinstance(name, Comprehension):
        raise ValueError("comprehension terms have no finite-structure evaluation here")
    if isinstance(name, (EmptySet, Singleton, Union)):
        raise ValueError("expand sugar before evaluation")
    raise TypeError(f"not a term: {name!r}")


def _ill_founded(E: tuple, n: int, a: int) -> bool:
    # a has an infinite descending chain iff a cycle is reachable downward
    done: set[int] = set()
    on_path: set[int] = set()

    def dfs(u: int) -> bool:
        on_path.add(u)
        for v in range(n):
            if E[v][u]:
                if v in on_path:
                    return True
                if v not in done and dfs(v):
                    return True
        on_path.discard(u)
        done.add(u)
        return False

    return dfs(a)


def compile_formula(f, free: list[str]) -> tuple[Evaluator, int]:
    """Compile ``f`` into ``fn(E, n, env)`` with ``E[i][j]`` meaning ``i E j``.

    ``env[i]`` holds the value of ``free[i]``; bound variables use the slots
    after them.  Returns the function and the env size it needs.
    """
    top = [len(free)]

    def comp(g, slots: dict[str, int]) -> Evaluator:
        if isinstance(g, Verum):
            return lambda E, n, env: True
        if isinstance(g, Falsum):
            return lambda E, n, env: False
        if isinstance(g, Member):
            a, b = _var_slot(g.left, slots), _var_slot(g.right, slots)
            return lambda E, n, env: E[env[a]][env[b]]
        if isinstance(g, Equal):
            a, b = _var_slot(g.left, slots), _var_slot(g.right, slots)
            return lambda E, n, env: env[a] == env[b]
        if isinstance(g, Mirimanoff):
            a = _var_slot(g.term, slots)
            return lambda E, n, env: _ill_founded(E, n, env[a])
        if isinstance(g, Not):
            h = comp(g.body, slots)
            return lambda E, n, env: not h(E, n, env)
        if isinstance(g, And):
            p, q = comp(g.left, slots), comp(g.right, slots)
            return lambda E, n, env: p(E, n, env) and q(E, n, env)
        if isinstance(g, Or):
            p, q = comp(g.left, slots), comp(g.right, slots)
            return lambda E, n, env: p(E, n, env) or q(E, n, env)
        if isinstance(g, Implies):
            p, q = comp(g.left, slots), comp(g.right, slots)
            return lambda E, n, env: (not p(E, n, env)) or q(E, n, env)
        if isinstance(g, (Exists, Forall)):
            k = top[0]
            top[0] += 1
            body = comp(g.body, {**slots, g.var: k})
            want = isinstance(g, Exists)

            def quant(E, n, env):
                for e in range(n):
                    env[k] = e
                    if body(E, n, env) == want:
                        return want
                return not want
            return quant
        raise TypeError(f"not a formula: {g!r}")

    fn = comp(f, {name: i for i, name in enumerate(free)})
    return fn, max(top[0], 1)


def evaluate(f, s: FiniteStructure, env: dict[str, int] | None = None) -> bool:
    """Truth of ``f`` in ``s`` under ``env`` (free variables to elements)."""
    env = dict(env or {})
    free = sorted(free_vars(f))
    missing = [v for v in free if v not in env]
    if missing:
        raise ValueError(f"free variables without assignment: {missing}")
    fn, size = compile_formula(f, free)
    values = [0] * max(size, 1)
    for i, v in enumerate(free):
        values[i] = env[v]
    return fn(s.matrix(), s.size, values)


def check_axiom(s: FiniteStructure, axiom) -> bool:
    """Evaluate a closed sentence in ``s``."""
    if free_vars(axiom):
        raise ValueError(f"axiom is not closed: free {sorted(free_vars(axiom))}")
    return evaluate(axiom, s)


def slim_check(s: FiniteStructure, subset) -> bool:
    """``|X| < |complement of X|`` at finite scale."""
    X = set(subset)
    if not X <= set(range(s.size)):
        raise ValueError("subset is not contained in the universe")
    return len(X) < s.size - len(X)


# --------------------------------------------------------------------------
# Search
# --------------------------------------------------------------------------

def relations(n: int) -> Iterator[int]:
    """All relation codes on n elements, ascending."""
    return iter(range(1 << (n * n)))


def extensional_relations(n: int) -> Iterator[int]:
    """Codes of extensional relations on n elements, ascending."""
    used: set[int] = set()

    def rec(j: int, acc: int) -> Iterator[int]:
        if j < 0:
            yield acc
            return
        for c in range(1 << n):
            if c in used:
                continue
            used.add(c)
            yield from rec(j - 1, acc | (c << (j * n)))
            used.discard(c)

    return rec(n - 1, 0)


def _matrix(n: int, code: int) -> tuple[tuple[bool, ...], ...]:
    return tuple(tuple(bool(code >> (j * n + i) & 1) for j in range(n)) for i in range(n))


def _designated(A) -> None:
    fv = free_vars(A)
    if fv - {"x"}:
        extra = sorted(fv - {"x"})
        if any(is_param(v) for v in extra):
            raise ValueError(f"unsubstituted parameters {extra}")
        raise ValueError(f"unexpected free variables {extra}")


def find_witness(A, n_max: int) -> tuple[FiniteStructure, int] | None:
    """First extensional structure (by size, then code) with an element
    ``c`` whose members are exactly ``{y : A(y)}``."""
    _designated(A)
    fn, size = compile_formula(A, ["x"])
    env = [0] * max(size, 1)
    for n in range(1, n_max + 1):
        full = (1 << n) - 1
        for code in extensional_relations(n):
            E = _matrix(n, code)
            ext = 0
            for y in range(n):
                env[0] = y
                if fn(E, n, env):
                    ext |= 1 << y
            for c in range(n):
                if (code >> (c * n)) & full == ext:
                    return FiniteStructure.from_code(n, code), c
    return None


def find_witness_exhaustive(A, n_max: int) -> tuple[FiniteStructure, int] | None:
    """Reference search over every relation code with no pruning."""
    _designated(A)
    for n in range(1, n_max + 1):
        for code in relations(n):
            s = FiniteStructure.from_code(n, code)
            if not s.is_extensional():
                continue
            for c in range(n):
                members = s.elements_of(c)
                if all((y in members) == evaluate(A, s, {"x": y}) for y in range(n)):
                    return s, c
    return None


@dataclass(frozen=True)
class SearchResult:
    structure: FiniteStructure | None
    env: dict[str, int] | None
    steps: int
    complete: bool  # True when the whole space up to n_max was searched

    @property
    def found(self) -> bool:
        return self.structure is not None


def satisfy(f, n_max: int, *, budget: int | None = None, extensional: bool = False) -> SearchResult:
    """Search structures of size 1..n_max and assignments making ``f`` true.

    One step is one structure examined (all assignments of the free
    variables are tried on it).  Stops early when ``budget`` steps are used.
    """
    free = sorted(free_vars(f))
    fn, size = compile_formula(f, free)
    env = [0] * max(size, 1)
    steps = 0
    for n in range(1, n_max + 1):
        codes = extensional_relations(n) if extensional else relations(n)
        for code in codes:
            if budget is not None and steps >= budget:
                return SearchResult(None, None, steps, False)
            steps += 1
            E = _matrix(n, code)
            for values in itertools.product(range(n), repeat=len(free)):
                env[: len(free)] = values
                if fn(E, n, env):
                    return SearchResult(
                        FiniteStructure.from_code(n, code), dict(zip(free, values)), steps, True
                    )
    return SearchResult(None, None, steps, True)


def _extensionality():
    from .formula import parse

    return parse("forall x1 . forall x2 . (forall x3 . (x3 in x1 -> x3 in x2) & (x3 in x2 -> x3 in x1)) -> x1 = x2")


EXTENSIONALITY = _extensionality()
