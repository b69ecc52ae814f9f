"""Stratification of formulas (NF-style type levels).

Each membership atom ``u in v`` demands ``level(v) = level(u) + 1`` and each
equality atom demands equal levels.  The constraints form a weighted graph;
the formula is stratified iff no cycle has nonzero total weight.  Levels are
propagated along a BFS spanning forest; a conflicting non-tree edge closes a
cycle through the forest, which is returned as the witness.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .formula import (
    And, Comprehension, EmptySet, Equal, Exists, Forall, Implies, Member,
    Mirimanoff, Not, Or, Singleton, Union, free_vars, is_param,
)

__all__ = ["Atom", "StratResult", "StratificationError", "stratify", "constraints",
           "is_nfum_closed_eligible"]


class StratificationError(ValueError):
    """Raised for inputs outside the stratifier's language (sugar, comprehension)."""


@dataclass(frozen=True)
class Atom:
    """A level constraint ``level(right) - level(left) = weight``."""

    kind: str  # "in" or "="
    left: str
    right: str

    @property
    def weight(self) -> int:
        return 1 if self.kind == "in" else 0

    def __str__(self) -> str:
        return f"{self.left} {self.kind} {self.right}"


@dataclass(frozen=True)
class StratResult:
    stratified: bool
    levels: dict[str, int] | None = None
    # cycle as (atom, direction) pairs; direction +1 walks left->right
    cycle: tuple[tuple[Atom, int], ...] | None = None
    atoms: tuple[Atom, ...] = field(default=(), repr=False)

    def __bool__(self) -> bool:
        return self.stratified

    def cycle_weight(self) -> int:
        if not self.cycle:
            return 0
        return sum(a.weight * d for a, d in self.cycle)


def _check_term(t) -> str:
    if isinstance(t, str):
        return t
    if isinstance(t, Comprehension):
        raise StratificationError("comprehension subterm present")
    if isinstance(t, (EmptySet, Singleton, Union)):
        raise StratificationError("sugar present; expand it first")
    raise TypeError(f"not a term: {t!r}")


def constraints(f) -> tuple[list[Atom], list[str]]:
    """Atoms and variables of ``f`` after giving every binder a unique name.

    Returns ``(atoms, variables)`` with variables in first-occurrence order.
    Unique renaming makes shadowed binders distinct.
    """
    atoms: list[Atom] = []
    variables: dict[str, None] = {}
    counter = [0]

    def note(name: str) -> None:
        variables.setdefault(name, None)

    def walk(g, env: dict[str, str]) -> None:
        if isinstance(g, (Member, Equal)):
            left = _check_term(g.left)
            right = _check_term(g.right)
            left, right = env.get(left, left), env.get(right, right)
            note(left)
            note(right)
            atoms.append(Atom("in" if isinstance(g, Member) else "=", left, right))
        elif isinstance(g, Mirimanoff):
            # opaque marker: no level constraint
            name = _check_term(g.term)
            note(env.get(name, name))
        elif isinstance(g, Not):
            walk(g.body, env)
        elif isinstance(g, (And, Or, Implies)):
            walk(g.left, env)
            walk(g.right, env)
        elif isinstance(g, (Exists, Forall)):
            counter[0] += 1
            fresh = f"{g.var}#{counter[0]}"
            note(fresh)
            walk(g.body, {**env, g.var: fresh})

    walk(f, {})
    return atoms, list(variables)


def _display(name: str) -> str:
    return name.split("#", 1)[0]


def stratify(f) -> StratResult:
    """Decide stratification; return minimal levels or a nonzero-weight cycle.

    Levels are keyed by variable name.  Binders that share a name (possible
    only in non-canonical input) are reported under the name of the last one
    visited; canonical formulas never share binder names.
    """
    atoms, variables = constraints(f)
    adj: dict[str, list[tuple[str, int, int]]] = {v: [] for v in variables}
    for i, a in enumerate(atoms):
        adj[a.left].append((a.right, a.weight, i))
        adj[a.right].append((a.left, -a.weight, i))

    level: dict[str, int] = {}
    parent: dict[str, tuple[str, int] | None] = {}
    components: list[list[str]] = []
    for root in variables:
        if root in level:
            continue
        level[root] = 0
        parent[root] = None
        comp = [root]
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for v, w, i in adj[u]:
                if v not in level:
                    level[v] = level[u] + w
                    parent[v] = (u, i)
                    comp.append(v)
                    queue.append(v)
                elif level[v] != level[u] + w:
                    cycle = _cycle(u, v, i, parent, atoms)
                    return StratResult(False, cycle=cycle, atoms=tuple(atoms))
        components.append(comp)

    out: dict[str, int] = {}
    for comp in components:
        low = min(level[v] for v in comp)
        for v in comp:
            out[_display(v)] = level[v] - low
    return StratResult(True, levels=out, atoms=tuple(atoms))


def _path_to_root(v, parent) -> list[str]:
    path = [v]
    while parent[path[-1]] is not None:
        path.append(parent[path[-1]][0])
    return path


def _cycle(u: str, v: str, edge: int, parent, atoms) -> tuple[tuple[Atom, int], ...]:
    """Cycle u -> v (via ``edge``) -> ... tree ... -> u."""
    pu = _path_to_root(u, parent)
    pv = _path_to_root(v, parent)
    on_pu = set(pu)
    lca = next(w for w in pv if w in on_pu)

    def step(a_from: str, atom_index: int) -> tuple[Atom, int]:
        a = atoms[atom_index]
        direction = 1 if a.left == a_from else -1
        if a.left == a.right:
            direction = 1
        return _rename(a), direction

    steps = []
    a = atoms[edge]
    if a.left == a.right:
        steps.append((_rename(a), 1))
    else:
        steps.append((_rename(a), 1 if a.left == u else -1))
    # v up to lca
    w = v
    while w != lca:
        p, i = parent[w]
        steps.append(step(w, i))
        w = p
    # lca down to u: walk u up to lca then reverse the steps
    down = []
    w = u
    while w != lca:
        p, i = parent[w]
        down.append(step(p, i))
        w = p
    steps.extend(reversed(down))
    return tuple(steps)


def _rename(a: Atom) -> Atom:
    return Atom(a.kind, _display(a.left), _display(a.right))


def is_nfum_closed_eligible(f) -> bool:
    """Stratified and closed except for the designated variable ``x``."""
    fv = free_vars(f)
    if fv != {"x"} or any(is_param(v) for v in fv):
        return False
    try:
        return stratify(f).stratified
    except StratificationError:
        return False
