from __future__ import annotations

from hypothesis import strategies as st

from nact.formula import (
    FALSE, TRUE, And, Equal, Exists, Forall, Implies, Member, Not, Or,
)

BINDERS = ("y", "z", "x1", "x2", "x7")


@st.composite
def formulas(draw, depth: int = 3, scope: tuple[str, ...] = ("x",), equality: bool = True,
             connectives: tuple[str, ...] = ("not", "and", "or", "implies", "exists", "forall")):
    """Well-scoped formulas whose free variables lie in ``scope``."""
    if depth <= 0 or draw(st.integers(0, 3)) == 0:
        kind = draw(st.sampled_from(("T", "F", "in", "in", "in", "=") if equality
                                    else ("T", "F", "in", "in")))
        if kind == "T":
            return TRUE
        if kind == "F":
            return FALSE
        u = draw(st.sampled_from(scope))
        v = draw(st.sampled_from(scope))
        return Member(u, v) if kind == "in" else Equal(u, v)
    kind = draw(st.sampled_from(connectives))
    sub = lambda sc=scope: formulas(depth - 1, sc, equality, connectives)  # noqa: E731
    if kind == "not":
        return Not(draw(sub()))
    if kind in ("and", "or", "implies"):
        cls = {"and": And, "or": Or, "implies": Implies}[kind]
        return cls(draw(sub()), draw(sub()))
    var = draw(st.sampled_from(BINDERS))
    cls = Exists if kind == "exists" else Forall
    inner = scope if var in scope else scope + (var,)
    return cls(var, draw(sub(inner)))


def core_formulas(depth: int = 3, equality: bool = True):
    """Formulas over the enumerator's connectives (not, and, exists)."""
    return formulas(depth, ("x",), equality, ("not", "and", "exists"))


def rename_bound(f, names, env=None):
    """Alpha-rename binders, drawing fresh names from the iterator ``names``."""
    env = env or {}
    if isinstance(f, (Member, Equal)):
        return type(f)(env.get(f.left, f.left), env.get(f.right, f.right))
    if isinstance(f, Not):
        return Not(rename_bound(f.body, names, env))
    if isinstance(f, (And, Or, Implies)):
        return type(f)(rename_bound(f.left, names, env), rename_bound(f.right, names, env))
    if isinstance(f, (Exists, Forall)):
        new = next(names)
        return type(f)(new, rename_bound(f.body, names, {**env, f.var: new}))
    return f
