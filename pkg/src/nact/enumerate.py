"""Enumeration of set-constituting formulas (list1, list2, list3).

Formulas are built bottom-up in level form (binders named ``_<depth>``),
where alpha-equivalent formulas are literally equal, so deduplication is a
dictionary lookup on printed text.  ``pool(k, n)`` holds the simplified
formulas of length ``n`` whose free variables lie in the context
``x, b1..bp, _1.._k``.  Constructors:

* atoms ``u in v`` over the context (``u = v`` too when ``equality`` is set),
  and the constants ``T`` and ``F``;
* negation and binary conjunction, through the simplifier, so ``A & A``
  and ``not not A`` never appear as new formulas;
* ``exists _{k+1} . B`` for ``B`` in ``pool(k+1, n-1)``.  Under the default
  ``linked`` rule some top-level conjunct of ``B`` must be a membership
  literal between the new variable and an existing one; the ``general``
  rule only asks that the new variable occurs in ``B``.

The stream opens with the eight seed formulas in their traditional order
and then lists everything else by (length, bound variables, text).
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

from .formula import (
    FALSE, TRUE, And, Equal, Exists, Falsum, Forall, Implies, Member, Not, Or, Verum,
    bound_var_count, canonicalize, from_levels, length, make_and, make_not, parse,
    simplify, to_levels, to_text,
)
from .pathology import detect_prim_patho

__all__ = [
    "GenConfig", "GenState", "EnumerationLimitError", "StreamExhausted",
    "SEEDS", "enumerate_up_to", "list1_axiom_filter", "generable",
    "dump_stream", "load_stream",
]

MODES = ("GL1", "GL2", "GL3")
RULES = ("linked", "general")

SEEDS = (
    "T",
    "F",
    "x in x",
    "x notin x",
    "exists x1 . x1 in x",
    "exists x1 . x1 notin x",
    "exists x1 . x in x1",
    "exists x1 . x notin x1",
)


class EnumerationLimitError(RuntimeError):
    """The configured cap on the number of built formulas was exceeded."""


class StreamExhausted(StopIteration):
    """No formula within max-length is left."""


@dataclass(frozen=True)
class GenConfig:
    mode: str = "GL1"
    max_length: int = 6
    max_bound_vars: int = 2
    max_params: int = 0
    quantifier_rule: str = "linked"
    equality: bool = False
    max_count: int = 2_000_000

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"unknown generation mode {self.mode!r}")
        if self.mode != "GL3" and self.max_params:
            raise ValueError(f"{self.mode} does not allow parameters")
        if self.quantifier_rule not in RULES:
            raise ValueError(f"unknown quantifier rule {self.quantifier_rule!r}")
        if self.max_length < 1 or self.max_bound_vars < 0 or self.max_params < 0:
            raise ValueError("lengths and counts must be non-negative (max-length positive)")
        if self.max_count < 1:
            raise ValueError("max_count must be positive")

    @property
    def params(self) -> tuple[str, ...]:
        return tuple(f"b{i}" for i in range(1, self.max_params + 1))


def _context(config: GenConfig, k: int) -> list[str]:
    return ["x", *config.params] + [f"_{i}" for i in range(1, k + 1)]


def _conjuncts(f) -> list:
    if isinstance(f, And):
        return _conjuncts(f.left) + _conjuncts(f.right)
    return [f]


def _linked(body, var: str, ctx: Iterable[str]) -> bool:
    ctx = set(ctx)
    for g in _conjuncts(body):
        a = g.body if isinstance(g, Not) else g
        if isinstance(a, Member):
            if (a.left == var and a.right in ctx) or (a.right == var and a.left in ctx):
                return True
    return False


def _mentions(f, var: str) -> bool:
    if isinstance(f, (Member, Equal)):
        return var in (f.left, f.right)
    if isinstance(f, Not):
        return _mentions(f.body, var)
    if isinstance(f, And):
        return _mentions(f.left, var) or _mentions(f.right, var)
    if isinstance(f, Exists):
        return _mentions(f.body, var)
    return False


def _quantifier_ok(config: GenConfig, body, var: str, ctx: list[str]) -> bool:
    if config.quantifier_rule == "linked":
        return _linked(body, var, ctx)
    return _mentions(body, var)


def _rename_params(f, mapping: dict[str, str]):
    if isinstance(f, Member):
        return Member(mapping.get(f.left, f.left), mapping.get(f.right, f.right))
    if isinstance(f, Equal):
        return Equal(mapping.get(f.left, f.left), mapping.get(f.right, f.right))
    if isinstance(f, Not):
        return Not(_rename_params(f.body, mapping))
    if isinstance(f, And):
        return And(_rename_params(f.left, mapping), _rename_params(f.right, mapping))
    if isinstance(f, Exists):
        return Exists(f.var, _rename_params(f.body, mapping))
    return f


def _param_representative(f, names: tuple[str, ...]):
    """Least printed variant of ``f`` over permutations of the parameters."""
    if len(names) < 1:
        return f
    best, best_text = f, to_text(f)
    for perm in itertools.permutations(names):
        mapping = dict(zip(names, perm))
        g = simplify(_rename_params(f, mapping))
        t = to_text(g)
        if t < best_text:
            best, best_text = g, t
    return best


# operand kinds that the printer parenthesises inside a conjunction or negation
_WRAP_IN_AND = (Or, Implies, Exists, Forall)
_WRAP_IN_NOT = (And, Or, Implies, Exists, Forall)


class _Member:
    """A pool formula with its printed text, length and sorted conjuncts.

    ``conjuncts`` holds ``(text, text as a conjunct, formula)`` triples, so
    that a conjunction can be printed and deduplicated before it is built.
    """

    __slots__ = ("formula", "text", "size", "conjuncts")

    def __init__(self, formula, text: str, size: int, conjuncts=None) -> None:
        self.formula = formula
        self.text = text
        self.size = size
        if conjuncts is None:
            wrapped = f"({text})" if isinstance(formula, _WRAP_IN_AND) else text
            conjuncts = ((text, wrapped, formula),)
        self.conjuncts = conjuncts


class _Pools:
    """``pools[(k, n)]`` maps printed text to :class:`_Member`.

    Negations and conjunctions are formed the way :func:`make_not` and
    :func:`make_and` would form them; the results that cannot have length
    ``n`` (double negations, units, repeated conjuncts) are skipped early.
    """

    def __init__(self, config: GenConfig) -> None:
        self.config = config
        self.pools: dict[tuple[int, int], dict[str, _Member]] = {}
        self.built = 0
        self.total = 0

    def build_to(self, n_max: int) -> None:
        cfg = self.config
        K = cfg.max_bound_vars
        for n in range(self.built + 1, n_max + 1):
            for k in range(K, -1, -1):
                ctx = _context(cfg, k)
                pool: dict[str, _Member] = {}
                if n == 1:
                    atoms = [TRUE, FALSE]
                    for u in ctx:
                        for v in ctx:
                            atoms.append(Member(u, v))
                            if cfg.equality:
                                atoms.append(Equal(u, v))
                    for f in atoms:
                        pool.setdefault(to_text(f), _Member(f, to_text(f), 1))
                else:
                    for m in self.pools[(k, n - 1)].values():
                        f = m.formula
                        if isinstance(f, (Not, Verum, Falsum)):
                            continue
                        if isinstance(f, (Member, Equal)):
                            text = to_text(Not(f))
                        else:
                            text = "not " + (f"({m.text})" if isinstance(f, _WRAP_IN_NOT) else m.text)
                        if text not in pool:
                            pool[text] = _Member(Not(f), text, n)
                    for a in range(1, (n - 1) // 2 + 1):
                        right = [g for g in self.pools[(k, n - 1 - a)].values()
                                 if not isinstance(g.formula, (Verum, Falsum))]
                        for m in self.pools[(k, a)].values():
                            if isinstance(m.formula, (And, Verum, Falsum)):
                                continue
                            (item,) = m.conjuncts
                            for g in right:
                                if any(c[0] == m.text for c in g.conjuncts):
                                    continue
                                conj = tuple(sorted(g.conjuncts + (item,), key=lambda c: c[0]))
                                text = " & ".join(c[1] for c in conj)
                                if text in pool:
                                    continue
                                f = conj[0][2]
                                for c in conj[1:]:
                                    f = And(f, c[2])
                                pool[text] = _Member(f, text, n, conj)
                    if k < K:
                        y = f"_{k + 1}"
                        for m in self.pools[(k + 1, n - 1)].values():
                            if _quantifier_ok(cfg, m.formula, y, ctx):
                                text = f"exists {y} . {m.text}"
                                pool.setdefault(text, _Member(Exists(y, m.formula), text, n))
                self.pools[(k, n)] = pool
                self.total += len(pool)
                if self.total > cfg.max_count:
                    raise EnumerationLimitError(
                        f"more than {cfg.max_count} formulas built by length {n}"
                    )
            self.built = n

    def top(self, n: int) -> list:
        return [m.formula for m in self.pools[(0, n)].values()]


def _sort_key(f) -> tuple[int, int, str]:
    return (length(f), bound_var_count(f), to_text(f))


def _suppressed(config: GenConfig, f) -> bool:
    return config.mode in ("GL2", "GL3") and detect_prim_patho(f) is not None


class GenState:
    """Single-owner stream of canonical formulas for one configuration."""

    def __init__(self, config: GenConfig) -> None:
        self.config = config
        self._pools = _Pools(config)
        self.emitted: set[str] = set()
        self._queue: deque = deque()
        self._next_length = 1
        self._seeded = False
        self._seed_texts = set(SEEDS)

    def _candidates(self, n: int) -> list:
        cfg = self.config
        out = []
        for f in self._pools.top(n):
            if cfg.params and _param_representative(f, cfg.params) != f:
                continue
            g = from_levels(f)
            if not _suppressed(cfg, g):
                out.append(g)
        return out

    def _refill(self) -> bool:
        cfg = self.config
        if not self._seeded:
            self._seeded = True
            upto = min(3, cfg.max_length)
            self._pools.build_to(upto)
            available = {}
            for n in range(1, upto + 1):
                for g in self._candidates(n):
                    available[to_text(g)] = g
            for s in SEEDS:
                if s in available:
                    self._queue.append(available[s])
            if self._queue:
                return True
        while self._next_length <= cfg.max_length:
            n = self._next_length
            self._next_length += 1
            self._pools.build_to(n)
            fresh = [g for g in self._candidates(n) if to_text(g) not in self._seed_texts]
            fresh.sort(key=_sort_key)
            self._queue.extend(fresh)
            if fresh:
                return True
        return False

    def next(self):
        """The next formula; raises :class:`StreamExhausted` at the end."""
        while not self._queue:
            if not self._refill():
                raise StreamExhausted()
        f = self._queue.popleft()
        text = to_text(f)
        if text in self.emitted:  # pragma: no cover - guarded by construction
            raise AssertionError(f"duplicate emission {text}")
        self.emitted.add(text)
        return f

    def __iter__(self) -> Iterator:
        return self

    def __next__(self):
        return self.next()


def enumerate_up_to(config: GenConfig) -> list:
    """Materialise the whole stream up to ``config.max_length``."""
    return list(GenState(config))


def list1_axiom_filter(f) -> bool:
    """False iff ``f`` or its negation is primitively pathological."""
    if detect_prim_patho(f) is not None:
        return False
    return detect_prim_patho(canonicalize(Not(f))) is None


def generable(f, config: GenConfig) -> bool:
    """Whether ``f`` is reachable by the constructors, ignoring length limits.

    ``max_bound_vars`` is ignored as well; the mode filter and the parameter
    set are respected.
    """
    g = simplify(to_levels(f))
    if to_text(from_levels(g)) != to_text(canonicalize(f)):
        return False
    params = set(config.params)

    def ok(h, depth: int) -> bool:
        ctx = {"x"} | params | {f"_{i}" for i in range(1, depth + 1)}
        if isinstance(h, (Verum, Falsum)):
            return True
        if isinstance(h, Member):
            return h.left in ctx and h.right in ctx
        if isinstance(h, Equal):
            return config.equality and h.left in ctx and h.right in ctx
        if isinstance(h, Not):
            return make_not(h.body) == h and ok(h.body, depth)
        if isinstance(h, And):
            parts = _conjuncts(h)
            rebuilt = parts[0]
            for p in parts[1:]:
                rebuilt = make_and(rebuilt, p)
            return rebuilt == h and all(ok(p, depth) for p in parts)
        if isinstance(h, Exists):
            y = f"_{depth + 1}"
            return (h.var == y and ok(h.body, depth + 1)
                    and _quantifier_ok(config, h.body, y, sorted(ctx)))
        return False

    if not ok(g, 0):
        return False
    out = from_levels(g)
    if config.params and _param_representative(g, config.params) != g:
        return False
    return not _suppressed(config, out)


def dump_stream(formulas: Iterable, path: str | Path) -> int:
    """Write one canonical formula per line; returns the count."""
    lines = [to_text(f) for f in formulas]
    Path(path).write_text("".join(line + "\n" for line in lines))
    return len(lines)


def load_stream(path: str | Path) -> list:
    return [parse(line) for line in Path(path).read_text().splitlines() if line.strip()]
