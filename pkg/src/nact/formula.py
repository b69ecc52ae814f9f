"""Formula language over membership and equality.

Variables are plain strings.  ``x`` is the designated free variable of a
set-constituting formula, ``b1``, ``b2``, ... are parameters, and every other
name must be bound by a quantifier or a comprehension term.

Canonical form is computed in three passes:

1. every binder is renamed to ``_<depth>`` (its de Bruijn level), which is
   invariant under alpha-renaming;
2. the fixed simplification rules run bottom-up on that level form, and
   commutative operands are ordered by their printed level form;
3. binders are renamed ``x1``, ``x2``, ... in order of first occurrence.

The enumerator builds formulas directly in level form, so passes 1 and 2 are
public (:func:`to_levels`, :func:`simplify`, :func:`from_levels`).
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterator

__all__ = [
    "Verum", "Falsum", "Member", "Equal", "Not", "And", "Or", "Implies",
    "Exists", "Forall", "Mirimanoff", "Comprehension", "EmptySet",
    "Singleton", "Union", "Formula", "Term", "TRUE", "FALSE",
    "FormulaSyntaxError", "UnboundVariableError",
    "parse", "to_text", "canonicalize", "to_levels", "simplify",
    "from_levels", "expand_sugar", "length", "substitute", "free_vars",
    "bound_var_count", "params", "is_param", "has_sugar", "has_comprehension",
    "subformulas", "to_core", "alpha_equal", "neg", "conj",
]


# --------------------------------------------------------------------------
# AST
# --------------------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class Verum:
    pass


@dataclass(frozen=True, slots=True)
class Falsum:
    pass


@dataclass(frozen=True, slots=True)
class Comprehension:
    """``{v : body}`` (set operator) or ``{| v : body |}`` (class operator)."""

    var: str
    body: "Formula"
    is_class: bool = False


@dataclass(frozen=True, slots=True)
class EmptySet:
    pass


@dataclass(frozen=True, slots=True)
class Singleton:
    elem: "Term"


@dataclass(frozen=True, slots=True)
class Union:
    left: "Term"
    right: "Term"


Term = str | Comprehension | EmptySet | Singleton | Union


@dataclass(frozen=True, slots=True)
class Member:
    left: object
    right: object


@dataclass(frozen=True, slots=True)
class Equal:
    left: object
    right: object


@dataclass(frozen=True, slots=True)
class Mirimanoff:
    """Reserved marker ``M(t)``: t has an infinitely descending ∈-sequence.

    Not first-order expressible; recognised syntactically only.
    """

    term: object


@dataclass(frozen=True, slots=True)
class Not:
    body: "Formula"


@dataclass(frozen=True, slots=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True, slots=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True, slots=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True, slots=True)
class Exists:
    var: str
    body: "Formula"


@dataclass(frozen=True, slots=True)
class Forall:
    var: str
    body: "Formula"


Formula = Verum | Falsum | Member | Equal | Mirimanoff | Not | And | Or | Implies | Exists | Forall

TRUE = Verum()
FALSE = Falsum()

_ATOMS = (Verum, Falsum, Member, Equal, Mirimanoff)
_BINARY = (And, Or, Implies)
_QUANT = (Exists, Forall)
_SUGAR = (EmptySet, Singleton, Union)

_PARAM_RE = re.compile(r"b[1-9][0-9]*\Z")
_LEVEL_RE = re.compile(r"_[0-9]+\Z")


def is_param(name: str) -> bool:
    return isinstance(name, str) and _PARAM_RE.match(name) is not None


def neg(f):
    return Not(f)


def conj(*fs):
    """Left-nested conjunction; ``conj()`` is verum."""
    if not fs:
        return TRUE
    out = fs[0]
    for f in fs[1:]:
        out = And(out, f)
    return out


class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, pos: int, text: str = "") -> None:
        super().__init__(f"{message} at position {pos}")
        self.pos = pos
        self.text = text


class UnboundVariableError(ValueError):
    def __init__(self, name: str, pos: int | None = None) -> None:
        where = "" if pos is None else f" at position {pos}"
        super().__init__(f"unbound variable {name!r}{where}")
        self.name = name
        self.pos = pos


# --------------------------------------------------------------------------
# Parser
# --------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<sym>->|!=|\{\||\|\}|[{}()&|=:.])|(?P<word>[A-Za-z_][A-Za-z0-9_]*|0))"
)
_KEYWORDS = {"T", "F", "in", "notin", "not", "exists", "forall", "cup", "M"}


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos, text)
        tok = m.group("sym") or m.group("word")
        tokens.append((tok, m.start("sym") if m.group("sym") else m.start("word")))
        pos = m.end()
    tokens.append(("<end>", n))
    return tokens


class _Parser:
    def __init__(self, text: str, allow_free: bool) -> None:
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.allow_free = allow_free

    def peek(self, k: int = 0) -> str:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)][0]

    def pos(self) -> int:
        return self.tokens[self.i][1]

    def take(self, expected: str | None = None) -> str:
        tok = self.peek()
        if expected is not None and tok != expected:
            raise FormulaSyntaxError(f"expected {expected!r}, found {tok!r}", self.pos(), self.text)
        self.i += 1
        return tok

    def error(self, message: str):
        raise FormulaSyntaxError(message, self.pos(), self.text)

    # formula := implication
    def formula(self, scope: tuple[str, ...]):
        return self.implication(scope)

    def implication(self, scope):
        if self.peek() in ("exists", "forall"):
            return self.quantifier(scope)
        left = self.disjunction(scope)
        if self.peek() == "->":
            self.take()
            right = self.implication(scope)
            return Implies(left, right)
        return left

    def disjunction(self, scope):
        left = self.conjunction(scope)
        while self.peek() == "|":
            self.take()
            right = self.quantified_or(scope, self.conjunction)
            left = Or(left, right)
        return left

    def conjunction(self, scope):
        left = self.unary(scope)
        while self.peek() == "&":
            self.take()
            right = self.quantified_or(scope, self.unary)
            left = And(left, right)
        return left

    def quantified_or(self, scope, fallback):
        # a quantifier on the right of an operator extends maximally right
        if self.peek() in ("exists", "forall"):
            return self.quantifier(scope)
        return fallback(scope)

    def quantifier(self, scope):
        kind = self.take()
        var_pos = self.pos()
        var = self.take()
        if not _is_var_token(var):
            raise FormulaSyntaxError(f"expected a variable after {kind!r}, found {var!r}", var_pos, self.text)
        if is_param(var):
            raise FormulaSyntaxError(f"parameter {var!r} cannot be bound", var_pos, self.text)
        self.take(".")
        body = self.formula(scope + (var,))
        return Exists(var, body) if kind == "exists" else Forall(var, body)

    def unary(self, scope):
        tok = self.peek()
        if tok == "not":
            self.take()
            return Not(self.quantified_or(scope, self.unary))
        if tok == "(":
            # a parenthesised formula, or a parenthesised term starting an atom
            save = self.i
            self.take()
            try:
                inner = self.formula(scope)
                self.take(")")
            except FormulaSyntaxError:
                self.i = save
                return self.atom(scope)
            if self.peek() in ("in", "notin", "=", "!=", "cup"):
                self.i = save
                return self.atom(scope)
            return inner
        if tok in ("exists", "forall"):
            return self.quantifier(scope)
        return self.atom(scope)

    def atom(self, scope):
        tok = self.peek()
        if tok == "T":
            self.take()
            return TRUE
        if tok == "F":
            self.take()
            return FALSE
        if tok == "M" and self.peek(1) == "(":
            self.take()
            self.take("(")
            t = self.term(scope)
            self.take(")")
            return Mirimanoff(t)
        left = self.term(scope)
        op = self.peek()
        if op not in ("in", "notin", "=", "!="):
            self.error(f"expected a relation, found {op!r}")
        self.take()
        right = self.term(scope)
        if op == "in":
            return Member(left, right)
        if op == "notin":
            return Not(Member(left, right))
        if op == "=":
            return Equal(left, right)
        return Not(Equal(left, right))

    def term(self, scope):
        left = self.simple_term(scope)
        while self.peek() == "cup":
            self.take()
            left = Union(left, self.simple_term(scope))
        return left

    def simple_term(self, scope):
        tok = self.peek()
        pos = self.pos()
        if tok == "0":
            self.take()
            return EmptySet()
        if tok == "(":
            self.take()
            t = self.term(scope)
            self.take(")")
            return t
        if tok == "{|":
            self.take()
            var = self.take()
            if not _is_var_token(var) or is_param(var):
                raise FormulaSyntaxError(f"bad comprehension variable {var!r}", pos, self.text)
            self.take(":")
            body = self.formula(scope + (var,))
            self.take("|}")
            return Comprehension(var, body, is_class=True)
        if tok == "{":
            self.take()
            if _is_var_token(self.peek()) and self.peek(1) == ":":
                var = self.take()
                if is_param(var):
                    raise FormulaSyntaxError(f"bad comprehension variable {var!r}", pos, self.text)
                self.take(":")
                body = self.formula(scope + (var,))
                self.take("}")
                return Comprehension(var, body)
            elem = self.term(scope)
            self.take("}")
            return Singleton(elem)
        if _is_var_token(tok):
            self.take()
            if tok != "x" and not is_param(tok) and tok not in scope and not self.allow_free:
                raise UnboundVariableError(tok, pos)
            return tok
        self.error(f"expected a term, found {tok!r}")


def _is_var_token(tok: str) -> bool:
    return bool(tok) and (tok[0].isalpha() or tok[0] == "_") and tok not in _KEYWORDS and tok != "<end>"


def parse(text: str, *, allow_free: bool = False):
    """Parse formula text.

    Free variables other than ``x`` and parameters raise
    :class:`UnboundVariableError` unless ``allow_free`` is set.
    """
    p = _Parser(text, allow_free)
    f = p.formula(())
    if p.peek() != "<end>":
        p.error(f"unexpected trailing token {p.peek()!r}")
    return f


# --------------------------------------------------------------------------
# Printer
# --------------------------------------------------------------------------

# binding strength; quantifiers are loosest
_PREC_QUANT, _PREC_IMP, _PREC_OR, _PREC_AND, _PREC_NOT, _PREC_ATOM = range(6)


def _term_text(t) -> str:
    if isinstance(t, str):
        return t
    if isinstance(t, Comprehension):
        if t.is_class:
            return "{| " + t.var + " : " + to_text(t.body) + " |}"
        return "{" + t.var + " : " + to_text(t.body) + "}"
    if isinstance(t, EmptySet):
        return "0"
    if isinstance(t, Singleton):
        return "{" + _term_text(t.elem) + "}"
    if isinstance(t, Union):
        right = _term_text(t.right)
        if isinstance(t.right, Union):
            right = "(" + right + ")"
        return _term_text(t.left) + " cup " + right
    raise TypeError(f"not a term: {t!r}")


def _text(f) -> tuple[str, int]:
    if isinstance(f, Verum):
        return "T", _PREC_ATOM
    if isinstance(f, Falsum):
        return "F", _PREC_ATOM
    if isinstance(f, Member):
        return f"{_term_text(f.left)} in {_term_text(f.right)}", _PREC_ATOM
    if isinstance(f, Equal):
        return f"{_term_text(f.left)} = {_term_text(f.right)}", _PREC_ATOM
    if isinstance(f, Mirimanoff):
        return f"M({_term_text(f.term)})", _PREC_ATOM
    if isinstance(f, Not):
        b = f.body
        if isinstance(b, Member):
            return f"{_term_text(b.left)} notin {_term_text(b.right)}", _PREC_ATOM
        if isinstance(b, Equal):
            return f"{_term_text(b.left)} != {_term_text(b.right)}", _PREC_ATOM
        return "not " + _wrap(b, _PREC_NOT), _PREC_NOT
    if isinstance(f, And):
        return _wrap(f.left, _PREC_AND) + " & " + _wrap(f.right, _PREC_AND + 1), _PREC_AND
    if isinstance(f, Or):
        return _wrap(f.left, _PREC_OR) + " | " + _wrap(f.right, _PREC_OR + 1), _PREC_OR
    if isinstance(f, Implies):
        return _wrap(f.left, _PREC_IMP + 1) + " -> " + _wrap(f.right, _PREC_IMP), _PREC_IMP
    if isinstance(f, Exists):
        return f"exists {f.var} . " + to_text(f.body), _PREC_QUANT
    if isinstance(f, Forall):
        return f"forall {f.var} . " + to_text(f.body), _PREC_QUANT
    raise TypeError(f"not a formula: {f!r}")


def _wrap(f, need: int) -> str:
    s, prec = _text(f)
    # quantifiers are parenthesised whenever they are an operand
    if prec < need or prec == _PREC_QUANT:
        return "(" + s + ")"
    return s


def to_text(f) -> str:
    """Deterministic ASCII spelling.  Does not rename or simplify."""
    return _text(f)[0]


# --------------------------------------------------------------------------
# Structural helpers
# --------------------------------------------------------------------------

def _term_vars(t, bound: frozenset, out: set) -> None:
    if isinstance(t, str):
        if t not in bound:
            out.add(t)
    elif isinstance(t, Comprehension):
        _free(t.body, bound | {t.var}, out)
    elif isinstance(t, Singleton):
        _term_vars(t.elem, bound, out)
    elif isinstance(t, Union):
        _term_vars(t.left, bound, out)
        _term_vars(t.right, bound, out)


def _free(f, bound: frozenset, out: set) -> None:
    if isinstance(f, (Member, Equal)):
        _term_vars(f.left, bound, out)
        _term_vars(f.right, bound, out)
    elif isinstance(f, Mirimanoff):
        _term_vars(f.term, bound, out)
    elif isinstance(f, Not):
        _free(f.body, bound, out)
    elif isinstance(f, _BINARY):
        _free(f.left, bound, out)
        _free(f.right, bound, out)
    elif isinstance(f, _QUANT):
        _free(f.body, bound | {f.var}, out)


def free_vars(f) -> frozenset[str]:
    out: set[str] = set()
    _free(f, frozenset(), out)
    return frozenset(out)


def params(f) -> tuple[str, ...]:
    """Free parameters of ``f`` sorted by index."""
    return tuple(sorted((v for v in free_vars(f) if is_param(v)), key=lambda s: int(s[1:])))


def _all_names(f, out: set) -> None:
    if isinstance(f, (Member, Equal)):
        _term_names(f.left, out)
        _term_names(f.right, out)
    elif isinstance(f, Mirimanoff):
        _term_names(f.term, out)
    elif isinstance(f, Not):
        _all_names(f.body, out)
    elif isinstance(f, _BINARY):
        _all_names(f.left, out)
        _all_names(f.right, out)
    elif isinstance(f, _QUANT):
        out.add(f.var)
        _all_names(f.body, out)


def _term_names(t, out: set) -> None:
    if isinstance(t, str):
        out.add(t)
    elif isinstance(t, Comprehension):
        out.add(t.var)
        _all_names(t.body, out)
    elif isinstance(t, Singleton):
        _term_names(t.elem, out)
    elif isinstance(t, Union):
        _term_names(t.left, out)
        _term_names(t.right, out)


def _term_has(t, kinds) -> bool:
    if isinstance(t, kinds):
        return True
    if isinstance(t, Comprehension):
        return _has(t.body, kinds)
    if isinstance(t, Singleton):
        return _term_has(t.elem, kinds)
    if isinstance(t, Union):
        return _term_has(t.left, kinds) or _term_has(t.right, kinds)
    return False


def _has(f, kinds) -> bool:
    if isinstance(f, (Member, Equal)):
        return _term_has(f.left, kinds) or _term_has(f.right, kinds)
    if isinstance(f, Mirimanoff):
        return _term_has(f.term, kinds)
    if isinstance(f, Not):
        return _has(f.body, kinds)
    if isinstance(f, _BINARY):
        return _has(f.left, kinds) or _has(f.right, kinds)
    if isinstance(f, _QUANT):
        return _has(f.body, kinds)
    return False


def has_sugar(f) -> bool:
    return _has(f, _SUGAR)


def has_comprehension(f) -> bool:
    return _has(f, (Comprehension,))


def subformulas(f) -> Iterator:
    """Pre-order walk over subformula occurrences (terms are not entered)."""
    yield f
    if isinstance(f, Not):
        yield from subformulas(f.body)
    elif isinstance(f, _BINARY):
        yield from subformulas(f.left)
        yield from subformulas(f.right)
    elif isinstance(f, _QUANT):
        yield from subformulas(f.body)


def bound_var_count(f) -> int:
    """Number of binders (quantifiers and comprehension terms)."""
    n = 0
    if isinstance(f, (Member, Equal)):
        return _term_binders(f.left) + _term_binders(f.right)
    if isinstance(f, Mirimanoff):
        return _term_binders(f.term)
    if isinstance(f, Not):
        return bound_var_count(f.body)
    if isinstance(f, _BINARY):
        return bound_var_count(f.left) + bound_var_count(f.right)
    if isinstance(f, _QUANT):
        return 1 + bound_var_count(f.body)
    return n


def _term_binders(t) -> int:
    if isinstance(t, Comprehension):
        return 1 + bound_var_count(t.body)
    if isinstance(t, Singleton):
        return _term_binders(t.elem)
    if isinstance(t, Union):
        return _term_binders(t.left) + _term_binders(t.right)
    return 0


def length(f) -> int:
    """Node count: every atom, connective and quantifier counts one.

    Comprehension terms inside atoms contribute their body's node count, and
    each sugar constructor counts one, so that substituted formulas grow.
    """
    if isinstance(f, (Verum, Falsum)):
        return 1
    if isinstance(f, (Member, Equal)):
        return 1 + _term_length(f.left) + _term_length(f.right)
    if isinstance(f, Mirimanoff):
        return 1 + _term_length(f.term)
    if isinstance(f, Not):
        return 1 + length(f.body)
    if isinstance(f, _BINARY):
        return 1 + length(f.left) + length(f.right)
    if isinstance(f, _QUANT):
        return 1 + length(f.body)
    raise TypeError(f"not a formula: {f!r}")


def _term_length(t) -> int:
    if isinstance(t, str):
        return 0
    if isinstance(t, Comprehension):
        return length(t.body)
    if isinstance(t, EmptySet):
        return 1
    if isinstance(t, Singleton):
        return 1 + _term_length(t.elem)
    if isinstance(t, Union):
        return 1 + _term_length(t.left) + _term_length(t.right)
    raise TypeError(f"not a term: {t!r}")


# --------------------------------------------------------------------------
# Renaming
# --------------------------------------------------------------------------

def _rename_term(t, env: dict, depth: int):
    if isinstance(t, str):
        return env.get(t, t)
    if isinstance(t, Comprehension):
        name = f"_{depth + 1}"
        return Comprehension(name, _to_levels(t.body, {**env, t.var: name}, depth + 1), t.is_class)
    if isinstance(t, Singleton):
        return Singleton(_rename_term(t.elem, env, depth))
    if isinstance(t, Union):
        return Union(_rename_term(t.left, env, depth), _rename_term(t.right, env, depth))
    return t


def _to_levels(f, env: dict, depth: int):
    if isinstance(f, (Verum, Falsum)):
        return f
    if isinstance(f, Member):
        return Member(_rename_term(f.left, env, depth), _rename_term(f.right, env, depth))
    if isinstance(f, Equal):
        return Equal(_rename_term(f.left, env, depth), _rename_term(f.right, env, depth))
    if isinstance(f, Mirimanoff):
        return Mirimanoff(_rename_term(f.term, env, depth))
    if isinstance(f, Not):
        return Not(_to_levels(f.body, env, depth))
    if isinstance(f, _BINARY):
        return type(f)(_to_levels(f.left, env, depth), _to_levels(f.right, env, depth))
    if isinstance(f, _QUANT):
        name = f"_{depth + 1}"
        return type(f)(name, _to_levels(f.body, {**env, f.var: name}, depth + 1))
    raise TypeError(f"not a formula: {f!r}")


def to_levels(f):
    """Rename every binder to ``_<depth>``; alpha-equivalent inputs coincide."""
    return _to_levels(f, {}, 0)


def from_levels(f):
    """Rename level binders to ``x1, x2, ...`` by first occurrence (pre-order).

    Names already free in ``f`` are skipped.
    """
    taken = {v for v in free_vars(f)}
    counter = itertools.count(1)

    def fresh() -> str:
        while True:
            name = f"x{next(counter)}"
            if name not in taken:
                return name

    def term(t, env):
        if isinstance(t, str):
            return env.get(t, t)
        if isinstance(t, Comprehension):
            name = fresh()
            return Comprehension(name, walk(t.body, {**env, t.var: name}), t.is_class)
        if isinstance(t, Singleton):
            return Singleton(term(t.elem, env))
        if isinstance(t, Union):
            left = term(t.left, env)
            return Union(left, term(t.right, env))
        return t

    def walk(g, env):
        if isinstance(g, (Verum, Falsum)):
            return g
        if isinstance(g, Member):
            left = term(g.left, env)
            return Member(left, term(g.right, env))
        if isinstance(g, Equal):
            left = term(g.left, env)
            return Equal(left, term(g.right, env))
        if isinstance(g, Mirimanoff):
            return Mirimanoff(term(g.term, env))
        if isinstance(g, Not):
            return Not(walk(g.body, env))
        if isinstance(g, _BINARY):
            left = walk(g.left, env)
            return type(g)(left, walk(g.right, env))
        if isinstance(g, _QUANT):
            name = fresh()
            return type(g)(name, walk(g.body, {**env, g.var: name}))
        raise TypeError(f"not a formula: {g!r}")

    return walk(f, {})


# --------------------------------------------------------------------------
# Simplification
# --------------------------------------------------------------------------

def _simplify_term(t):
    if isinstance(t, Comprehension):
        return Comprehension(t.var, simplify(t.body), t.is_class)
    if isinstance(t, Singleton):
        return Singleton(_simplify_term(t.elem))
    if isinstance(t, Union):
        return Union(_simplify_term(t.left), _simplify_term(t.right))
    return t


def make_not(b):
    """Negation node with the simplification rules applied (``b`` simplified)."""
    if isinstance(b, Not):
        return b.body
    if isinstance(b, Verum):
        return FALSE
    if isinstance(b, Falsum):
        return TRUE
    return Not(b)


def _chain(f, kind) -> list:
    out = []
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, kind):
            stack.append(g.right)
            stack.append(g.left)
        else:
            out.append(g)
    return out


def _merge(a, b, kind, unit, zero, key=None):
    if isinstance(a, zero) or isinstance(b, zero):
        return a if isinstance(a, zero) else b
    key = key or to_text
    items = {}
    for g in _chain(a, kind) + _chain(b, kind):
        if not isinstance(g, unit):
            items.setdefault(key(g), g)
    if not items:
        return a if isinstance(a, unit) else b
    ordered = [items[k] for k in sorted(items)]
    out = ordered[0]
    for g in ordered[1:]:
        out = kind(out, g)
    return out


def make_and(a, b, key=None):
    """Conjunction with the simplification rules applied to simplified operands.

    Chains are flattened, unit and duplicate conjuncts dropped, and the rest
    sorted by printed text and re-nested to the left.  ``key`` may stand in
    for :func:`to_text` when the caller already knows the operands' texts.
    """
    return _merge(a, b, And, Verum, Falsum, key)


def make_or(a, b):
    return _merge(a, b, Or, Falsum, Verum)


def simplify(f):
    """Apply the fixed rule list bottom-up.

    Rules: double negation, negated constants, unit laws of ``&``/``|`` with
    T and F, idempotence ``A & A -> A`` and ``A | A -> A``, and ordering of
    ``&``/``|`` operands by printed text (chains are flattened first, so
    ordering covers associativity too).  Operand ordering is only
    name-independent when ``f`` is in level form.
    """
    if isinstance(f, (Verum, Falsum)):
        return f
    if isinstance(f, Member):
        return Member(_simplify_term(f.left), _simplify_term(f.right))
    if isinstance(f, Equal):
        return Equal(_simplify_term(f.left), _simplify_term(f.right))
    if isinstance(f, Mirimanoff):
        return Mirimanoff(_simplify_term(f.term))
    if isinstance(f, Not):
        return make_not(simplify(f.body))
    if isinstance(f, And):
        return make_and(simplify(f.left), simplify(f.right))
    if isinstance(f, Or):
        return make_or(simplify(f.left), simplify(f.right))
    if isinstance(f, Implies):
        return Implies(simplify(f.left), simplify(f.right))
    if isinstance(f, _QUANT):
        return type(f)(f.var, simplify(f.body))
    raise TypeError(f"not a formula: {f!r}")


def canonicalize(f):
    """Alpha-normalise and simplify; idempotent."""
    return from_levels(simplify(to_levels(f)))


def alpha_equal(f, g) -> bool:
    return to_levels(f) == to_levels(g)


# --------------------------------------------------------------------------
# Sugar expansion
# --------------------------------------------------------------------------

class _Fresh:
    def __init__(self, f) -> None:
        self.taken: set[str] = set()
        _all_names(f, self.taken)
        self.pool = itertools.chain(["z", "w", "u", "v"], (f"z{i}" for i in itertools.count(1)))

    def __call__(self) -> str:
        for name in self.pool:
            if name not in self.taken:
                self.taken.add(name)
                return name
        raise AssertionError("unreachable")


def _iff(a, b):
    return And(Implies(a, b), Implies(b, a))


def expand_sugar(f):
    """Eliminate ``0``, ``{t}`` and ``t cup s`` by their first-order definitions.

    ``s in v`` with ``s`` sugar becomes ``exists z . Def_s(z) & z in v``;
    membership in sugar unfolds directly (``u in {t}`` is ``u = t``,
    ``u in s cup t`` is ``u in s | u in t``, ``u in 0`` is F).
    ``Def_0(z)`` is ``forall w . w notin z``; otherwise ``Def_s(z)`` is
    coextensionality with the unfolded membership condition.
    """
    if not has_sugar(f):
        return f
    fresh = _Fresh(f)

    def defn(z: str, s):
        w = fresh()
        if isinstance(s, EmptySet):
            return Forall(w, Not(Member(w, z)))
        return Forall(w, _iff(Member(w, z), member(w, s)))

    def member(u, s):
        # u is a variable or comprehension; s arbitrary
        if isinstance(s, EmptySet):
            return FALSE
        if isinstance(s, Singleton):
            return equal(u, s.elem)
        if isinstance(s, Union):
            return Or(member(u, s.left), member(u, s.right))
        return Member(u, plain(s))

    def equal(u, s):
        if isinstance(s, _SUGAR):
            if isinstance(u, _SUGAR):
                z = fresh()
                return Exists(z, And(defn(z, u), defn(z, s)))
            return defn(u, s)
        if isinstance(u, _SUGAR):
            return defn(s, u)
        return Equal(u, plain(s))

    def plain(t):
        if isinstance(t, Comprehension):
            return Comprehension(t.var, walk(t.body), t.is_class)
        return t

    def atom_member(left, right):
        if isinstance(left, _SUGAR):
            z = fresh()
            return Exists(z, And(defn(z, left), member(z, right)))
        return member(plain(left), right)

    def walk(g):
        if isinstance(g, Member):
            return atom_member(g.left, g.right)
        if isinstance(g, Equal):
            return equal(g.left, g.right)
        if isinstance(g, Mirimanoff):
            if isinstance(g.term, _SUGAR):
                z = fresh()
                return Exists(z, And(defn(z, g.term), Mirimanoff(z)))
            return Mirimanoff(plain(g.term))
        if isinstance(g, Not):
            return Not(walk(g.body))
        if isinstance(g, _BINARY):
            return type(g)(walk(g.left), walk(g.right))
        if isinstance(g, _QUANT):
            return type(g)(g.var, walk(g.body))
        return g

    return walk(f)


# --------------------------------------------------------------------------
# Substitution and connective normalisation
# --------------------------------------------------------------------------

def _subst_term(t, name: str, value):
    if isinstance(t, str):
        return value if t == name else t
    if isinstance(t, Comprehension):
        if t.var == name:
            return t
        return Comprehension(t.var, _subst(t.body, name, value), t.is_class)
    if isinstance(t, Singleton):
        return Singleton(_subst_term(t.elem, name, value))
    if isinstance(t, Union):
        return Union(_subst_term(t.left, name, value), _subst_term(t.right, name, value))
    return t


def _subst(f, name: str, value):
    if isinstance(f, Member):
        return Member(_subst_term(f.left, name, value), _subst_term(f.right, name, value))
    if isinstance(f, Equal):
        return Equal(_subst_term(f.left, name, value), _subst_term(f.right, name, value))
    if isinstance(f, Mirimanoff):
        return Mirimanoff(_subst_term(f.term, name, value))
    if isinstance(f, Not):
        return Not(_subst(f.body, name, value))
    if isinstance(f, _BINARY):
        return type(f)(_subst(f.left, name, value), _subst(f.right, name, value))
    if isinstance(f, _QUANT):
        if f.var == name:
            return f
        return type(f)(f.var, _subst(f.body, name, value))
    return f


def substitute(f, param: str, term):
    """Replace the free parameter ``param`` by a closed term and re-canonicalise.

    ``term`` must be closed, so no capture can occur.  A formula that does
    not mention ``param`` comes back canonicalised but otherwise unchanged.
    """
    if not is_param(param):
        raise ValueError(f"unknown parameter {param!r}")
    if not isinstance(term, str):
        leaked = _term_free(term)
        if leaked:
            raise ValueError(f"substituted term is not closed: free {sorted(leaked)}")
    return canonicalize(_subst(f, param, term))


def rename_free(f, old: str, new: str):
    """Rename a free variable (``new`` must not be bound in ``f``)."""
    return _subst(f, old, new)


def _term_free(t) -> set[str]:
    out: set[str] = set()
    _term_vars(t, frozenset(), out)
    return out


def to_core(f):
    """Rewrite into the enumerator's connectives ``not``, ``&``, ``exists``."""
    if isinstance(f, (Verum, Falsum, Member, Equal, Mirimanoff)):
        return f
    if isinstance(f, Not):
        return Not(to_core(f.body))
    if isinstance(f, And):
        return And(to_core(f.left), to_core(f.right))
    if isinstance(f, Or):
        return Not(And(Not(to_core(f.left)), Not(to_core(f.right))))
    if isinstance(f, Implies):
        return Not(And(to_core(f.left), Not(to_core(f.right))))
    if isinstance(f, Exists):
        return Exists(f.var, to_core(f.body))
    if isinstance(f, Forall):
        return Not(Exists(f.var, Not(to_core(f.body))))
    raise TypeError(f"not a formula: {f!r}")
