"""Catalog of named axioms and principles.

Entries are fixed at import time.  Schemata with a class slot carry a
template in the formula grammar where ``@X`` stands for ``{| x : A |}``,
``@NX`` for ``{| x : not A |}`` and ``@A[y]`` for ``A(y)``; :func:`instantiate` fills the slot and
:func:`unfold_classes` removes class terms so the result can be evaluated on
finite structures.  Statements that need cardinalities or infinite sets are
kept as text with ``second_order`` set.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

from .formula import (
    And, Comprehension, Equal, Exists, Forall, Implies, Member, Mirimanoff, Not,
    Or, canonicalize, expand_sugar, free_vars, parse, rename_free, to_text,
)
from .models import FiniteStructure, compile_formula, evaluate, slim_check
from .stratify import is_nfum_closed_eligible

__all__ = [
    "AxiomSchema", "CATALOG", "emit_zfc4", "emit_nfum_closed_axiom", "catalog_lookup",
    "instantiate", "unfold_classes", "set_formula", "export_catalog", "catalog_json",
    "check_schema_on_structure", "UnknownAxiomError",
]


class UnknownAxiomError(KeyError):
    pass


@dataclass(frozen=True)
class AxiomSchema:
    name: str
    statement: str
    provenance: str
    formula: str | None = None  # closed formula or template in the grammar
    slot: bool = False  # template with the class slot @X
    requires_smallness: bool = False
    second_order: bool = False  # not evaluable on finite structures
    opaque: bool = False
    flag: bool = False  # policy flag, no operational content
    note: str = ""

    def parsed(self):
        if self.formula is None or self.slot:
            raise ValueError(f"{self.name} has no closed first-order rendering")
        return parse(self.formula)

    def to_dict(self) -> dict:
        return asdict(self)


# Set(X) as a first-order statement about the class X
_SET = "(exists x1 . forall x2 . (x2 in x1 -> x2 in {X}) & (x2 in {X} -> x2 in x1))"

_OMEGA = "forall x1 . (0 in x1 & (forall x2 . x2 in x1 -> x2 cup {x2} in x1)) -> x in x1"

_EXT = "forall x1 . forall x2 . (forall x3 . (x3 in x1 -> x3 in x2) & (x3 in x2 -> x3 in x1)) -> x1 = x2"

_ZFC4 = (
    AxiomSchema("ZFC1", "Class operator: {| x : A |} denotes a class for every formula A",
                "NACT+4 basic axiom 1", second_order=True),
    AxiomSchema("ZFC2", "Church schema: y in {| x : A |} <-> A(y)",
                "NACT+4 basic axiom 2",
                "forall y . (y in @X -> @A[y]) & (@A[y] -> y in @X)", slot=True),
    AxiomSchema("ZFC3", "Extensionality", "NACT+4 basic axiom 3", _EXT),
    AxiomSchema("ZFC4", "A weak form of choice (form unspecified)", "NACT+4 basic axiom 4",
                opaque=True),
    AxiomSchema("ZFC5a", "Disjunctive sets: Set(X) or Set(not X)", "NACT+4 basic axiom 5a",
                _SET.replace("{X}", "@X") + " | " + _SET.replace("{X}", "@NX"), slot=True),
    AxiomSchema("ZFC6c", "Ordering: Small(X) -> Set(X) & Set(not X)", "NACT+4 basic axiom 6c",
                slot=True, requires_smallness=True,
                note="Small is instantiated by Slim(X) := |X| < |not X|"),
    AxiomSchema("ZFC7#", "Small(omega0)", "NACT+4 ZF-axiom 7#", _OMEGA,
                requires_smallness=True, second_order=True,
                note="the formula is the sugar definition of omega0; omega0 is not finite"),
    AxiomSchema("ZFC8#", "Small(X) -> Small(Power(X))", "NACT+4 ZF-axiom 8#",
                requires_smallness=True, second_order=True),
    AxiomSchema("ZFC9#", "Small(X) & (forall y in X . Small(y)) -> Small(Union X), large union",
                "NACT+4 ZF-axiom 9#", requires_smallness=True, second_order=True),
    AxiomSchema("ZFC10#", "Small(X) & Function(F) -> Small(F[X])", "NACT+4 ZF-axiom 10#",
                requires_smallness=True, second_order=True),
)

_OTHERS = (
    AxiomSchema("J1", "New sets are generated independently of already existing sets",
                "principle J1", flag=True,
                note="operational form: CT-frame verdicts ignore the ledger"),
    AxiomSchema("J2", "Small(X) -> Set(X) & Set(not X)", "principle J2", slot=True,
                requires_smallness=True, note="Small is Slim: slim(X) := card(X) < card(not X)"),
    AxiomSchema("J3", "Set({x : A}) or Set({x : not A})", "principle J3 (1PT)",
                _SET.replace("{X}", "@X") + " | " + _SET.replace("{X}", "@NX"), slot=True),
    AxiomSchema("J4", "Stratified(A) & free(A) = {x} -> Set({x : A})", "principle J4",
                note="see emit_nfum_closed_axiom"),
    AxiomSchema("Slim", "slim(X) := |X| < |not X|", "smallness predicate of NACT+4",
                second_order=True, note="finite scale: models.slim_check"),
    AxiomSchema("GCH", "|X| = aleph_a -> |P(X)| = aleph_(a+1)", "cardinality policy GCH",
                second_order=True, flag=True),
    AxiomSchema("FCA", "|X| <= omega0", "finite or countable anti-thesis FCA",
                second_order=True, flag=True),
    AxiomSchema("AC-small", "choice restricted to small sets", "choice policy AC-small",
                opaque=True, flag=True),
    AxiomSchema("V=not0", "V = not 0: the universal set is the complement of the empty set",
                "derived example of NACT+4",
                "forall x1 . (x1 = x1 -> x1 notin 0) & (x1 notin 0 -> x1 = x1)"),
    AxiomSchema("omega0", "omega0 as a genuine infinite set", "unhoused symbol",
                second_order=True, opaque=True),
    AxiomSchema("tau0", "Tarski's inaccessible number", "unhoused symbol",
                second_order=True, opaque=True),
    AxiomSchema("Ord", "the class of ordinals and its measure", "unhoused symbol",
                second_order=True, opaque=True),
    AxiomSchema("AC(x)", "x satisfies the axiom of choice", "unhoused symbol",
                second_order=True, opaque=True),
)

CATALOG: dict[str, AxiomSchema] = {s.name: s for s in _ZFC4 + _OTHERS}


def emit_zfc4() -> list[AxiomSchema]:
    return list(_ZFC4)


def catalog_lookup(name: str) -> AxiomSchema:
    try:
        return CATALOG[name]
    except KeyError:
        raise UnknownAxiomError(name) from None


def set_formula(A):
    """``Set({x : A})`` as a closed first-order formula (A must have only x free)."""
    return canonicalize(Exists("z", Forall("y", And(
        Implies(Member("y", "z"), rename_free(A, "x", "y")),
        Implies(rename_free(A, "x", "y"), Member("y", "z")),
    ))))


def emit_nfum_closed_axiom(A) -> AxiomSchema | None:
    """The comprehension axiom of A when A is stratified and closed in x."""
    if not is_nfum_closed_eligible(A):
        return None
    text = to_text(A)
    return AxiomSchema(
        f"NFUM-closed[{text}]", f"Set({{x : {text}}})", "principle J4 instance",
        to_text(set_formula(A)),
    )


def instantiate(schema: AxiomSchema, A):
    """Fill the class slot of ``schema`` with ``{| x : A |}``."""
    if not schema.slot or schema.formula is None:
        raise ValueError(f"{schema.name} has no first-order template")
    if free_vars(A) - {"x"}:
        raise ValueError("slot formula must have x as its only free variable")
    body = to_text(A)
    text = schema.formula.replace("@A[y]", f"({to_text(rename_free(A, 'x', 'y'))})")
    text = text.replace("@NX", f"{{| x : not ({body}) |}}").replace("@X", f"{{| x : {body} |}}")
    return parse(text)


def unfold_classes(f):
    """Replace ``u in {| v : B |}`` by ``B(u)`` everywhere."""
    if isinstance(f, Member) and isinstance(f.right, Comprehension) and f.right.is_class:
        if not isinstance(f.left, str):
            raise ValueError("class term to the left of a class term")
        return unfold_classes(rename_free(f.right.body, f.right.var, f.left))
    if isinstance(f, (Member, Equal, Mirimanoff)):
        return f
    if isinstance(f, Not):
        return Not(unfold_classes(f.body))
    if isinstance(f, (And, Or, Implies)):
        return type(f)(unfold_classes(f.left), unfold_classes(f.right))
    if isinstance(f, (Exists, Forall)):
        return type(f)(f.var, unfold_classes(f.body))
    return f


def check_schema_on_structure(schema: AxiomSchema, A, s: FiniteStructure) -> bool:
    """Evaluate a slot schema for ``{| x : A |}`` on a finite structure.

    Smallness is read as finite slimness of the extension of A.
    """
    if schema.name in ("ZFC6c", "J2"):
        fn, size = compile_formula(A, ["x"])
        env = [0] * max(size, 1)
        E = s.matrix()
        ext = set()
        for y in range(s.size):
            env[0] = y
            if fn(E, s.size, env):
                ext.add(y)
        if not slim_check(s, ext):
            return True
        both = And(set_formula(A), set_formula(Not(A)))
        return evaluate(expand_sugar(both), s)
    return evaluate(expand_sugar(unfold_classes(instantiate(schema, A))), s)


def catalog_json() -> str:
    data = {name: CATALOG[name].to_dict() for name in sorted(CATALOG)}
    return json.dumps(data, sort_keys=True, indent=1) + "\n"


def export_catalog(path: str | Path, names: list[str] | None = None) -> None:
    if names is None:
        Path(path).write_text(catalog_json())
        return
    data = {n: catalog_lookup(n).to_dict() for n in names}
    Path(path).write_text(json.dumps(data, sort_keys=True, indent=1) + "\n")
