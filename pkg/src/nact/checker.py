"""Independent replay of resolution proof traces.

Deliberately shares no code with :mod:`nact.prover`: clauses are re-parsed
from their text, and unification, substitution and subsumption are
implemented again here.

A trace is a JSON-lines file, one record per inference::

    {"index": 3, "rule": "resolve", "premises": [1, 2], "literals": [0, 0],
     "clause": "$false"}

``input`` records are accepted as given (their provenance is the theory).
``factor`` and ``resolve`` records are recomputed from their premises; the
recorded clause must be subsumed by the recomputed one, which makes it a
logical consequence.  The trace must end in the empty clause.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

__all__ = ["TraceCheck", "TraceParseError", "check_records", "check_trace_file", "parse_clause"]


class TraceParseError(ValueError):
    pass


@dataclass(frozen=True)
class TraceCheck:
    valid: bool
    failed_step: int | None = None
    reason: str = ""

    def __str__(self) -> str:
        if self.valid:
            return "valid"
        return f"invalid({self.failed_step}): {self.reason}"


# terms: ("v", name) for variables, ("f", name, args) for functions/constants

_TOKEN = re.compile(r"\s*(~|\(|\)|,|\||[A-Za-z_$][A-Za-z0-9_]*)")


def _tokens(text: str) -> list[str]:
    out, pos = [], 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise TraceParseError(f"bad clause text at {pos}: {text!r}")
        out.append(m.group(1))
        pos = m.end()
    return out


def parse_clause(text: str) -> list[tuple]:
    toks = _tokens(text)
    if toks == ["$false"]:
        return []
    pos = 0

    def term():
        nonlocal pos
        name = toks[pos]
        pos += 1
        if name[0].isupper():
            return ("v", name)
        args = []
        if pos < len(toks) and toks[pos] == "(":
            pos += 1
            args.append(term())
            while toks[pos] == ",":
                pos += 1
                args.append(term())
            if toks[pos] != ")":
                raise TraceParseError(f"expected ')' in {text!r}")
            pos += 1
        return ("f", name, tuple(args))

    lits = []
    while True:
        sign = True
        if toks[pos] == "~":
            sign = False
            pos += 1
        atom = term()
        if atom[0] != "f" or not atom[2]:
            raise TraceParseError(f"bad literal in {text!r}")
        lits.append((sign, atom[1], atom[2]))
        if pos == len(toks):
            return lits
        if toks[pos] != "|":
            raise TraceParseError(f"expected '|' in {text!r}")
        pos += 1


def _resolve_var(t, sub):
    while t[0] == "v" and t[1] in sub:
        t = sub[t[1]]
    return t


def _occurs(name, t, sub) -> bool:
    t = _resolve_var(t, sub)
    if t[0] == "v":
        return t[1] == name
    return any(_occurs(name, a, sub) for a in t[2])


def _unify(a, b, sub):
    sub = dict(sub)
    work = [(a, b)]
    while work:
        s, t = work.pop()
        s, t = _resolve_var(s, sub), _resolve_var(t, sub)
        if s == t:
            continue
        if s[0] == "v":
            if _occurs(s[1], t, sub):
                return None
            sub[s[1]] = t
        elif t[0] == "v":
            if _occurs(t[1], s, sub):
                return None
            sub[t[1]] = s
        elif s[1] != t[1] or len(s[2]) != len(t[2]):
            return None
        else:
            work.extend(zip(s[2], t[2]))
    return sub


def _apply(t, sub):
    t = _resolve_var(t, sub)
    if t[0] == "v":
        return t
    return ("f", t[1], tuple(_apply(a, sub) for a in t[2]))


def _apply_lit(lit, sub):
    return (lit[0], lit[1], tuple(_apply(a, sub) for a in lit[2]))


def _prime(t):
    if t[0] == "v":
        return ("v", t[1] + "'")
    return ("f", t[1], tuple(_prime(a) for a in t[2]))


def _instance_of(pattern, target, sub):
    """Extend ``sub`` so that pattern under sub equals target, or None."""
    sub = dict(sub)
    work = [(pattern, target)]
    while work:
        p, t = work.pop()
        if p[0] == "v":
            bound = sub.get(p[1])
            if bound is None:
                sub[p[1]] = t
            elif bound != t:
                return None
        elif t[0] == "v" or p[1] != t[1] or len(p[2]) != len(t[2]):
            return None
        else:
            work.extend(zip(p[2], t[2]))
    return sub


def _subsumes(general: list, specific: list) -> bool:
    def search(k, sub):
        if k == len(general):
            return True
        g = general[k]
        for lit in specific:
            if lit[0] != g[0] or lit[1] != g[1] or len(lit[2]) != len(g[2]):
                continue
            nxt = sub
            for pa, ta in zip(g[2], lit[2]):
                nxt = _instance_of(pa, ta, nxt)
                if nxt is None:
                    break
            if nxt is not None and search(k + 1, nxt):
                return True
        return False

    return search(0, {})


def _atom_unifier(a, b):
    if a[1] != b[1] or len(a[2]) != len(b[2]):
        return None
    sub = {}
    for s, t in zip(a[2], b[2]):
        sub = _unify(s, t, sub)
        if sub is None:
            return None
    return sub


def _dedup(lits):
    out = []
    for lit in lits:
        if lit not in out:
            out.append(lit)
    return out


def _replay(rec: dict, clauses: dict[int, list]) -> tuple[list | None, str]:
    rule = rec.get("rule")
    prem = rec.get("premises", [])
    lits = rec.get("literals", [])
    for p in prem:
        if not isinstance(p, int) or p not in clauses:
            return None, f"premise {p} does not refer to an earlier step"
    if rule == "factor":
        if len(prem) != 1 or len(lits) != 2:
            return None, "factor needs one premise and two literal indices"
        c = clauses[prem[0]]
        i, j = lits
        if not (0 <= i < len(c) and 0 <= j < len(c)) or i == j:
            return None, "literal index out of range"
        if c[i][0] != c[j][0]:
            return None, "factored literals differ in sign"
        sub = _atom_unifier(c[i], c[j])
        if sub is None:
            return None, "factored literals do not unify"
        return _dedup([_apply_lit(l, sub) for k, l in enumerate(c) if k != j]), ""
    if rule == "resolve":
        if len(prem) != 2 or len(lits) != 2:
            return None, "resolve needs two premises and two literal indices"
        c1 = clauses[prem[0]]
        c2 = [(l[0], l[1], tuple(_prime(a) for a in l[2])) for l in clauses[prem[1]]]
        i, j = lits
        if not (0 <= i < len(c1) and 0 <= j < len(c2)):
            return None, "literal index out of range"
        if c1[i][0] == c2[j][0]:
            return None, "resolved literals have the same sign"
        sub = _atom_unifier(c1[i], c2[j])
        if sub is None:
            return None, "resolved literals do not unify"
        rest = [l for k, l in enumerate(c1) if k != i] + [l for k, l in enumerate(c2) if k != j]
        return _dedup([_apply_lit(l, sub) for l in rest]), ""
    return None, f"unknown rule {rule!r}"


def check_records(records: list[dict]) -> TraceCheck:
    """Replay parsed trace records; report the first bad step."""
    if not records:
        return TraceCheck(False, 0, "empty trace")
    clauses: dict[int, list] = {}
    for pos, rec in enumerate(records):
        idx = rec.get("index", pos)
        if idx != pos:
            return TraceCheck(False, pos, f"record index {idx} out of sequence")
        try:
            recorded = parse_clause(rec.get("clause", ""))
        except (TraceParseError, IndexError) as exc:
            return TraceCheck(False, pos, f"unparsable clause: {exc}")
        if rec.get("rule") == "input":
            clauses[pos] = recorded
            continue
        derived, why = _replay(rec, clauses)
        if derived is None:
            return TraceCheck(False, pos, why)
        if recorded and not _subsumes(derived, recorded):
            return TraceCheck(False, pos, "recorded clause does not follow from premises")
        if not recorded and derived:
            return TraceCheck(False, pos, "claimed empty clause but derivation is nonempty")
        clauses[pos] = recorded
    if clauses[len(records) - 1]:
        return TraceCheck(False, len(records) - 1, "trace does not end in the empty clause")
    return TraceCheck(True)


def check_trace_file(path: str | Path) -> TraceCheck:
    """Check a JSON-lines trace file.  Raises TraceParseError on malformed JSON."""
    records = []
    for n, line in enumerate(Path(path).read_text().splitlines()):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise TraceParseError(f"line {n + 1}: {exc}") from exc
        if not isinstance(rec, dict):
            raise TraceParseError(f"line {n + 1}: record is not an object")
        records.append(rec)
    return check_records(records)
