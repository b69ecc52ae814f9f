"""Non-monotonic axiom lists for the system variants.

Every candidate ``Set({x : A})`` is an :class:`AxiomEntry` keyed by the
canonical text of ``A``.  Entries are never deleted: crossing out turns an
entry into a tombstone that keeps its evidence for reports.
"""

from __future__ import annotations

import copy
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Sequence

from .formula import Not, canonicalize, length, params, parse, to_text
from .refuter import CT, CT_ES, AcceptedSet

__all__ = [
    "SystemMode", "SYSTEM_MODES", "get_mode", "AxiomEntry", "Ledger", "Verdict",
    "LedgerError", "apply_verdict", "revise_on_new_set", "j3_completion", "report",
    "check_invariants", "PENDING", "ACCEPTED", "REFUTED", "EXCLUDED", "PARAMETRIC",
]

PENDING = "pending"
ACCEPTED = "provisionally-accepted"
REFUTED = "refuted"
EXCLUDED = "excluded-prim-patho"
PARAMETRIC = "provisional-parametric"
STATUSES = (PENDING, ACCEPTED, REFUTED, EXCLUDED, PARAMETRIC)

LEDGER_VERSION = 1


class LedgerError(RuntimeError):
    pass


@dataclass(frozen=True)
class SystemMode:
    name: str
    generation: str  # GL1 | GL2 | GL3
    frame: str  # CT | CT-and-ES
    cross_negation: bool
    prefilter: str  # list1-filter | prim-patho-only | none

    @property
    def uses_es(self) -> bool:
        return self.frame == CT_ES


SYSTEM_MODES = {
    "MoonW": SystemMode("MoonW", "GL1", CT_ES, True, "list1-filter"),
    "Moon": SystemMode("Moon", "GL1", CT, True, "list1-filter"),
    "Star": SystemMode("Star", "GL2", CT, False, "prim-patho-only"),
    "SunW": SystemMode("SunW", "GL3", CT_ES, False, "prim-patho-only"),
    "Sun": SystemMode("Sun", "GL3", CT, False, "prim-patho-only"),
}


def get_mode(name: str) -> SystemMode:
    for key, mode in SYSTEM_MODES.items():
        if key.lower() == name.lower():
            return mode
    raise KeyError(f"unknown system {name!r}; choose from {sorted(SYSTEM_MODES)}")


@dataclass
class AxiomEntry:
    key: str
    order: int
    status: str = PENDING
    evidence: str | None = None
    log: list[tuple[str, int]] = field(default_factory=list)
    second_sort: bool = False
    parametric: bool = False
    length: int = 0
    pathology: str | None = None
    stratified: bool | None = None
    witness: str | None = None

    @property
    def formula(self):
        return parse(self.key)

    @property
    def finalized(self) -> bool:
        return self.status != PENDING


@dataclass(frozen=True)
class Verdict:
    """What the ledger needs from a refuter run."""

    refuted: bool
    trace: tuple[dict, ...] = ()
    instance: str | None = None


class Ledger:
    def __init__(self, mode: SystemMode) -> None:
        self.mode = mode
        self.entries: dict[str, AxiomEntry] = {}
        self.traces: dict[str, list[dict]] = {}
        self.witnesses: dict[str, dict] = {}
        # (step, keys of the existing sets handed to a theory)
        self.theory_log: list[tuple[int, tuple[str, ...]]] = []
        self.step = 0

    # -- registration -----------------------------------------------------

    def _next_order(self) -> int:
        return len(self.entries)

    def add(self, formula, *, status: str = PENDING, evidence: str | None = None) -> AxiomEntry:
        key = to_text(formula)
        if key in self.entries:
            return self.entries[key]
        e = AxiomEntry(key, self._next_order(), parametric=bool(params(formula)),
                       length=length(formula))
        self.entries[key] = e
        if status != PENDING:
            self._set(e, status, evidence, "excluded" if status == EXCLUDED else status)
        return e

    def _set(self, e: AxiomEntry, status: str, evidence: str | None, event: str) -> None:
        e.status = status
        e.evidence = evidence
        e.log.append((event, self.step))

    def tick(self) -> int:
        self.step += 1
        return self.step

    def add_trace(self, records: Sequence[dict]) -> str:
        tid = f"T{len(self.traces) + 1}"
        self.traces[tid] = list(records)
        return tid

    def add_witness(self, data: dict) -> str:
        wid = f"W{len(self.witnesses) + 1}"
        self.witnesses[wid] = data
        return wid

    # -- views ------------------------------------------------------------

    def es_view(self) -> list[AcceptedSet]:
        """Accepted first-sort parameter-free sets, in enumeration order."""
        out = [
            e for e in self.entries.values()
            if e.status == ACCEPTED and not e.second_sort and not e.parametric
        ]
        out.sort(key=lambda e: e.order)
        return [AcceptedSet(e.formula) for e in out]

    def record_theory(self, view: Sequence[AcceptedSet]) -> None:
        self.theory_log.append((self.step, tuple(s.key for s in view)))

    def snapshot(self) -> "Ledger":
        return copy.deepcopy(self)

    def status_of(self, formula) -> str | None:
        e = self.entries.get(to_text(formula))
        return e.status if e else None

    # -- persistence ------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "version": LEDGER_VERSION,
            "mode": self.mode.name,
            "step": self.step,
            "entries": {k: asdict(e) for k, e in self.entries.items()},
            "traces": self.traces,
            "witnesses": self.witnesses,
            "theory_log": [[s, list(keys)] for s, keys in self.theory_log],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1) + "\n"

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json())

    @classmethod
    def from_dict(cls, data: dict) -> "Ledger":
        if data.get("version") != LEDGER_VERSION:
            raise LedgerError(f"unsupported ledger version {data.get('version')!r}")
        led = cls(get_mode(data["mode"]))
        led.step = int(data["step"])
        entries = sorted(data["entries"].values(), key=lambda e: e["order"])
        for raw in entries:
            raw = dict(raw)
            raw["log"] = [tuple(x) for x in raw["log"]]
            led.entries[raw["key"]] = AxiomEntry(**raw)
        led.traces = {k: list(v) for k, v in data["traces"].items()}
        led.witnesses = dict(data["witnesses"])
        led.theory_log = [(int(s), tuple(keys)) for s, keys in data.get("theory_log", [])]
        return led

    @classmethod
    def load(cls, path: str | Path) -> "Ledger":
        return cls.from_dict(json.loads(Path(path).read_text()))


def _negation_key(key: str) -> str:
    return to_text(canonicalize(Not(parse(key))))


def apply_verdict(ledger: Ledger, entry: AxiomEntry | str, verdict: Verdict,
                  mode: SystemMode | None = None) -> Ledger:
    """Commit a refuter verdict for a pending entry."""
    mode = mode or ledger.mode
    e = ledger.entries[entry] if isinstance(entry, str) else entry
    if e.finalized:
        raise LedgerError(f"entry {e.key!r} is already {e.status}")
    step = ledger.tick()
    if not verdict.refuted:
        ledger._set(e, PARAMETRIC if e.parametric else ACCEPTED, None,
                    "kept-parametric" if e.parametric else "kept")
        return ledger
    tid = ledger.add_trace(verdict.trace)
    ledger._set(e, REFUTED, tid, "refuted")
    if mode.cross_negation:
        nkey = _negation_key(e.key)
        other = ledger.entries.get(nkey)
        if other is None:
            other = ledger.add(parse(nkey))
        if other.status in (PENDING, ACCEPTED, PARAMETRIC):
            ledger._set(other, REFUTED, tid, "crossed-by-negation")
    del step
    return ledger


def revise_on_new_set(ledger: Ledger, new_key: str,
                      recheck: Callable[[AxiomEntry, AcceptedSet, list[AcceptedSet]], Verdict]) -> Ledger:
    """Re-check provisional parametric entries against instances using a new set.

    ``recheck(entry, new_set, view)`` runs the parametric main task restricted
    to instances that mention ``new_set``.
    """
    view = ledger.es_view()
    new = next((s for s in view if s.key == new_key), None)
    if new is None:
        raise LedgerError(f"{new_key!r} is not an accepted first-sort set")
    for e in sorted(ledger.entries.values(), key=lambda e: e.order):
        if e.status != PARAMETRIC:
            continue
        v = recheck(e, new, view)
        if v.refuted:
            ledger.tick()
            tid = ledger.add_trace(v.trace)
            ledger._set(e, REFUTED, tid, f"revised-refuted:{v.instance or ''}")
    return ledger


def j3_completion(ledger: Ledger) -> Ledger:
    """Accept the complement of every refuted formula as a second-sort set.

    Runs after a finished round.  When both A and not A are refuted nothing
    can be done; when both are open or accepted nothing needs to be done.
    """
    for e in sorted(ledger.entries.values(), key=lambda e: e.order):
        if e.status != REFUTED or e.second_sort:
            continue
        nkey = _negation_key(e.key)
        other = ledger.entries.get(nkey)
        if other is None:
            other = ledger.add(parse(nkey))
        if other.status == PENDING:
            ledger.tick()
            ledger._set(other, ACCEPTED, "J3", "j3-accepted")
            other.second_sort = True
    return ledger


def report(ledger: Ledger, extra: dict | None = None) -> dict:
    """Deterministic summary of a ledger."""
    entries = sorted(ledger.entries.values(), key=lambda e: e.order)
    by_status = {s: 0 for s in STATUSES}
    by_patho: dict[str, int] = {}
    strat = {"stratified": 0, "unstratified": 0, "unclassified": 0}
    for e in entries:
        by_status[e.status] += 1
        by_patho[e.pathology or "unclassified"] = by_patho.get(e.pathology or "unclassified", 0) + 1
        if e.stratified is None:
            strat["unclassified"] += 1
        else:
            strat["stratified" if e.stratified else "unstratified"] += 1
    accepted = [
        {"formula": e.key, "evidence": e.witness or e.evidence, "second_sort": e.second_sort}
        for e in entries if e.status == ACCEPTED
    ]
    out = {
        "mode": ledger.mode.name,
        "entries": len(entries),
        "by_status": by_status,
        "crossed": by_status[REFUTED] + by_status[EXCLUDED],
        "j3_accepted": sum(1 for e in entries if e.second_sort),
        "pathology": dict(sorted(by_patho.items())),
        "stratification": strat,
        "accepted_sets": accepted,
        "refuted": [{"formula": e.key, "trace": e.evidence} for e in entries if e.status == REFUTED],
    }
    if extra:
        out.update(extra)
    return out


def check_invariants(ledger: Ledger) -> list[str]:
    """Violations of the ledger invariants (empty when all hold)."""
    bad = []
    for e in ledger.entries.values():
        if e.status == REFUTED and (not e.evidence or e.evidence not in ledger.traces):
            bad.append(f"refuted entry without trace: {e.key}")
        if ledger.mode.cross_negation and e.status == REFUTED and not e.second_sort:
            other = ledger.entries.get(_negation_key(e.key))
            if other is not None and other.status not in (REFUTED, EXCLUDED):
                bad.append(f"negation of refuted {e.key} is {other.status}")
    second = {e.key for e in ledger.entries.values() if e.second_sort}
    refuted_at: dict[str, int] = {}
    for e in ledger.entries.values():
        for event, step in e.log:
            if event in ("refuted", "crossed-by-negation") or event.startswith("revised-refuted"):
                refuted_at.setdefault(e.key, step)
    for step, keys in ledger.theory_log:
        for k in keys:
            if k in second:
                bad.append(f"second-sort set {k} entered a theory at step {step}")
            if k in refuted_at and refuted_at[k] <= step:
                bad.append(f"refuted set {k} entered a theory at step {step}")
    return bad
