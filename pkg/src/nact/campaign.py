"""Campaigns: enumerate, classify, refute and commit to a ledger.

Commitment is strictly in enumeration order.  After each commitment the
whole state (config, position, ledger) is written atomically with a
checksum, so an interrupted run can be resumed and finishes with the same
bytes as an uninterrupted one.
"""

from __future__ import annotations

import hashlib
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from .enumerate import GenConfig, enumerate_up_to, list1_axiom_filter
from .formula import params, to_text
from .ledger import (
    ACCEPTED, EXCLUDED, Ledger, LedgerError, SystemMode, Verdict, apply_verdict,
    get_mode, j3_completion, report, revise_on_new_set,
)
from .models import find_witness
from .pathology import N_MAX, check_patho, detect_prim_patho
from .refuter import main_task, main_task_parametric
from .stratify import StratificationError, stratify

__all__ = [
    "CampaignConfig", "CampaignError", "CampaignResult", "run_campaign", "resume",
    "config_hash", "STATE_FILE", "DEVIATIONS",
]

STATE_VERSION = 1
STATE_FILE = "state.json"

DEVIATIONS = (
    "length metric: AST node count; comprehension bodies count, sugar constructors count 1",
    "simplifier: double negation, negated constants, unit laws, idempotence, "
    "and-/or-chains flattened and sorted by printed level form",
    "constructors: T, F, membership atoms, not, binary and, exists over a body with a "
    "top-level membership literal linking the new variable to an existing one",
    "equality atoms are not generated by default",
    "stream order: the eight seeds first, then (length, bound variables, text)",
    "patho / anti-patho: bounded proof of equivalence with a circle / negated circle, "
    f"circles up to length {N_MAX}; countermodels settle non-equivalence",
    "refutation: binary resolution with factoring, explicit equality axioms, "
    "sethood assumption and set-term axioms as set of support, budget counts generated clauses",
    "set terms inside formulas get constants and their comprehension axiom in both frames",
    "J3 tie policy: when both A and not A are open nothing is forced",
)


class CampaignError(RuntimeError):
    pass


@dataclass(frozen=True)
class CampaignConfig:
    system: str = "Star"
    max_length: int = 6
    budget: int = 1000
    patho_budget: int = 200
    model_n: int = 3
    param_cap: int = 8
    max_bound_vars: int = 2
    max_params: int = 1
    j3: bool = False
    out: str = "campaign-out"
    seed: int = 0  # reserved, unused by the pipeline
    workers: int = 1

    def __post_init__(self) -> None:
        get_mode(self.system)
        for name in ("max_length", "budget", "patho_budget", "model_n", "param_cap", "workers"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.max_bound_vars < 0 or self.max_params < 0:
            raise ValueError("max_bound_vars and max_params must be non-negative")

    @property
    def mode(self) -> SystemMode:
        return get_mode(self.system)

    def gen_config(self) -> GenConfig:
        mode = self.mode
        return GenConfig(
            mode=mode.generation,
            max_length=self.max_length,
            max_bound_vars=self.max_bound_vars,
            max_params=self.max_params if mode.generation == "GL3" else 0,
        )

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "CampaignConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_file(cls, path: str | Path) -> "CampaignConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))


def config_hash(config: CampaignConfig) -> str:
    """Hash of everything that can change results (output path and workers excluded)."""
    data = config.to_dict()
    del data["out"]
    del data["workers"]
    return hashlib.sha256(json.dumps(data, sort_keys=True).encode()).hexdigest()


@dataclass
class CampaignResult:
    ledger: Ledger
    report: dict
    complete: bool
    committed: int
    out: Path


def _ct_verdict(args):
    formula, budget = args
    v = main_task(formula, "CT", None, budget)
    return v.refuted, tuple(v.result.trace_records())


def _checksum(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def _write_atomic(path: Path, text: str) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _save_state(out: Path, config: CampaignConfig, committed: int, ledger: Ledger) -> None:
    ledger_json = ledger.to_json()
    state = {
        "version": STATE_VERSION,
        "config": config.to_dict(),
        "config_hash": config_hash(config),
        "committed": committed,
        "ledger": ledger_json,
        "checksum": _checksum(ledger_json),
    }
    _write_atomic(out / STATE_FILE, json.dumps(state, sort_keys=True) + "\n")


def _load_state(path: Path) -> dict:
    if not path.is_file():
        raise CampaignError(f"no campaign state at {path}")
    try:
        state = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise CampaignError(f"corrupted state file: {exc}") from exc
    if state.get("version") != STATE_VERSION:
        raise CampaignError(f"state version {state.get('version')!r} is not supported")
    if _checksum(state.get("ledger", "")) != state.get("checksum"):
        raise CampaignError("state checksum mismatch")
    return state


class _Runner:
    def __init__(self, config: CampaignConfig, ledger: Ledger, out: Path) -> None:
        self.config = config
        self.mode = config.mode
        self.ledger = ledger
        self.out = out

    def classify(self, entry, f) -> None:
        try:
            entry.stratified = stratify(f).stratified
        except StratificationError:
            entry.stratified = None
        entry.pathology = check_patho(f, self.config.patho_budget, model_n=self.config.model_n).kind

    def prefilter(self, f) -> str | None:
        if self.mode.prefilter == "list1-filter":
            if detect_prim_patho(f) is not None:
                return "prim-patho"
            if not list1_axiom_filter(f):
                return "negation-prim-patho"
        elif self.mode.prefilter == "prim-patho-only" and detect_prim_patho(f) is not None:
            return "prim-patho"
        return None

    def verdict(self, f, precomputed: dict) -> Verdict:
        cfg, led = self.config, self.ledger
        key = to_text(f)
        if key in precomputed:
            refuted, trace = precomputed[key]
            return Verdict(refuted, trace)
        view = led.es_view() if self.mode.uses_es else []
        if self.mode.uses_es:
            led.record_theory(view)
        if params(f):
            pv = main_task_parametric(f, view if self.mode.uses_es else self._param_sets(),
                                      cfg.budget, cfg.param_cap, self.mode.frame)
            trace = tuple(pv.result.trace_records()) if pv.result else ()
            return Verdict(pv.refuted, trace, to_text(pv.instance) if pv.instance else None)
        v = main_task(f, self.mode.frame, view, cfg.budget)
        return Verdict(v.refuted, tuple(v.result.trace_records()))

    def _param_sets(self):
        # parameters always range over accepted sets, also in CT frames
        return self.ledger.es_view()

    def witness(self, entry, f) -> None:
        found = find_witness(f, self.config.model_n)
        if found is not None:
            s, c = found
            entry.witness = self.ledger.add_witness(s.to_dict(c))

    def revise(self, new_key: str) -> None:
        cfg = self.config

        def recheck(entry, new_set, view):
            if self.mode.uses_es:
                self.ledger.record_theory(view)
            pv = main_task_parametric(entry.formula, view, cfg.budget, cfg.param_cap,
                                      self.mode.frame, must_include=new_set)
            trace = tuple(pv.result.trace_records()) if pv.result else ()
            return Verdict(pv.refuted, trace, to_text(pv.instance) if pv.instance else None)

        revise_on_new_set(self.ledger, new_key, recheck)

    def commit(self, f, precomputed: dict) -> None:
        led = self.ledger
        entry = led.add(f)
        if entry.finalized:
            return  # crossed out earlier as a negation
        self.classify(entry, f)
        reason = self.prefilter(f)
        if reason is not None:
            led.tick()
            led._set(entry, EXCLUDED, reason, "excluded")
            return
        apply_verdict(led, entry, self.verdict(f, precomputed), self.mode)
        if entry.status == ACCEPTED:
            self.witness(entry, f)
            if self.mode.generation == "GL3":
                self.revise(entry.key)


def _precompute(config: CampaignConfig, formulas: list) -> dict:
    """CT verdicts of parameter-free formulas, computed by a worker pool.

    CT verdicts do not depend on the ledger, so computing them ahead of the
    committer cannot change any result.
    """
    mode = config.mode
    if config.workers <= 1 or mode.uses_es:
        return {}
    todo = [f for f in formulas if not params(f)]
    with ProcessPoolExecutor(max_workers=config.workers) as pool:
        results = list(pool.map(_ct_verdict, [(f, config.budget) for f in todo], chunksize=4))
    return {to_text(f): r for f, r in zip(todo, results)}


def _finish(config: CampaignConfig, ledger: Ledger, out: Path) -> dict:
    if config.j3:
        j3_completion(ledger)
    rep = report(ledger, {
        "config": config.to_dict() | {"out": None},
        "config_hash": config_hash(config),
        "deviations": list(DEVIATIONS),
    })
    ledger.save(out / "ledger.json")
    (out / "report.json").write_text(json.dumps(rep, sort_keys=True, indent=1) + "\n")
    traces = out / "traces"
    traces.mkdir(exist_ok=True)
    for tid, records in sorted(ledger.traces.items()):
        (traces / f"{tid}.jsonl").write_text(
            "".join(json.dumps(r, sort_keys=True) + "\n" for r in records)
        )
    return rep


def _drive(config: CampaignConfig, ledger: Ledger, committed: int, out: Path,
           stop_after: int | None) -> CampaignResult:
    formulas = enumerate_up_to(config.gen_config())
    runner = _Runner(config, ledger, out)
    precomputed = _precompute(config, formulas[committed:])
    done_now = 0
    for f in formulas[committed:]:
        if stop_after is not None and done_now >= stop_after:
            return CampaignResult(ledger, {}, False, committed, out)
        runner.commit(f, precomputed)
        committed += 1
        done_now += 1
        _save_state(out, config, committed, ledger)
    rep = _finish(config, ledger, out)
    return CampaignResult(ledger, rep, True, committed, out)


def run_campaign(config: CampaignConfig, *, stop_after: int | None = None) -> CampaignResult:
    """Run a fresh campaign into ``config.out``.

    ``stop_after`` commits at most that many formulas and leaves a resumable
    state behind (used to simulate interruptions).
    """
    out = Path(config.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write-test"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise CampaignError(f"output directory {out} is not writable: {exc}") from exc
    ledger = Ledger(config.mode)
    _save_state(out, config, 0, ledger)
    return _drive(config, ledger, 0, out, stop_after)


def resume(state_path: str | Path, config: CampaignConfig | None = None, *,
           stop_after: int | None = None) -> CampaignResult:
    """Continue a campaign from its state file.

    A supplied ``config`` must hash to the stored one.
    """
    path = Path(state_path)
    if path.is_dir():
        path = path / STATE_FILE
    state = _load_state(path)
    stored = CampaignConfig.from_dict(state["config"])
    if config is not None and config_hash(config) != state["config_hash"]:
        raise CampaignError("config hash mismatch: the campaign was started with another config")
    if config_hash(stored) != state["config_hash"]:
        raise CampaignError("stored config does not match its hash")
    try:
        ledger = Ledger.from_dict(json.loads(state["ledger"]))
    except (LedgerError, KeyError, TypeError, json.JSONDecodeError) as exc:
        raise CampaignError(f"corrupted ledger in state: {exc}") from exc
    run_config = stored if config is None else config
    return _drive(run_config, ledger, int(state["committed"]), path.parent, stop_after)
