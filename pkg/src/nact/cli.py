"""Command line entry point: ``nact``."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

from .campaign import CampaignConfig, CampaignError, resume, run_campaign
from .catalog import emit_nfum_closed_axiom, emit_zfc4
from .checker import check_trace_file
from .enumerate import GenConfig, enumerate_up_to
from .ledger import SYSTEM_MODES

_OVERRIDES = {
    "system": "system", "max_length": "max_length", "budget": "budget",
    "patho_budget": "patho_budget", "model_n": "model_n", "param_cap": "param_cap",
    "max_bound_vars": "max_bound_vars", "max_params": "max_params", "out": "out",
    "workers": "workers",
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="nact",
        description="Enumerate set-constituting formulas, refute sethood assumptions "
                    "and keep a non-monotonic axiom ledger.",
    )
    p.add_argument("--system", type=str.lower, choices=[m.lower() for m in SYSTEM_MODES])
    p.add_argument("--max-length", type=int)
    p.add_argument("--budget", type=int, help="inference steps per refutation")
    p.add_argument("--patho-budget", type=int, help="steps per pathology question")
    p.add_argument("--model-n", type=int, help="largest finite structure searched")
    p.add_argument("--param-cap", type=int, help="length cap for parameter instances")
    p.add_argument("--max-bound-vars", type=int)
    p.add_argument("--max-params", type=int, help="parameters b1.. in list3")
    p.add_argument("--workers", type=int, help="processes for CT verdicts")
    p.add_argument("--j3", action="store_true", help="run the J3 completion after the round")
    p.add_argument("--out", help="output directory")
    p.add_argument("--config", help="JSON file with campaign settings")
    p.add_argument("--stop-after", type=int, help="commit at most N formulas, then stop")
    action = p.add_mutually_exclusive_group()
    action.add_argument("--resume", metavar="STATE", help="continue from a state file or directory")
    action.add_argument("--emit-axioms", choices=["zfc4", "nfum-closed"])
    action.add_argument("--check-trace", metavar="FILE", help="verify a JSON-lines proof trace")
    return p


def _config(args) -> CampaignConfig:
    cfg = CampaignConfig.from_file(args.config) if args.config else CampaignConfig()
    changes = {
        field: getattr(args, name)
        for name, field in _OVERRIDES.items()
        if getattr(args, name) is not None
    }
    if args.j3:
        changes["j3"] = True
    return replace(cfg, **changes)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.check_trace:
            result = check_trace_file(args.check_trace)
            print(result)
            return 0 if result.valid else 1
        if args.emit_axioms == "zfc4":
            print(json.dumps([s.to_dict() for s in emit_zfc4()], indent=1))
            return 0
        if args.emit_axioms == "nfum-closed":
            cfg = _config(args)
            for f in enumerate_up_to(GenConfig(max_length=cfg.max_length,
                                               max_bound_vars=cfg.max_bound_vars)):
                ax = emit_nfum_closed_axiom(f)
                if ax is not None:
                    print(json.dumps(ax.to_dict(), sort_keys=True))
            return 0
        if args.resume:
            given = _config(args) if (args.config or _explicit(args)) else None
            result = resume(args.resume, given, stop_after=args.stop_after)
        else:
            result = run_campaign(_config(args), stop_after=args.stop_after)
    except (CampaignError, ValueError, KeyError, OSError) as exc:
        print(f"nact: error: {exc}", file=sys.stderr)
        return 2
    if not result.complete:
        print(f"interrupted after {result.committed} formulas; resume with --resume {result.out}")
        return 0
    rep = result.report
    print(f"{rep['mode']}: {rep['entries']} entries -> {result.out}")
    for status, n in rep["by_status"].items():
        print(f"  {status:24} {n}")
    return 0


def _explicit(args) -> bool:
    return args.j3 or any(getattr(args, name) is not None for name in _OVERRIDES)


if __name__ == "__main__":
    sys.exit(main())
