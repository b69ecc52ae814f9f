"""Bounded exploration of naive comprehension: formulas, refutation, ledgers."""

from .campaign import CampaignConfig, resume, run_campaign
from .checker import check_records, check_trace_file
from .enumerate import GenConfig, GenState, enumerate_up_to
from .formula import canonicalize, parse, to_text
from .ledger import Ledger, apply_verdict, j3_completion
from .models import find_witness
from .pathology import check_patho, detect_prim_patho
from .refuter import main_task, main_task_parametric
from .stratify import stratify

__all__ = [
    "CampaignConfig", "resume", "run_campaign", "check_records", "check_trace_file",
    "GenConfig", "GenState", "enumerate_up_to", "canonicalize", "parse", "to_text",
    "Ledger", "apply_verdict", "j3_completion", "find_witness", "check_patho",
    "detect_prim_patho", "main_task", "main_task_parametric", "stratify",
]
