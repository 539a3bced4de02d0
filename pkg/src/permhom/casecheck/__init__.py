"""Mechanical verification of the primitive three-order case analysis."""
from .division import DivisionReport, coverage, verify_case_division
from .lemmas import (
    LEMMAS,
    Certificate,
    CertificationFailed,
    UncertifiedInstance,
    build_clause_set,
    certify_lemma,
    congruence_clauses,
    replay_certificate,
)
from .logic import Clause, Fact, UncertifiedClause, search
from .replay import LineUnjustified, Refutation, ReplayReport, case_variants, refute_case, replay_table
from .tables import CASE_IDS, SCRIPTS, UnknownCase, get_script

__all__ = [
    "CASE_IDS", "Certificate", "CertificationFailed", "Clause", "DivisionReport", "Fact", "LEMMAS",
    "LineUnjustified", "Refutation", "ReplayReport", "SCRIPTS", "UncertifiedClause", "UncertifiedInstance", "UnknownCase",
    "build_clause_set", "case_variants", "certify_lemma", "congruence_clauses", "coverage", "get_script",
    "refute_case", "replay_certificate", "replay_table", "search", "verify_case_division",
]
