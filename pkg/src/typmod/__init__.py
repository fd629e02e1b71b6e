"""Typical atoms, typical models and model-counting evidence for CNF systems."""

from .counter import (CountLedger, anytime_run, count_ledger, count_models,
                      enumerate_models, find_model, satisfiable)
from .evidence import (EvidenceTable, PinnedDistribution, conjunction_bounds,
                       conjunction_evidence, evidence_all, evidence_of,
                       pinned_evidence)
from .formula import (CnfSystem, Formula, InconsistentSystem, ParseError,
                      attach_formula, metrics, parse_dimacs, parse_formula,
                      read_dimacs, render_dimacs)
from .kernel import check_stability, is_kernel_atom, typical_kernel
from .typicality import (erratum, erratum_stats, most_typical_model,
                         pmtm_estimate, typical_atoms, typical_models,
                         typical_value)

__version__ = "0.1.0"
