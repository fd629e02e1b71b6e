"""Typical atoms, most typical and typical models, erratum statistics."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath

from .counter import enumerate_models, find_model
from .evidence import HALF, EvidenceTable, evidence_all, evidence_of
from .formula import CnfSystem, Formula, Lit, Model


class CapExceeded(RuntimeError):
    """Enumeration would exceed the configured cap."""


def typical_atoms(table: EvidenceTable) -> list[Lit]:
    """One literal per variable with evidence >= 1/2; ties pick the positive literal."""
    return [v if 2 * table.count(v) >= table.total_models else -v for v in table.variables]


def neutral_variables(table: EvidenceTable) -> list[int]:
    return [v for v in table.variables if table.neutral(v)]


@dataclass(frozen=True)
class TypicalValue:
    formula: Formula
    holds: bool  # False means the typical value is the negation
    evidence: Fraction  # evidence of the original formula

    @property
    def value(self) -> Formula:
        return self.formula if self.holds else ~self.formula


def typical_value(system: CnfSystem, f: Formula) -> TypicalValue:
    e = evidence_of(system, f)
    return TypicalValue(f, e >= HALF, e)


def most_typical_model(system: CnfSystem, typical: Iterable[Lit]) -> Model | None:
    """A model containing every typical atom, if there is one."""
    m = find_model(system.add_units(typical))
    return None if m is None else m[: system.num_base]


def typical_set(model: Sequence[int], typical: Iterable[Lit]) -> frozenset[int]:
    """``T(m)``: the typical atoms a model contains."""
    return frozenset(typical) & frozenset(model)


def maximal_models(models: Sequence[Model], typical: Sequence[Lit]) -> list[Model]:
    """Models whose typical-atom set is not strictly contained in another's."""
    masks = []
    for m in models:
        ms = set(m)
        masks.append(sum(1 << i for i, t in enumerate(typical) if t in ms))
    distinct = set(masks)
    maximal = {a for a in distinct if not any(b != a and a & b == a for b in distinct)}
    return [m for m, a in zip(models, masks) if a in maximal]


def typical_models(system: CnfSystem, cap: int, table: EvidenceTable | None = None) -> list[Model]:
    """All typical models, by enumeration.  Refuses rather than truncates."""
    if table is None:
        table = evidence_all(system)
    if table.total_models > cap:
        raise CapExceeded(f"{table.total_models} models exceed cap {cap}")
    models = [m[: system.num_base] for m in enumerate_models(system, cap).models]
    return maximal_models(models, typical_atoms(table))


def erratum(lits: Iterable[Lit], table: EvidenceTable) -> Fraction:
    """Expected share of ``lits`` that are false in a random model."""
    lits = list(lits)
    if not lits:
        raise ValueError("erratum of an empty set is undefined")
    return 1 - sum((table.evidence(l) for l in lits), Fraction(0)) / len(lits)


@dataclass(frozen=True)
class ErratumStats:
    mean_typical_evidence: Fraction
    er_mtm: Fraction
    er_rand: Fraction
    er_worst: Fraction


def erratum_stats_from(typical_evidence: Sequence[Fraction]) -> ErratumStats:
    B = len(typical_evidence)
    mean = sum(typical_evidence, Fraction(0)) / B
    rand = 2 * sum((e * (1 - e) for e in typical_evidence), Fraction(0)) / B
    return ErratumStats(mean, 1 - mean, rand, mean)


def erratum_stats(table: EvidenceTable) -> ErratumStats:
    return erratum_stats_from([table.evidence(t) for t in typical_atoms(table)])


@dataclass(frozen=True)
class PmtmEstimate:
    """Heuristic chance that a system has a most typical model.

    Treats the typical atoms of each model as independent events, so it is
    only an estimate; ``lower``/``upper`` are the bounds implied by the mean
    typical evidence.
    """

    estimate: mpmath.mpf
    lower: mpmath.mpf
    upper: mpmath.mpf


def _at_least_once(p, M: int):
    # 1 - (1 - p)**M without cancellation for tiny p or huge M
    if p >= 1:
        return mpmath.mpf(1)
    return -mpmath.expm1(M * mpmath.log1p(-p))


def pmtm_estimate(table: EvidenceTable, M: int, B: int) -> PmtmEstimate:
    with mpmath.workdps(40):
        typ = [table.evidence(t) for t in typical_atoms(table)]
        prod = mpmath.mpf(1)
        for e in typ:
            prod *= mpmath.mpf(e.numerator) / e.denominator
        mean = sum(typ, Fraction(0)) / len(typ)
        mean_f = mpmath.mpf(mean.numerator) / mean.denominator
        return PmtmEstimate(
            estimate=+_at_least_once(prod, M),
            lower=+_at_least_once(mpmath.mpf(2) ** -B, M),
            upper=+_at_least_once(mean_f ** B, M),
        )


@dataclass(frozen=True)
class TypicalityReport:
    table: EvidenceTable
    typical: list[Lit]
    neutral: list[int]
    mtm: Model | None
    stats: ErratumStats
    pmtm: PmtmEstimate


def typicality_report(system: CnfSystem, table: EvidenceTable | None = None) -> TypicalityReport:
    if table is None:
        table = evidence_all(system)
    typ = typical_atoms(table)
    return TypicalityReport(
        table=table,
        typical=typ,
        neutral=neutral_variables(table),
        mtm=most_typical_model(system, typ),
        stats=erratum_stats(table),
        pmtm=pmtm_estimate(table, table.total_models, table.num_vars),
    )
