"""Evidence of literals and formulas: the share of models in which they hold."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .counter import count_ledger, count_models
from .formula import (CnfSystem, Formula, InconsistentSystem, Lit, Model,
                      attach_formula, evaluate, var)

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class EvidenceTable:
    """Exact ``E(S, v)`` for every base variable, from one counting run."""

    num_vars: int
    total_models: int
    models_with_pos: tuple[int, ...]  # index v-1

    def count(self, lit: Lit) -> int:
        """``|MOD(S ∪ {lit})|``."""
        k = self.models_with_pos[var(lit) - 1]
        return k if lit > 0 else self.total_models - k

    def evidence(self, lit: Lit) -> Fraction:
        return Fraction(self.count(lit), self.total_models)

    def __getitem__(self, lit: Lit) -> Fraction:
        return self.evidence(lit)

    @property
    def variables(self) -> range:
        return range(1, self.num_vars + 1)

    def neutral(self, v: int) -> bool:
        return 2 * self.models_with_pos[v - 1] == self.total_models


def evidence_all(system: CnfSystem, branching: str = "static") -> EvidenceTable:
    led = count_ledger(system, branching)
    if led.total_models == 0:
        raise InconsistentSystem("system has no models; evidence is undefined")
    pos = tuple(led.models_with[v] for v in range(1, system.num_base + 1))
    return EvidenceTable(system.num_base, led.total_models, pos)


def _require_models(system: CnfSystem) -> int:
    m = count_models(system)
    if m == 0:
        raise InconsistentSystem("system has no models; evidence is undefined")
    return m


def evidence_of(system: CnfSystem, f: Formula) -> Fraction:
    total = _require_models(system)
    return Fraction(count_models(attach_formula(system, f)), total)


def conjunction_evidence(system: CnfSystem, lits: Iterable[Lit]) -> Fraction:
    total = _require_models(system)
    return Fraction(count_models(system.add_units(lits)), total)


# -- partially known world probabilities ----------------------------------------

class InvalidDistribution(ValueError):
    pass


@dataclass(frozen=True)
class PinnedDistribution:
    """Models of S whose probabilities are known; the rest share the remainder equally."""

    entries: tuple[tuple[Model, Fraction], ...]

    @classmethod
    def of(cls, entries: Iterable[tuple[Sequence[int], object]]) -> "PinnedDistribution":
        return cls(tuple((tuple(m), Fraction(p)) for m, p in entries))

    @property
    def total(self) -> Fraction:
        return sum((p for _, p in self.entries), Fraction(0))


def _model_of(system: CnfSystem, m: Model) -> bool:
    if system.num_vars == system.num_base:
        return system.satisfied_by(m)
    return count_models(system.add_units(m)) > 0


def pinned_evidence(system: CnfSystem, f: Formula, pinned: PinnedDistribution) -> Fraction:
    """Evidence when some models carry known probabilities.

    The unpinned models split ``1 - p(pinned)`` equally; pinned models that
    satisfy ``f`` add their own probability.
    """
    seen = set()
    for m, p in pinned.entries:
        if len(m) != system.num_base or sorted(var(l) for l in m) != list(system.variables):
            raise InvalidDistribution(f"pinned model {m} is not a full assignment")
        if not 0 < p <= 1:
            raise InvalidDistribution(f"probability {p} outside (0, 1]")
        if frozenset(m) in seen:
            raise InvalidDistribution(f"pinned model {m} listed twice")
        seen.add(frozenset(m))
        if not _model_of(system, m):
            raise InvalidDistribution(f"pinned model {m} does not satisfy the system")
    p_pinned = pinned.total
    if p_pinned > 1:
        raise InvalidDistribution(f"pinned probabilities sum to {p_pinned} > 1")

    total = _require_models(system)
    with_f = count_models(attach_formula(system, f))
    known_f = Fraction(0)
    pinned_with_f = 0
    for m, p in pinned.entries:
        if evaluate(f, {var(l): l > 0 for l in m}):
            known_f += p
            pinned_with_f += 1
    rest = total - len(pinned.entries)
    if p_pinned == 1:
        return known_f
    if rest == 0:
        raise InvalidDistribution("pinned probabilities sum below 1 but every model is pinned")
    return (1 - p_pinned) * Fraction(with_f - pinned_with_f, rest) + known_f


# -- conjunctions ---------------------------------------------------------------

@dataclass(frozen=True)
class ConjunctionBounds:
    alpha: Fraction
    beta: Fraction
    gamma: Fraction
    lower: Fraction
    upper: Fraction

    def __contains__(self, x) -> bool:
        return self.lower <= x <= self.upper


def conjunction_bounds(table: EvidenceTable, literals: Iterable[Lit], B: int, M: int) -> ConjunctionBounds:
    """Lower and upper bounds on the evidence of a conjunction of literals.

    ``alpha`` comes from the individual evidences; ``beta`` and ``gamma`` from
    the fact that a conjunction of ``k`` literals holds in ``2**(B-k)`` of all
    interpretations.
    """
    lits = list(literals)
    k = len(lits)
    if k == 0:
        raise ValueError("need at least one literal")
    if len({var(l) for l in lits}) != k:
        raise ValueError("literals must be over distinct variables")
    alpha = sum((table.evidence(l) for l in lits), Fraction(0)) - k + 1
    beta = 1 - Fraction(2 ** (B - k) * (2 ** k - 1), M)
    gamma = Fraction(2 ** (B - k), M)
    return ConjunctionBounds(alpha, beta, gamma, max(Fraction(0), alpha, beta), min(Fraction(1), gamma))
