"""Cheaper evidence: local surroundings of a literal, and early decisions from partial counts."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .counter import BoundsSnapshot, anytime_run
from .evidence import HALF, evidence_all
from .formula import CnfSystem, InconsistentSystem, Lit, var


class InconsistentSubsystem(InconsistentSystem):
    """A surrounding without models; the whole system has none either."""


@dataclass(frozen=True)
class Surrounding:
    center: Lit
    order: int
    clause_ids: tuple[int, ...]  # indices into the original clause list
    subsystem: CnfSystem  # renumbered over the variables it mentions
    variable_map: dict[int, int]  # original index -> subsystem index
    saturated: bool

    @property
    def local_center(self) -> Lit:
        v = self.variable_map[var(self.center)]
        return v if self.center > 0 else -v


def _expand(system: CnfSystem, chosen: set[int]) -> set[int]:
    vs = {var(l) for k in chosen for l in system.clauses[k]}
    return {k for k, c in enumerate(system.clauses) if any(var(l) in vs for l in c)}


def _clause_ids(system: CnfSystem, lit: Lit, i: int) -> tuple[list[int], bool]:
    v = var(lit)
    chosen = {k for k, c in enumerate(system.clauses) if any(var(l) == v for l in c)}
    for _ in range(1, i):
        grown = _expand(system, chosen)
        if grown == chosen:
            break
        chosen = grown
    # saturated: one more step would add nothing
    return sorted(chosen), _expand(system, chosen) == chosen


def surrounding(system: CnfSystem, lit: Lit, i: int) -> Surrounding:
    """Clauses within ``i`` hops of ``lit``'s variable (hop = shared variable)."""
    if i < 1:
        raise ValueError("surrounding order starts at 1")
    ids, saturated = _clause_ids(system, lit, i)
    vs = sorted({var(lit)} | {var(l) for k in ids for l in system.clauses[k]})
    vmap = {v: j for j, v in enumerate(vs, 1)}
    clauses = tuple(tuple(vmap[var(l)] if l > 0 else -vmap[var(l)] for l in system.clauses[k]) for k in ids)
    sub = CnfSystem(len(vs), clauses, tuple(system.names[v - 1] for v in vs))
    return Surrounding(lit, i, tuple(ids), sub, vmap, saturated)


@dataclass(frozen=True)
class SurroundingEvidence:
    surrounding: Surrounding
    approx: Fraction
    epsilon: Fraction | None = None
    credible: bool | None = None


def surrounding_evidence(system: CnfSystem, lit: Lit, i: int, exact: Fraction | None = None) -> SurroundingEvidence:
    sur = surrounding(system, lit, i)
    try:
        table = evidence_all(sur.subsystem)
    except InconsistentSystem:
        raise InconsistentSubsystem("surrounding has no models, so neither does the system") from None
    approx = table.evidence(sur.local_center)
    if exact is None:
        return SurroundingEvidence(sur, approx)
    return SurroundingEvidence(sur, approx, approx - exact, (approx >= HALF) == (exact >= HALF))


@dataclass(frozen=True)
class EarlyDecision:
    variable: int
    value: Lit  # decided typical atom
    tau0: int  # terminated paths when decided
    tau_f: int  # paths in the full run
    lower: Fraction  # evidence bracket for the positive literal at tau0
    upper: Fraction

    @property
    def gain(self) -> float:
        return self.tau_f / self.tau0 if self.tau0 else float("inf")


def _bracket(m_pos: int, m_neg: int, u_pos: int, u_neg: int) -> tuple[Fraction, Fraction]:
    """Evidence range for the positive literal given count bounds on both sides.

    A zero upper bound means that side has no models at all; the system is
    satisfiable, so the evidence is then exactly 1 (or 0).
    """
    lower = Fraction(m_pos, m_pos + u_neg) if u_neg else Fraction(1)
    upper = 1 - Fraction(m_neg, m_neg + u_pos) if u_pos else Fraction(0)
    return lower, upper


def decide(snap: BoundsSnapshot, v: int) -> tuple[Lit, Fraction, Fraction] | None:
    """Typical value of ``v`` if the bounds already settle it, with the evidence bracket.

    The positive side wins ties (``>=``), the negative side needs strict ``>``.
    """
    m_pos, m_neg = snap.lower(v), snap.lower(-v)
    u_pos, u_neg = snap.upper(v), snap.upper(-v)
    if m_pos >= u_neg:
        value = v
    elif m_neg > u_pos:
        value = -v
    else:
        return None
    lower, upper = _bracket(m_pos, m_neg, u_pos, u_neg)
    return value, lower, upper


def early_typical(system: CnfSystem, branching: str = "fail-first", trace: list | None = None) -> dict[int, EarlyDecision]:
    """Decide each typical atom as soon as the running bounds allow.

    The default search explores the child with fewer expected models first, so
    the long tail of a run is spent among models rather than on heavy
    falsifying paths; that is what lets the bounds close before the end.

    ``trace``, when given, receives ``(variable, tau, lower, upper)`` for every
    variable at every snapshot, using the bracket of the current bounds.
    """
    pending = set(system.variables)
    found: dict[int, tuple[Lit, int, Fraction, Fraction]] = {}

    def observe(snap: BoundsSnapshot):
        for v in list(pending):
            d = decide(snap, v)
            if d is not None:
                found[v] = (d[0], snap.time, d[1], d[2])
                pending.discard(v)
        if trace is not None:
            for v in system.variables:
                m_pos, m_neg = snap.lower(v), snap.lower(-v)
                u_pos, u_neg = snap.upper(v), snap.upper(-v)
                trace.append((v, snap.time, *_bracket(m_pos, m_neg, u_pos, u_neg)))

    led = anytime_run(system, observe, branching)
    if led.total_models == 0:
        raise InconsistentSystem("system has no models")
    tau_f = led.paths_processed
    for v in pending:
        # the bounds meet at the end of a complete run, so this only covers runs without paths
        k = led.models_with[v]
        e = Fraction(k, led.total_models)
        found[v] = (v if 2 * k >= led.total_models else -v, tau_f, e, e)
    return {v: EarlyDecision(v, *found[v][:2], tau_f, *found[v][2:]) for v in sorted(found)}
