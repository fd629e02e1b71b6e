"""Answering query sequences, with or without remembering earlier answers."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .counter import satisfiable
from .evidence import HALF, evidence_of
from .formula import CnfSystem, Formula, attach_formula, render_formula

OBLIVIOUS = "oblivious"
NONOBLIVIOUS = "nonoblivious"


@dataclass(frozen=True)
class Belief:
    query: Formula
    verdict: bool | None  # None: abstained under the credibility floor
    evidence: Fraction
    mode: str
    index: int

    @property
    def formula(self) -> Formula | None:
        """The believed formula: the query or its negation."""
        if self.verdict is None:
            return None
        return self.query if self.verdict else ~self.query

    def as_dict(self, system: CnfSystem | None = None) -> dict:
        return {
            "step": self.index,
            "query": render_formula(self.query, system),
            "verdict": {True: "true", False: "false", None: "abstain"}[self.verdict],
            "evidence": f"{self.evidence.numerator}/{self.evidence.denominator}",
            "evidence_decimal": float(self.evidence),
            "mode": self.mode,
        }


def _decide(e: Fraction, floor: Fraction) -> bool | None:
    if floor and abs(e - HALF) < floor:
        return None
    return e >= HALF


def check_consistency(system: CnfSystem, beliefs: Sequence[Belief]) -> bool:
    """Whether some model of the system satisfies every believed formula."""
    s = system
    for b in beliefs:
        if b.formula is not None:
            s = attach_formula(s, b.formula)
    return satisfiable(s)


@dataclass(frozen=True)
class ObliviousAnswers:
    beliefs: list[Belief]
    jointly_consistent: bool


def answer_oblivious(system: CnfSystem, queries: Sequence[Formula], floor: Fraction = Fraction(0)) -> ObliviousAnswers:
    beliefs = []
    for i, q in enumerate(queries, 1):
        e = evidence_of(system, q)
        beliefs.append(Belief(q, _decide(e, floor), e, OBLIVIOUS, i))
    return ObliviousAnswers(beliefs, check_consistency(system, beliefs))


@dataclass
class SessionState:
    """A reasoner's beliefs so far.  In non-oblivious mode each answer is added to the system."""

    base: CnfSystem
    mode: str = NONOBLIVIOUS
    floor: Fraction = Fraction(0)
    current: CnfSystem = None  # type: ignore[assignment]
    trail: list[Belief] = field(default_factory=list)

    def __post_init__(self):
        if self.current is None:
            self.current = self.base

    def ask(self, query: Formula) -> Belief:
        if self.mode == OBLIVIOUS:
            e = evidence_of(self.base, query)
        else:
            e = evidence_of(self.current, query)
        b = Belief(query, _decide(e, self.floor), e, self.mode, len(self.trail) + 1)
        if self.mode == NONOBLIVIOUS and b.formula is not None:
            self.current = attach_formula(self.current, b.formula)
        self.trail.append(b)
        return b

    def reset(self) -> None:
        self.current = self.base
        self.trail = []

    def consistent(self) -> bool:
        return check_consistency(self.base, self.trail)


def answer_nonoblivious(state: SessionState, query: Formula) -> Belief:
    if state.mode != NONOBLIVIOUS:
        raise ValueError("session is not in non-oblivious mode")
    return state.ask(query)
