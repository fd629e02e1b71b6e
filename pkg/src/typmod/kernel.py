"""Typical kernel: typical atoms whose every countermodel has a neighbouring model.

For a typical atom ``t`` over variable ``a``, the countermodels are the models
of ``S ∪ {-t}``.  The atom is a kernel atom when flipping ``a`` in any of them
yields a model again.  The check counts both sides: ``N1`` is the number of
countermodels, ``N2`` the number of neighbour pairs, obtained as the model
count of ``S1 ∪ S2`` over the variables other than ``a``, where ``S1`` is
``S`` under ``t`` and ``S2`` is ``S`` under ``-t``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .counter import count_models, satisfiable
from .evidence import EvidenceTable, evidence_all
from .formula import (CnfSystem, Formula, InconsistentSystem, Lit, direct_cnf,
                      formula_vars, var)
from .typicality import typical_atoms


class NotTypical(ValueError):
    pass


@dataclass(frozen=True)
class KernelVerdict:
    atom: Lit
    n1: int
    n2: int

    @property
    def is_kernel(self) -> bool:
        return self.n1 == self.n2


def _restrict(clauses, lit: Lit):
    """Clauses not satisfied by ``lit``, with ``-lit`` removed."""
    neg = -lit
    return [tuple(x for x in c if x != neg) for c in clauses if lit not in c]


def _drop_variable(clauses, a: int):
    # renumber so the pivot leaves the variable set
    return [tuple(x if abs(x) < a else (x - 1 if x > 0 else x + 1) for x in c) for c in clauses]


def neighbour_system(system: CnfSystem, atom: Lit) -> CnfSystem:
    """``S1 ∪ S2`` for ``atom``, over ``Base(S)`` without the atom's variable."""
    a = var(atom)
    s1 = _restrict(system.clauses, atom)
    s2 = _restrict(system.clauses, -atom)
    merged = list(dict.fromkeys(s1 + s2))
    names = system.names[: a - 1] + system.names[a:]
    return CnfSystem(system.num_vars - 1, tuple(_drop_variable(merged, a)), names,
                     num_base=system.num_base - 1)


def is_kernel_atom(system: CnfSystem, atom: Lit, table: EvidenceTable | None = None) -> KernelVerdict:
    if system.num_vars != system.num_base:
        raise ValueError("kernel checks need a system without auxiliary variables")
    if table is None:
        table = evidence_all(system)
    if 2 * table.count(atom) < table.total_models:
        raise NotTypical(f"{system.lit_name(atom)} is not a typical atom")
    n1 = count_models(system.add_units([-atom]))
    n2 = count_models(neighbour_system(system, atom))
    return KernelVerdict(atom, n1, n2)


def kernel_verdicts(system: CnfSystem, table: EvidenceTable | None = None) -> list[KernelVerdict]:
    if table is None:
        table = evidence_all(system)
    return [is_kernel_atom(system, t, table) for t in typical_atoms(table)]


def typical_kernel(system: CnfSystem, table: EvidenceTable | None = None) -> list[Lit]:
    kernel = [k.atom for k in kernel_verdicts(system, table) if k.is_kernel]
    if not satisfiable(system.add_units(kernel)):
        raise AssertionError("typical kernel inconsistent with the system")
    return kernel


@dataclass(frozen=True)
class AtomStability:
    atom: Lit
    in_formula_base: bool
    still_kernel: bool

    @property
    def status(self) -> str:
        if not self.in_formula_base:
            return "guaranteed" if self.still_kernel else "VIOLATED"
        return "incidental" if self.still_kernel else "lost"


@dataclass(frozen=True)
class StabilityReport:
    kernel_before: list[Lit]
    kernel_after: list[Lit]
    atoms: list[AtomStability]

    @property
    def violations(self) -> list[AtomStability]:
        return [a for a in self.atoms if a.status == "VIOLATED"]


def check_stability(system: CnfSystem, phi: Formula) -> StabilityReport:
    """Compare the kernel before and after adding ``phi``.

    Kernel atoms over variables ``phi`` does not mention must survive; the
    others are reported as incidentally stable or lost.
    """
    extended = system.add_clauses(direct_cnf(phi))
    if not satisfiable(extended):
        raise InconsistentSystem("formula is inconsistent with the system")
    before = typical_kernel(system)
    table = evidence_all(extended)
    after = typical_kernel(extended, table)
    phi_vars = formula_vars(phi)
    atoms = []
    for k in before:
        # ask about k itself: on an exact tie the kernel list holds the positive literal
        try:
            kept = is_kernel_atom(extended, k, table).is_kernel
        except NotTypical:
            kept = False
        atoms.append(AtomStability(k, var(k) in phi_vars, kept))
    return StabilityReport(before, after, atoms)

