"""Exact model counting by DPLL path accounting.

Every leaf of the DPLL search tree is a *path*: a sequence of assigned
literals that either satisfies all clauses (while its proper prefix does not)
or falsifies some clause (likewise).  A satisfying path of length ``k`` over
``n`` variables stands for ``2**(n-k)`` models; a falsifying one for as many
non-models.  Per-literal counts follow from the same weights: a literal on
the path gets the full weight, each polarity of an unassigned variable gets
half of it.

Unit propagation is used.  Forcing a unit literal ``u`` implicitly closes
the sibling branch ``-u`` as a falsifying path, which is reported as such so
that model and non-model totals always add up to ``2**n``.
"""

from __future__ import annotations

import itertools
import math
import sys
from dataclasses import dataclass, field
from typing import Callable, Iterator, TextIO

from .formula import CnfSystem, Clause, Lit, Model, var

# depth is bounded by the number of variables
sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))

OnPath = Callable[[list, bool], None]


class _Stop(Exception):
    pass


def _assign(clauses: list[Clause], lit: Lit) -> list[Clause] | None:
    """Simplify by making ``lit`` true; None signals an emptied clause."""
    out = []
    neg = -lit
    for c in clauses:
        if lit in c:
            continue
        if neg in c:
            c = tuple(x for x in c if x != neg)
            if not c:
                return None
        out.append(c)
    return out


def _static_order(clauses: list[Clause]) -> int:
    return min(var(l) for c in clauses for l in c)


def _frequency_order(clauses: list[Clause]) -> int:
    cnt: dict[int, int] = {}
    for c in clauses:
        for l in c:
            a = l if l > 0 else -l
            cnt[a] = cnt.get(a, 0) + 1
    best = max(cnt.values())
    return min(a for a, k in cnt.items() if k == best)


# log(1 - 2**-k): expected share of assignments a k-literal clause keeps
_KEEP = [0.0] + [math.log1p(-(2.0 ** -k)) for k in range(1, 64)]


def _model_estimate(clauses: list[Clause] | None) -> float:
    if clauses is None:
        return -math.inf
    return sum(_KEEP[min(len(c), 63)] for c in clauses)


def _true_first(v: int, clauses: list[Clause]):
    for lit in (v, -v):
        yield lit, _assign(clauses, lit)


def _fewer_models_first(v: int, clauses: list[Clause]):
    # explore the side with fewer expected models first, so that large
    # falsifying paths terminate early and the search ends among the models
    kids = [(lit, _assign(clauses, lit)) for lit in (v, -v)]
    kids.sort(key=lambda k: _model_estimate(k[1]))
    return kids


# name -> (variable choice, order of the two children)
BRANCHING = {
    "static": (_static_order, _true_first),
    "frequency": (_frequency_order, _true_first),
    "fail-first": (_static_order, _fewer_models_first),
}


def _search(clauses: list[Clause], trail: list, on_path: OnPath, policy) -> None:
    mark = len(trail)
    try:
        while True:
            unit = None
            for c in clauses:
                if len(c) == 1:
                    unit = c[0]
                    break
            if unit is None:
                break
            trail.append(-unit)
            on_path(trail, False)
            trail[-1] = unit
            clauses = _assign(clauses, unit)
            if clauses is None:
                on_path(trail, False)
                return
            if not clauses:
                on_path(trail, True)
                return
        choose, children = policy
        for lit, reduced in children(choose(clauses), clauses):
            trail.append(lit)
            if reduced is None:
                on_path(trail, False)
            elif not reduced:
                on_path(trail, True)
            else:
                _search(reduced, trail, on_path, policy)
            trail.pop()
    finally:
        del trail[mark:]


def walk_paths(system: CnfSystem, on_path: OnPath, branching: str = "static") -> None:
    """Run the search, calling ``on_path(trail, satisfying)`` at every leaf.

    ``trail`` is reused between calls; copy it if it must outlive the call.
    """
    try:
        policy = BRANCHING[branching]
    except KeyError:
        raise ValueError(f"unknown branching {branching!r}; choose from {sorted(BRANCHING)}") from None
    clauses = list(system.clauses)
    trail: list = []
    if any(len(c) == 0 for c in clauses):
        on_path(trail, False)
    elif not clauses:
        on_path(trail, True)
    else:
        _search(clauses, trail, on_path, policy)


def count_models(system: CnfSystem, branching: str = "static") -> int:
    n = system.num_vars
    total = 0

    def on_path(trail, sat):
        nonlocal total
        if sat:
            total += 1 << (n - len(trail))

    walk_paths(system, on_path, branching)
    return total


def satisfiable(system: CnfSystem, branching: str = "static") -> bool:
    return find_model(system, branching) is not None


def find_model(system: CnfSystem, branching: str = "static") -> Model | None:
    """First model in search order (unassigned variables set true), or None."""
    found: list = []

    def on_path(trail, sat):
        if sat:
            found.extend(trail)
            raise _Stop

    try:
        walk_paths(system, on_path, branching)
    except _Stop:
        fixed = {var(l): l for l in found}
        return tuple(fixed.get(v, v) for v in range(1, system.num_vars + 1))
    return None


@dataclass
class _Tally:
    """Running sums from which per-literal counts are recovered in O(1)."""

    n: int
    total: int = 0
    on: dict = field(default_factory=dict)
    cover: list = field(default_factory=list)

    def __post_init__(self):
        self.cover = [0] * (self.n + 1)

    def add(self, trail, w):
        self.total += w
        on = self.on
        cover = self.cover
        for l in trail:
            on[l] = on.get(l, 0) + w
            cover[l if l > 0 else -l] += w

    def with_lit(self, l: Lit) -> int:
        return self.on.get(l, 0) + (self.total - self.cover[var(l)]) // 2


@dataclass(frozen=True)
class CountLedger:
    n: int
    total_models: int
    total_nonmodels: int
    models_with: dict[int, int]
    nonmodels_with: dict[int, int]
    paths_processed: int
    satisfying_paths: int
    falsifying_paths: int

    @property
    def complete(self) -> bool:
        return self.total_models + self.total_nonmodels == 1 << self.n


@dataclass(frozen=True)
class BoundsSnapshot:
    """Per-literal bounds on ``|MOD(S ∪ {l})|`` after ``time`` terminated paths."""

    time: int
    n: int
    models_seen: dict[int, int]
    nonmodels_seen: dict[int, int]

    def lower(self, l: Lit) -> int:
        return self.models_seen[l]

    def upper(self, l: Lit) -> int:
        return (1 << (self.n - 1)) - self.nonmodels_seen[l]


@dataclass(frozen=True)
class PathRecord:
    assigned: tuple[int, ...]
    kind: str  # "satisfying" | "falsifying"


class _LedgerRun:
    def __init__(self, n, observer=None, trace: TextIO | None = None):
        self.n = n
        self.models = _Tally(n)
        self.nonmodels = _Tally(n)
        self.sat_paths = 0
        self.fal_paths = 0
        self.observer = observer
        self.trace = trace

    def __call__(self, trail, sat):
        w = 1 << (self.n - len(trail))
        if sat:
            self.models.add(trail, w)
            self.sat_paths += 1
        else:
            self.nonmodels.add(trail, w)
            self.fal_paths += 1
        if self.trace is not None:
            kind = "satisfying" if sat else "falsifying"
            self.trace.write(f"{len(trail)} {kind} {' '.join(map(str, trail))}\n")
        if self.observer is not None:
            self.observer(self.snapshot())

    def _per_literal(self, tally):
        out = {}
        for v in range(1, self.n + 1):
            out[v] = tally.with_lit(v)
            out[-v] = tally.with_lit(-v)
        return out

    def snapshot(self) -> BoundsSnapshot:
        return BoundsSnapshot(self.sat_paths + self.fal_paths, self.n,
                              self._per_literal(self.models), self._per_literal(self.nonmodels))

    def ledger(self) -> CountLedger:
        return CountLedger(
            n=self.n,
            total_models=self.models.total,
            total_nonmodels=self.nonmodels.total,
            models_with=self._per_literal(self.models),
            nonmodels_with=self._per_literal(self.nonmodels),
            paths_processed=self.sat_paths + self.fal_paths,
            satisfying_paths=self.sat_paths,
            falsifying_paths=self.fal_paths,
        )


def count_ledger(system: CnfSystem, branching: str = "static", trace: TextIO | None = None) -> CountLedger:
    run = _LedgerRun(system.num_vars, trace=trace)
    walk_paths(system, run, branching)
    return run.ledger()


def anytime_run(
    system: CnfSystem,
    observer: Callable[[BoundsSnapshot], None],
    branching: str = "static",
) -> CountLedger:
    """Like :func:`count_ledger`, reporting bounds after every terminated path."""
    run = _LedgerRun(system.num_vars, observer=observer)
    walk_paths(system, run, branching)
    return run.ledger()


def iter_paths(system: CnfSystem, branching: str = "static") -> Iterator[PathRecord]:
    records: list[PathRecord] = []

    def on_path(trail, sat):
        records.append(PathRecord(tuple(trail), "satisfying" if sat else "falsifying"))

    walk_paths(system, on_path, branching)
    return iter(records)


@dataclass(frozen=True)
class Enumeration:
    models: list[Model]
    truncated: bool

    def __len__(self):
        return len(self.models)

    def __iter__(self):
        return iter(self.models)


def enumerate_models(system: CnfSystem, cap: int, branching: str = "static") -> Enumeration:
    """Expand satisfying paths into full assignments, at most ``cap`` of them.

    Free variables are expanded true-first in index order.  ``truncated`` is
    set when more models exist than were returned.
    """
    n = system.num_vars
    models: list[Model] = []
    truncated = False

    def on_path(trail, sat):
        nonlocal truncated
        if not sat:
            return
        fixed = {var(l): l for l in trail}
        free = [v for v in range(1, n + 1) if v not in fixed]
        for bits in itertools.product((True, False), repeat=len(free)):
            if len(models) >= cap:
                truncated = True
                raise _Stop
            vals = dict(fixed)
            vals.update((v, v if b else -v) for v, b in zip(free, bits))
            models.append(tuple(vals[v] for v in range(1, n + 1)))

    try:
        walk_paths(system, on_path, branching)
    except _Stop:
        pass
    return Enumeration(models, truncated)
