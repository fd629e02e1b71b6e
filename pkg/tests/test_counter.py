from __future__ import annotations

import io

from conftest import systems
from hypothesis import given
from hypothesis import strategies as st

import oracle
from typmod.counter import (BRANCHING, anytime_run, count_ledger, count_models,
                            enumerate_models, find_model, iter_paths, satisfiable)
from typmod.formula import CnfSystem

branchings = st.sampled_from(sorted(BRANCHING))


def test_example_count(ex31):
    assert count_models(ex31) == 3


def test_table1_count(table1):
    assert count_models(table1) == 5


def test_empty_system_counts_the_cube():
    for n in range(6):
        assert count_models(CnfSystem.from_clauses([], n)) == 2 ** n


def test_empty_clause_gives_zero():
    s = CnfSystem(2, ((1,), ()))
    assert count_models(s) == 0
    assert count_ledger(s).total_nonmodels == 4


def test_ledger_example(ex31):
    led = count_ledger(ex31)
    assert (led.models_with[1], led.models_with[-1]) == (2, 1)


def test_ledger_table1(table1):
    led = count_ledger(table1)
    p, q, s = (table1.index(x) for x in "pqs")
    assert led.models_with[p] == 1
    assert led.models_with[-q] == 2
    assert led.models_with[-s] == 0


@given(systems(), branchings)
def test_ledger_matches_brute_force(s, branching):
    led = count_ledger(s, branching)
    mw, nw = oracle.literal_tallies(s)
    assert led.total_models == oracle.count(s)
    assert led.models_with == mw
    assert led.nonmodels_with == nw
    assert led.complete


@given(systems(), branchings)
def test_complementary_counts(s, branching):
    led = count_ledger(s, branching)
    for v in range(1, s.num_vars + 1):
        assert led.models_with[v] + led.models_with[-v] == led.total_models
        assert led.nonmodels_with[v] + led.nonmodels_with[-v] == led.total_nonmodels
    assert led.total_models + led.total_nonmodels == 2 ** s.num_vars


@given(systems(), branchings)
def test_paths_are_minimal(s, branching):
    for rec in iter_paths(s, branching):
        a = rec.assigned
        falsified = [c for c in s.clauses if all(-l in a for l in c)]
        if rec.kind == "satisfying":
            assert oracle.satisfies(a, s.clauses) or not s.clauses
            if a:
                assert not oracle.satisfies(a[:-1], s.clauses)
        else:
            assert falsified
            assert not any(all(-l in a[:-1] for l in c) for c in s.clauses)


@given(systems())
def test_satisfiable_and_find_model(s):
    m = find_model(s)
    assert satisfiable(s) == (oracle.count(s) > 0) == (m is not None)
    if m is not None:
        assert len(m) == s.num_vars and oracle.satisfies(m, s.clauses)


def test_enumerate_example(ex31):
    e = enumerate_models(ex31, 10)
    assert not e.truncated
    assert {frozenset(m) for m in e} == {frozenset(m) for m in oracle.models(ex31)}
    assert len(e) == 3


def test_enumerate_unsat_and_cube():
    assert len(enumerate_models(CnfSystem.from_clauses([(1,), (-1,)], 1), 5)) == 0
    assert len(enumerate_models(CnfSystem.from_clauses([], 2), 4)) == 4


@given(systems(), st.integers(0, 40))
def test_enumeration_respects_cap(s, cap):
    e = enumerate_models(s, cap)
    total = oracle.count(s)
    assert len(e) == min(total, cap)
    assert e.truncated == (total > cap)
    assert len(set(e)) == len(e)
    assert all(oracle.satisfies(m, s.clauses) for m in e)


def test_enumeration_is_deterministic(table1):
    assert enumerate_models(table1, 10).models == enumerate_models(table1, 10).models


def _collect(s, branching="static"):
    snaps = []
    led = anytime_run(s, snaps.append, branching)
    return snaps, led


@given(systems(), branchings)
def test_anytime_bounds_bracket_and_tighten(s, branching):
    snaps, led = _collect(s, branching)
    exact, _ = oracle.literal_tallies(s)
    assert led == count_ledger(s, branching)
    lits = list(exact)
    prev = None
    for snap in snaps:
        for l in lits:
            assert snap.lower(l) <= exact[l] <= snap.upper(l)
            if prev is not None:
                assert prev.lower(l) <= snap.lower(l)
                assert prev.upper(l) >= snap.upper(l)
        prev = snap
    if snaps:
        final = snaps[-1]
        assert final.time == led.paths_processed
        assert all(final.lower(l) == final.upper(l) == exact[l] for l in lits)


def test_anytime_single_unit():
    snaps, _ = _collect(CnfSystem.from_clauses([(1,)], 2))
    # unit propagation terminates the falsifying sibling first, then the satisfying path
    assert [s.time for s in snaps] == [1, 2]
    assert snaps[-1].lower(1) == snaps[-1].upper(1) == 2


def test_anytime_example_brackets(ex31):
    snaps, _ = _collect(ex31)
    exact, _ = oracle.literal_tallies(ex31)
    assert all(s.lower(l) <= exact[l] <= s.upper(l) for s in snaps for l in exact)


def test_runs_are_deterministic(table1):
    a = [(s.time, s.models_seen, s.nonmodels_seen) for s in _collect(table1)[0]]
    b = [(s.time, s.models_seen, s.nonmodels_seen) for s in _collect(table1)[0]]
    assert a == b
    assert list(iter_paths(table1)) == list(iter_paths(table1))


def test_trace_lines(ex31):
    buf = io.StringIO()
    led = count_ledger(ex31, trace=buf)
    lines = buf.getvalue().splitlines()
    assert len(lines) == led.paths_processed
    k, kind, *lits = lines[0].split()
    assert kind in ("satisfying", "falsifying") and int(k) == len(lits)
