from __future__ import annotations

import itertools
from fractions import Fraction

import pytest
from conftest import systems
from hypothesis import given
from hypothesis import strategies as st

import oracle
from typmod.counter import count_models
from typmod.formula import (CnfSystem, Formula, ParseError, atom, attach_formula,
                            definitional_cnf, direct_cnf, evaluate, formula_vars,
                            metrics, parse_dimacs, parse_formula, render_dimacs,
                            render_formula)

EX31_TEXT = "p cnf 3 4\n1 2 0\n2 3 0\n3 1 0\n-1 -2 -3 0\n"


def named(n: int, names: str) -> CnfSystem:
    return CnfSystem.from_clauses([], n, list(names))


# -- DIMACS -----------------------------------------------------------------------

def test_parse_example_system():
    s = parse_dimacs(EX31_TEXT)
    assert s.num_vars == 3
    assert s.clauses == ((1, 2), (2, 3), (3, 1), (-1, -2, -3))
    assert metrics(s).ratio == Fraction(4, 3)


def test_parse_empty_system():
    s = parse_dimacs("p cnf 1 0\n")
    assert s.num_vars == 1 and s.clauses == ()


def test_tautology_dropped_with_warning(caplog):
    s = parse_dimacs("p cnf 2 1\n1 -1 0\n")
    assert s.clauses == ()
    assert any("kind=tautology" in w and "line=2" in w for w in s.warnings)


def test_duplicate_literals_merged():
    s = parse_dimacs("p cnf 2 1\n1 1 2 0\n")
    assert s.clauses == ((1, 2),)


def test_clause_may_span_lines_and_percent_ends_input():
    s = parse_dimacs("c hello\np cnf 3 2\n1 2\n3 0 -1\n0\n%\n0\n")
    assert s.clauses == ((1, 2, 3), (-1,))


def test_clause_count_mismatch_is_a_warning():
    s = parse_dimacs("p cnf 2 3\n1 2 0\n")
    assert any("kind=clause-count" in w for w in s.warnings)


@pytest.mark.parametrize("text, line", [
    ("p cnf x 2\n1 0\n", 1),
    ("p cnf 2\n", 1),
    ("p cnf 2 1\n1 3 0\n", 2),
    ("p cnf 2 2\n1 2 0\n-1\n", 3),
    ("1 2 0\n", 1),
    ("p cnf 2 1\n1 q 0\n", 2),
])
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(ParseError) as err:
        parse_dimacs(text)
    assert err.value.line == line


def test_names_from_comments():
    s = parse_dimacs("c var 1 alpha\nc var 2 Helpful(Alex)\np cnf 2 1\n1 -2 0\n")
    assert s.name(1) == "alpha" and s.index("Helpful(Alex)") == 2
    assert s.name(2) == "Helpful(Alex)" and s.index("v1") == 1


@given(systems())
def test_render_parse_round_trip(s):
    back = parse_dimacs(render_dimacs(s))
    assert back.num_vars == s.num_vars
    assert set(map(frozenset, back.clauses)) == set(map(frozenset, s.clauses))


# -- formula grammar ----------------------------------------------------------------

def test_conjunction_node():
    s = named(3, "abc")
    f = parse_formula("a & !b", s)
    assert f == Formula("and", (atom(1), Formula("not", (atom(2),))))


def test_biconditional_with_grouped_implication():
    s = named(3, "pqr")
    f = parse_formula("(p -> q) <-> r", s)
    assert f.op == "iff" and f.args[0].op == "implies" and f.args[1] == atom(3)


def test_precedence_and_right_associativity():
    s = named(3, "abc")
    assert parse_formula("a | b & c", s) == atom(1) | (atom(2) & atom(3))
    f = parse_formula("a -> b -> c", s)
    assert f == Formula("implies", (atom(1), Formula("implies", (atom(2), atom(3)))))
    assert parse_formula("~a", s) == ~atom(1)


def test_unknown_atom_reports_position():
    with pytest.raises(ParseError) as err:
        parse_formula("a & z", named(3, "abc"))
    assert "unknown atom 'z'" in str(err.value) and err.value.col == 4


@pytest.mark.parametrize("text", ["a &", "(a | b", "a b", "& a", ""])
def test_syntax_errors(text):
    with pytest.raises(ParseError):
        parse_formula(text, named(3, "abc"))


def test_predicate_style_atom_names():
    s = CnfSystem.from_clauses([], 2, ["Helpful(Alex)", "Dangerous(Bob)"])
    assert parse_formula("Helpful(Alex) & !Dangerous(Bob)", s) == atom(1) & ~atom(2)


formulas = st.recursive(
    st.integers(1, 4).map(atom),
    lambda kids: st.one_of(
        kids.map(lambda f: ~f),
        st.tuples(st.sampled_from(["and", "or", "implies", "iff"]), kids, kids)
        .map(lambda t: Formula(t[0], (t[1], t[2])))),
    max_leaves=8)


@given(formulas)
def test_render_then_parse_preserves_truth_table(f):
    s = named(4, "abcd")
    g = parse_formula(render_formula(f, s), s)
    for bits in itertools.product((False, True), repeat=4):
        value = dict(zip(range(1, 5), bits))
        assert evaluate(f, value) == evaluate(g, value)


@given(formulas)
def test_direct_cnf_equivalent(f):
    cls = direct_cnf(f)
    for bits in itertools.product((False, True), repeat=4):
        value = dict(zip(range(1, 5), bits))
        a = tuple(v if value[v] else -v for v in range(1, 5))
        assert oracle.satisfies(a, cls) == evaluate(f, value)


@given(systems(max_vars=6, max_clauses=8), formulas)
def test_definitional_translation_preserves_count(s, f):
    s = CnfSystem.from_clauses(s.clauses, max(s.num_vars, 4))
    expected = sum(evaluate(f, {abs(l): l > 0 for l in m}) for m in oracle.models(s))
    ext = attach_formula(s, f, definitional=True)
    assert ext.num_base == s.num_vars
    assert count_models(ext) == expected
    assert oracle.count(ext) == expected  # auxiliaries are functionally determined
    assert count_models(attach_formula(s, f, definitional=False)) == expected


def test_definitional_aux_variables_follow_originals():
    cls, nxt, root = definitional_cnf(atom(1) & atom(2), 3)
    assert root == 3 and nxt == 4
    assert all(abs(l) <= 3 for c in cls for l in c)


def test_attach_unit_literal(ex31):
    assert count_models(attach_formula(ex31, parse_formula("a", ex31))) == 2


def test_attach_contradiction():
    s = named(1, "a")
    assert count_models(attach_formula(s, parse_formula("a & !a", s))) == 0


def test_attach_entailed_formula_keeps_count(ex31):
    assert count_models(attach_formula(ex31, parse_formula("a | b | c", ex31))) == 3


def test_large_formula_goes_definitional():
    s = CnfSystem.from_clauses([], 14)
    f = atom(1)
    for v in range(2, 15):
        f = f | atom(v)
    ext = attach_formula(s, f)
    assert ext.num_vars > 14 and ext.num_base == 14
    assert count_models(ext) == 2 ** 14 - 1
    assert formula_vars(f) == set(range(1, 15))


# -- metrics --------------------------------------------------------------------

def test_impurity_hand_example():
    m = metrics(CnfSystem.from_clauses([(1, 2), (-1, 2)], 2))
    assert m.imp_per_variable == {1: 1, 2: 0}
    assert m.imp == Fraction(1, 2)


def test_pure_system_has_zero_impurity():
    assert metrics(CnfSystem.from_clauses([(1, 2), (2, 3), (1, 3)], 3)).imp == 0


def test_unused_variable_counts_with_zero_impurity():
    m = metrics(CnfSystem.from_clauses([(1,), (-1,)], 2))
    assert m.imp_per_variable[2] == 0 and m.imp == Fraction(1, 2)


@given(systems())
def test_impurity_bounds(s):
    m = metrics(s)
    assert 0 <= m.imp <= 1
    assert all(0 <= x <= 1 for x in m.imp_per_variable.values())


@given(st.integers(-50, 50).filter(bool))
def test_negation_involution(l):
    assert -(-l) == l
    assert ~~atom(abs(l)) == Formula("not", (Formula("not", (atom(abs(l)),)),))
