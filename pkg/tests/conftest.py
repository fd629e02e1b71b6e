from __future__ import annotations

import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from typmod.formula import CnfSystem, read_dimacs  # noqa: E402

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

# PASS/FAIL lines from the acceptance tests, repeated after the run
ACCEPTANCE: list[str] = []

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def ex31() -> CnfSystem:
    return read_dimacs(FIXTURES / "ex31.cnf")


@pytest.fixture
def table1() -> CnfSystem:
    return read_dimacs(FIXTURES / "table1.cnf")


@pytest.fixture
def table1_prime() -> CnfSystem:
    return read_dimacs(FIXTURES / "table1-prime.cnf")


@st.composite
def systems(draw, max_vars: int = 8, max_clauses: int = 14, max_width: int = 3, min_vars: int = 1):
    """Small random CNF systems, each clause over distinct variables."""
    n = draw(st.integers(min_vars, max_vars))
    clause = st.lists(st.integers(1, n), min_size=1, max_size=min(max_width, n), unique=True).flatmap(
        lambda vs: st.tuples(*[st.sampled_from((v, -v)) for v in vs]))
    clauses = draw(st.lists(clause, max_size=max_clauses))
    return CnfSystem.from_clauses(clauses, n)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda l: int(l.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
