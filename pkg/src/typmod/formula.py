"""Propositional systems in CNF, query formulas, and syntactic metrics.

Literals are signed integers in the DIMACS convention: variable ``v`` is the
positive literal ``v`` and its negation is ``-v``.  Variables are numbered
from 1.  A :class:`CnfSystem` keeps an optional name per variable so that
reports can speak about ``p`` or ``Helpful(Alex)`` instead of ``3``.
"""

from __future__ import annotations

import itertools
import logging
import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

log = logging.getLogger("typmod")

Lit = int
Clause = tuple[int, ...]
Model = tuple[int, ...]

# Formulas with at most this many distinct variables are expanded directly.
DIRECT_EXPANSION_LIMIT = 12


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        where = ""
        if line is not None:
            where = f"line {line}: "
        elif col is not None:
            where = f"position {col}: "
        super().__init__(where + message)
        self.line = line
        self.col = col


class InconsistentSystem(ValueError):
    """Raised when an operation needs at least one model and there is none."""


def var(lit: Lit) -> int:
    return lit if lit > 0 else -lit


@dataclass(frozen=True)
class CnfSystem:
    """A set of clauses over variables ``1..num_vars``.

    ``num_base`` is the number of user variables; indices above it are
    auxiliaries introduced by definitional translation.  Auxiliaries are
    functionally determined by the base variables, so model counts over the
    full index range equal counts over the base.
    """

    num_vars: int
    clauses: tuple[Clause, ...]
    names: tuple[str | None, ...] = ()
    num_base: int = -1
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if self.num_base < 0:
            object.__setattr__(self, "num_base", self.num_vars)
        if len(self.names) < self.num_vars:
            pad = (None,) * (self.num_vars - len(self.names))
            object.__setattr__(self, "names", tuple(self.names) + pad)

    @classmethod
    def from_clauses(
        cls,
        clauses: Iterable[Iterable[int]],
        num_vars: int | None = None,
        names: Sequence[str | None] | None = None,
    ) -> "CnfSystem":
        raw = [list(c) for c in clauses]
        if num_vars is None:
            num_vars = max((var(l) for c in raw for l in c), default=0)
            if names:
                num_vars = max(num_vars, len(names))
        kept, warns = normalize_clauses(raw, num_vars)
        return cls(num_vars, tuple(kept), tuple(names or ()), warnings=tuple(warns))

    @property
    def variables(self) -> range:
        return range(1, self.num_base + 1)

    def name(self, v: int) -> str:
        n = self.names[v - 1] if v <= len(self.names) else None
        return n if n is not None else f"v{v}"

    def lit_name(self, lit: Lit) -> str:
        return self.name(var(lit)) if lit > 0 else "-" + self.name(var(lit))

    def index(self, name: str) -> int:
        for i, n in enumerate(self.names, 1):
            if n == name:
                return i
        m = re.fullmatch(r"v(\d+)", name)
        if m and 1 <= int(m.group(1)) <= self.num_vars:
            return int(m.group(1))
        raise KeyError(name)

    def literal(self, text: str) -> Lit:
        """Resolve ``a``, ``-a``, ``!a``, ``~a`` or a signed integer."""
        text = text.strip()
        if re.fullmatch(r"-?\d+", text):
            lit = int(text)
            if lit == 0 or var(lit) > self.num_vars:
                raise KeyError(text)
            return lit
        if text[:1] in "-!~¬":
            return -self.index(text[1:].strip())
        return self.index(text)

    def add_clauses(self, clauses: Iterable[Iterable[int]], num_vars: int | None = None) -> "CnfSystem":
        n = self.num_vars if num_vars is None else num_vars
        extra, warns = normalize_clauses([list(c) for c in clauses], n)
        return CnfSystem(n, self.clauses + tuple(extra), self.names, self.num_base,
                         self.warnings + tuple(warns))

    def add_units(self, lits: Iterable[Lit]) -> "CnfSystem":
        return self.add_clauses([(l,) for l in lits])

    def with_clauses(self, clauses: Iterable[Clause]) -> "CnfSystem":
        return replace(self, clauses=tuple(clauses))

    def satisfied_by(self, model: Mapping[int, bool] | Sequence[int]) -> bool:
        """True if the assignment (literal tuple or var->bool map) satisfies every clause."""
        if isinstance(model, Mapping):
            value = model
        else:
            value = {var(l): l > 0 for l in model}
        for c in self.clauses:
            if not any(value.get(var(l), None) == (l > 0) for l in c):
                return False
        return True


def normalize_clauses(raw: list[list[int]], num_vars: int, lines: Sequence[int] | None = None):
    """Deduplicate literals, drop tautologies, flag duplicate clauses.

    Returns ``(clauses, warning_lines)``; callers decide whether to log them.
    """
    kept: list[Clause] = []
    warns: list[str] = []
    seen: set[frozenset[int]] = set()
    for i, c in enumerate(raw):
        where = f" line={lines[i]}" if lines else ""
        for l in c:
            if l == 0 or var(l) > num_vars:
                raise ParseError(f"variable index {l} out of range 1..{num_vars}",
                                 lines[i] if lines else None)
        lits = tuple(dict.fromkeys(c))
        if any(-l in lits for l in lits):
            msg = f"warning kind=tautology{where} clause=\"{' '.join(map(str, c))}\""
            warns.append(msg)
            continue
        key = frozenset(lits)
        if key in seen:
            msg = f"warning kind=duplicate{where} clause=\"{' '.join(map(str, lits))}\""
            warns.append(msg)
        seen.add(key)
        kept.append(lits)
    return kept, warns


# -- DIMACS ------------------------------------------------------------------

_NAME_LINE = re.compile(r"c\s+var\s+(\d+)\s+(\S+)\s*$")


def parse_dimacs(text: str) -> CnfSystem:
    """Parse DIMACS CNF.  ``c var K name`` comment lines attach names."""
    header = None
    names: dict[int, str] = {}
    clauses: list[list[int]] = []
    starts: list[int] = []
    current: list[int] = []
    current_line = 0
    lineno = 0
    for lineno, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if not s:
            continue
        if s.startswith("c"):
            m = _NAME_LINE.match(s)
            if m:
                names[int(m.group(1))] = m.group(2)
            continue
        if s.startswith("%"):
            break
        if s.startswith("p"):
            parts = s.split()
            if header is not None or len(parts) != 4 or parts[1] != "cnf":
                raise ParseError(f"malformed header {s!r}", lineno)
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise ParseError(f"malformed header {s!r}", lineno) from None
            if header[0] < 0 or header[1] < 0:
                raise ParseError(f"malformed header {s!r}", lineno)
            continue
        if header is None:
            raise ParseError("clause before 'p cnf' header", lineno)
        for tok in s.split():
            try:
                lit = int(tok)
            except ValueError:
                raise ParseError(f"bad token {tok!r}", lineno) from None
            if lit == 0:
                clauses.append(current)
                starts.append(current_line or lineno)
                current = []
                current_line = 0
                continue
            if var(lit) > header[0]:
                raise ParseError(f"variable index {lit} out of range 1..{header[0]}", lineno)
            if not current:
                current_line = lineno
            current.append(lit)
    if header is None:
        raise ParseError("missing 'p cnf' header", lineno or 1)
    if current:
        raise ParseError("clause missing terminating 0", lineno)
    n, c = header
    warns = []
    if len(clauses) != c:
        msg = f"warning kind=clause-count header={c} found={len(clauses)}"
        log.warning(msg)
        warns.append(msg)
    for k in names:
        if not 1 <= k <= n:
            raise ParseError(f"name for variable {k} out of range 1..{n}")
    if len(set(names.values())) != len(names):
        raise ParseError("duplicate variable names")
    kept, more = normalize_clauses(clauses, n, starts)
    for msg in more:
        log.warning(msg)
    return CnfSystem(n, tuple(kept), tuple(names.get(i) for i in range(1, n + 1)),
                     warnings=tuple(warns + more))


def render_dimacs(system: CnfSystem) -> str:
    lines = []
    for v in range(1, system.num_vars + 1):
        nm = system.names[v - 1]
        if nm is not None:
            lines.append(f"c var {v} {nm}")
    lines.append(f"p cnf {system.num_vars} {len(system.clauses)}")
    for c in system.clauses:
        lines.append(" ".join(map(str, c)) + " 0")
    return "\n".join(lines) + "\n"


def read_dimacs(path) -> CnfSystem:
    with open(path, encoding="utf-8") as fh:
        return parse_dimacs(fh.read())


# -- formulas ------------------------------------------------------------------

@dataclass(frozen=True)
class Formula:
    """Parse tree node.  ``op`` is one of atom/not/and/or/implies/iff."""

    op: str
    args: tuple["Formula", ...] = ()
    var: int = 0

    def __invert__(self) -> "Formula":
        return Formula("not", (self,))

    def __and__(self, other: "Formula") -> "Formula":
        return Formula("and", (self, other))

    def __or__(self, other: "Formula") -> "Formula":
        return Formula("or", (self, other))


def atom(v: int) -> Formula:
    return Formula("atom", var=v)


def literal_formula(lit: Lit) -> Formula:
    return atom(lit) if lit > 0 else ~atom(-lit)


def conjunction(parts: Sequence[Formula]) -> Formula:
    if not parts:
        raise ValueError("empty conjunction")
    out = parts[0]
    for p in parts[1:]:
        out = out & p
    return out


def formula_vars(f: Formula) -> set[int]:
    if f.op == "atom":
        return {f.var}
    out: set[int] = set()
    for a in f.args:
        out |= formula_vars(a)
    return out


def evaluate(f: Formula, value: Mapping[int, bool]) -> bool:
    op = f.op
    if op == "atom":
        return value[f.var]
    if op == "not":
        return not evaluate(f.args[0], value)
    a = evaluate(f.args[0], value)
    if op == "and":
        return a and evaluate(f.args[1], value)
    if op == "or":
        return a or evaluate(f.args[1], value)
    if op == "implies":
        return (not a) or evaluate(f.args[1], value)
    if op == "iff":
        return a == evaluate(f.args[1], value)
    raise ValueError(f"unknown operator {op!r}")


_SYMBOL = {"and": "&", "or": "|", "implies": "->", "iff": "<->"}
_PREC = {"iff": 1, "implies": 2, "or": 3, "and": 4, "not": 5, "atom": 6}


def render_formula(f: Formula, system: CnfSystem | None = None, _parent: int = 0) -> str:
    if f.op == "atom":
        return system.name(f.var) if system is not None else f"v{f.var}"
    p = _PREC[f.op]
    if f.op == "not":
        s = "!" + render_formula(f.args[0], system, p)
    else:
        s = (render_formula(f.args[0], system, p + (f.op == "implies"))
             + f" {_SYMBOL[f.op]} "
             + render_formula(f.args[1], system, p + (f.op != "implies")))
    return f"({s})" if p < _parent else s


_TOKEN = re.compile(r"\s*(?:(<->)|(->)|([!&|()~])|([A-Za-z_][A-Za-z0-9_.']*))")


def _tokenize(text: str) -> list[tuple[str, int]]:
    toks = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos:].lstrip()[:1]!r}", col=pos)
        start = m.start(m.lastindex)
        tok = m.group(m.lastindex)
        end = m.end()
        if m.lastindex == 4 and end < len(text) and text[end] == "(":
            # predicate-style atom name such as Helpful(Alex)
            close = text.find(")", end)
            if close < 0:
                raise ParseError("unterminated atom argument list", col=end)
            tok = text[start:close + 1]
            end = close + 1
        toks.append((("!" if tok == "~" else tok), start))
        pos = end
    return toks


class _Parser:
    def __init__(self, text: str, system: CnfSystem):
        self.toks = _tokenize(text)
        self.i = 0
        self.system = system
        self.text = text

    def peek(self):
        return self.toks[self.i][0] if self.i < len(self.toks) else None

    def pos(self):
        return self.toks[self.i][1] if self.i < len(self.toks) else len(self.text)

    def take(self, expected=None):
        tok = self.peek()
        if tok is None or (expected is not None and tok != expected):
            want = repr(expected) if expected else "a term"
            raise ParseError(f"expected {want}, got {tok!r}", col=self.pos())
        self.i += 1
        return tok

    def parse(self) -> Formula:
        f = self.iff()
        if self.peek() is not None:
            raise ParseError(f"unexpected {self.peek()!r}", col=self.pos())
        return f

    def iff(self):
        f = self.implies()
        while self.peek() == "<->":
            self.take()
            f = Formula("iff", (f, self.implies()))
        return f

    def implies(self):
        f = self.disj()
        if self.peek() == "->":
            self.take()
            return Formula("implies", (f, self.implies()))
        return f

    def disj(self):
        f = self.conj()
        while self.peek() == "|":
            self.take()
            f = Formula("or", (f, self.conj()))
        return f

    def conj(self):
        f = self.unary()
        while self.peek() == "&":
            self.take()
            f = Formula("and", (f, self.unary()))
        return f

    def unary(self):
        tok = self.peek()
        if tok == "!":
            self.take()
            return Formula("not", (self.unary(),))
        if tok == "(":
            self.take()
            f = self.iff()
            self.take(")")
            return f
        if tok is None or tok in ("&", "|", "->", "<->", ")"):
            raise ParseError(f"expected an atom, got {tok!r}", col=self.pos())
        at = self.pos()
        self.take()
        try:
            return atom(self.system.index(tok))
        except KeyError:
            raise ParseError(f"unknown atom {tok!r}", col=at) from None


def parse_formula(text: str, system: CnfSystem) -> Formula:
    """Infix grammar: ``! & | -> <->`` with parentheses; ``->`` is right-associative."""
    return _Parser(text, system).parse()


# -- CNF conversion --------------------------------------------------------------

def direct_cnf(f: Formula) -> list[Clause]:
    """Clauses over ``f``'s own variables: one blocking clause per falsifying row."""
    vs = sorted(formula_vars(f))
    out = []
    for bits in itertools.product((True, False), repeat=len(vs)):
        value = dict(zip(vs, bits))
        if not evaluate(f, value):
            out.append(tuple(-v if b else v for v, b in zip(vs, bits)))
    return out


def definitional_cnf(f: Formula, next_var: int) -> tuple[list[Clause], int, Lit]:
    """Equivalence-preserving translation.  Returns (clauses, next free index, root literal)."""
    clauses: list[Clause] = []
    counter = [next_var]

    def enc(g: Formula) -> Lit:
        if g.op == "atom":
            return g.var
        if g.op == "not":
            return -enc(g.args[0])
        a, b = enc(g.args[0]), enc(g.args[1])
        x = counter[0]
        counter[0] += 1
        if g.op == "implies":
            a = -a
        if g.op in ("and",):
            clauses.extend([(-x, a), (-x, b), (x, -a, -b)])
        elif g.op in ("or", "implies"):
            clauses.extend([(x, -a), (x, -b), (-x, a, b)])
        elif g.op == "iff":
            clauses.extend([(-x, -a, b), (-x, a, -b), (x, a, b), (x, -a, -b)])
        return x

    root = enc(f)
    return clauses, counter[0], root


def attach_formula(system: CnfSystem, f: Formula, definitional: bool | None = None) -> CnfSystem:
    """Return ``S ∪ {F}`` in CNF.

    Small formulas are expanded directly over their own variables.  Larger
    ones get auxiliary variables appended after ``system.num_vars``; each
    auxiliary is defined by an equivalence, so the model count is unchanged.
    """
    if definitional is None:
        definitional = len(formula_vars(f)) > DIRECT_EXPANSION_LIMIT
    if not definitional:
        return system.add_clauses(direct_cnf(f))
    cls, nxt, root = definitional_cnf(f, system.num_vars + 1)
    n = nxt - 1
    out = system.add_clauses(cls + [(root,)], num_vars=n)
    # normalization may drop tautologies built from repeated subterms; that is sound
    return out


# -- metrics -------------------------------------------------------------------

@dataclass(frozen=True)
class SyntacticMetrics:
    B: int
    C: int
    ratio: Fraction
    pos: dict[int, int]
    neg: dict[int, int]
    imp_per_variable: dict[int, Fraction]
    imp: Fraction


def metrics(system: CnfSystem) -> SyntacticMetrics:
    B = system.num_vars
    pos = {v: 0 for v in range(1, B + 1)}
    neg = dict(pos)
    for c in system.clauses:
        for l in c:
            if l > 0:
                pos[l] += 1
            else:
                neg[-l] += 1
    imp = {}
    for v in pos:
        hi = max(pos[v], neg[v])
        imp[v] = Fraction(min(pos[v], neg[v]), hi) if hi else Fraction(0)
    C = len(system.clauses)
    return SyntacticMetrics(
        B=B,
        C=C,
        ratio=Fraction(C, B) if B else Fraction(0),
        pos=pos,
        neg=neg,
        imp_per_variable=imp,
        imp=sum(imp.values(), Fraction(0)) / B if B else Fraction(0),
    )
