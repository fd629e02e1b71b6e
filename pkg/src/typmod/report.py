"""Evidence and typicality reports rendered as aligned text, CSV or JSON."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .evidence import EvidenceTable, evidence_all
from .formula import CnfSystem, Lit
from .kernel import KernelVerdict, kernel_verdicts
from .typicality import TypicalityReport, typicality_report

FORMATS = ("table", "csv", "json")


def decimal(x, digits: int = 6) -> str:
    """Display-only decimal with ``digits`` significant digits."""
    if isinstance(x, Fraction):
        x = float(x)
    elif isinstance(x, mpmath.mpf):
        return mpmath.nstr(x, digits)
    return format(x, f".{digits}g")


def fraction_text(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _table(header: list[str], rows: list[list[str]]) -> str:
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(header)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip()]
    for r in rows:
        lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
    return "\n".join(lines) + "\n"


def _csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


# -- evidence ---------------------------------------------------------------------

def render_evidence(system: CnfSystem, table: EvidenceTable, fmt: str = "table") -> str:
    """One row per base variable, evidence of its positive literal."""
    rows = []
    for v in table.variables:
        e = table.evidence(v)
        rows.append((system.name(v), e))
    header = ["variable", "E_num", "E_den", "E_decimal"]
    if fmt == "csv":
        return _csv(header, [[n, e.numerator, e.denominator, decimal(e)] for n, e in rows])
    if fmt == "json":
        return _json({
            "models": table.total_models,
            "evidence": [{"variable": n, "E_num": e.numerator, "E_den": e.denominator,
                          "E_decimal": float(e)} for n, e in rows],
        })
    body = [[n, str(e.numerator), str(e.denominator), decimal(e)] for n, e in rows]
    return f"models: {table.total_models}\n" + _table(header, body)


# -- typical report ---------------------------------------------------------------

@dataclass(frozen=True)
class FullReport:
    system: CnfSystem
    typicality: TypicalityReport
    kernel: list[KernelVerdict] | None  # None when auxiliary variables rule the check out

    @property
    def kernel_atoms(self) -> list[Lit] | None:
        if self.kernel is None:
            return None
        return [k.atom for k in self.kernel if k.is_kernel]


def full_report(system: CnfSystem, table: EvidenceTable | None = None) -> FullReport:
    if table is None:
        table = evidence_all(system)
    typ = typicality_report(system, table)
    kern = kernel_verdicts(system, table) if system.num_vars == system.num_base else None
    return FullReport(system, typ, kern)


def _atom_rows(rep: FullReport) -> list[dict]:
    s, t = rep.system, rep.typicality
    verdicts = {k.atom: k for k in rep.kernel} if rep.kernel is not None else {}
    rows = []
    for atom in t.typical:
        e = t.table.evidence(atom)
        k = verdicts.get(atom)
        rows.append({
            "atom": s.lit_name(atom),
            "E": fraction_text(e),
            "E_decimal": decimal(e),
            "neutral": t.table.neutral(abs(atom)),
            "n1": None if k is None else k.n1,
            "n2": None if k is None else k.n2,
            "kernel": None if k is None else k.is_kernel,
        })
    return rows


def _summary(rep: FullReport) -> dict:
    s, t = rep.system, rep.typicality
    st = t.stats
    return {
        "models": t.table.total_models,
        "mtm": None if t.mtm is None else [s.lit_name(l) for l in t.mtm],
        "kernel": None if rep.kernel_atoms is None else [s.lit_name(l) for l in rep.kernel_atoms],
        "neutral": [s.name(v) for v in t.neutral],
        "mean_typical_evidence": fraction_text(st.mean_typical_evidence),
        "er_mtm": fraction_text(st.er_mtm),
        "er_rand": fraction_text(st.er_rand),
        "er_worst": fraction_text(st.er_worst),
        "pmtm_estimate": decimal(t.pmtm.estimate),
        "pmtm_lower": decimal(t.pmtm.lower),
        "pmtm_upper": decimal(t.pmtm.upper),
    }


def _flag(x) -> str:
    return "-" if x is None else ("yes" if x is True else "no" if x is False else str(x))


def render_typical(rep: FullReport, fmt: str = "table") -> str:
    rows = _atom_rows(rep)
    summary = _summary(rep)
    if fmt == "json":
        return _json({"atoms": rows, "summary": summary})
    header = ["atom", "E", "E_decimal", "neutral", "n1", "n2", "kernel"]
    if fmt == "csv":
        return _csv(header, [[r[h] if r[h] is not None else "" for h in header] for r in rows])
    body = [[_flag(r[h]) if h in ("neutral", "n1", "n2", "kernel") else r[h] for h in header] for r in rows]
    out = [_table(header, body)]
    for key, val in summary.items():
        if isinstance(val, list):
            val = "{" + ", ".join(val) + "}"
        elif val is None:
            val = "none"
        out.append(f"{key}: {val}\n")
    return "".join(out)
