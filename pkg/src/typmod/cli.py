"""Command-line front end.

Exit codes: 0 success, 1 usage or input error, 2 inconsistent system,
3 refused by a resource guard.  Every option listed in ``ENV_OPTIONS`` can
also be set through a ``TYPMOD_<NAME>`` environment variable; flags win.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from fractions import Fraction

from . import __version__
from .approximation import early_typical, surrounding_evidence
from .counter import BRANCHING, count_ledger
from .evidence import evidence_all, evidence_of
from .experiments import (GenConfig, GenerationError, gen_random_cnf,
                          rows_to_csv, rows_to_gnuplot, solve_m0, sweep)
from .formula import (CnfSystem, InconsistentSystem, ParseError, metrics,
                      parse_dimacs, parse_formula, render_dimacs)
from .kernel import NotTypical, check_stability, kernel_verdicts
from .report import (FORMATS, _csv, _json, _table, decimal, fraction_text,
                     full_report, render_evidence, render_typical)
from .session import NONOBLIVIOUS, OBLIVIOUS, SessionState, answer_oblivious
from .typicality import CapExceeded, typical_models

EXIT_OK, EXIT_USAGE, EXIT_INCONSISTENT, EXIT_GUARD = 0, 1, 2, 3
WARN_VARIABLES = 60
ENV_PREFIX = "TYPMOD_"
log = logging.getLogger("typmod")
ENV_OPTIONS = {"format": str, "seed": int, "jobs": int, "floor": str, "cap": int, "branching": str}


class UsageError(Exception):
    pass


class GuardRefusal(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _env_default(name: str, fallback):
    raw = os.environ.get(ENV_PREFIX + name.upper())
    if raw is None:
        return fallback
    try:
        return ENV_OPTIONS[name](raw)
    except ValueError:
        raise UsageError(f"bad value {raw!r} in {ENV_PREFIX}{name.upper()}") from None


def _read_system(path: str) -> CnfSystem:
    text = sys.stdin.read() if path == "-" else _read_text(path)
    system = parse_dimacs(text)
    if system.num_base > WARN_VARIABLES:
        log.warning(f"warning kind=size variables={system.num_base} note=\"exact counting may take very long\"")
    return system


def _read_text(path: str) -> str:
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a number: {text!r}") from None


def _probability(text: str) -> Fraction:
    x = _fraction(text)
    if not 0 <= x <= 1:
        raise UsageError(f"floor must lie in [0, 1], got {text}")
    return x


def _emit(text: str) -> None:
    sys.stdout.write(text)


# -- subcommands --------------------------------------------------------------------

def cmd_count(args) -> int:
    system = _read_system(args.input)
    if not args.ledger:
        if args.format == "json":
            _emit(_json({"models": count_ledger(system, args.branching).total_models}))
        else:
            _emit(f"{count_ledger(system, args.branching).total_models}\n")
        return EXIT_OK
    led = count_ledger(system, args.branching)
    header = ["literal", "models_with", "nonmodels_with"]
    rows = []
    for v in system.variables:
        for lit in (v, -v):
            rows.append([system.lit_name(lit), led.models_with[lit], led.nonmodels_with[lit]])
    if args.format == "json":
        _emit(_json({"models": led.total_models, "nonmodels": led.total_nonmodels,
                     "paths": led.paths_processed,
                     "literals": [dict(zip(header, r)) for r in rows]}))
    elif args.format == "csv":
        _emit(_csv(header, rows))
    else:
        _emit(f"models: {led.total_models}\nnonmodels: {led.total_nonmodels}\n"
              + _table(header, [[str(c) for c in r] for r in rows]))
    return EXIT_OK


def cmd_evidence(args) -> int:
    system = _read_system(args.input)
    if args.formula:
        f = parse_formula(args.formula, system)
        e = evidence_of(system, f)
        if args.format == "json":
            _emit(_json({"formula": args.formula, "E": fraction_text(e), "E_decimal": float(e)}))
        elif args.format == "csv":
            _emit(_csv(["formula", "E_num", "E_den", "E_decimal"],
                       [[args.formula, e.numerator, e.denominator, decimal(e)]]))
        else:
            _emit(f"{fraction_text(e)} ({decimal(e)})\n")
        return EXIT_OK
    _emit(render_evidence(system, evidence_all(system, args.branching), args.format))
    return EXIT_OK


def cmd_typical(args) -> int:
    system = _read_system(args.input)
    _emit(render_typical(full_report(system, evidence_all(system, args.branching)), args.format))
    return EXIT_OK


def cmd_kernel(args) -> int:
    system = _read_system(args.input)
    if args.stability:
        rep = check_stability(system, parse_formula(args.stability, system))
        header = ["atom", "status"]
        rows = [[system.lit_name(a.atom), a.status] for a in rep.atoms]
        if args.format == "json":
            _emit(_json({"kernel_before": [system.lit_name(l) for l in rep.kernel_before],
                         "kernel_after": [system.lit_name(l) for l in rep.kernel_after],
                         "atoms": [dict(zip(header, r)) for r in rows],
                         "violations": len(rep.violations)}))
        elif args.format == "csv":
            _emit(_csv(header, rows))
        else:
            _emit(_table(header, rows) + f"violations: {len(rep.violations)}\n")
        return EXIT_OK
    try:
        verdicts = kernel_verdicts(system)
    except InconsistentSystem:
        raise
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    header = ["atom", "n1", "n2", "kernel"]
    rows = [[system.lit_name(k.atom), k.n1, k.n2, k.is_kernel] for k in verdicts]
    if args.format == "json":
        _emit(_json([dict(zip(header, r)) for r in rows]))
    elif args.format == "csv":
        _emit(_csv(header, rows))
    else:
        _emit(_table(header, [[a, str(n1), str(n2), "yes" if k else "no"] for a, n1, n2, k in rows]))
    return EXIT_OK


def _belief_line(b, system) -> str:
    d = b.as_dict(system)
    return f"{d['verdict']}  {d['evidence']} ({decimal(b.evidence)})  mode={b.mode}  step={b.index}"


def _run_batch(args, system, floor) -> int:
    queries = [q.strip() for q in _read_text(args.queries).splitlines()]
    queries = [q for q in queries if q and not q.startswith("#")]
    formulas = [parse_formula(q, system) for q in queries]
    if args.mode == OBLIVIOUS:
        ans = answer_oblivious(system, formulas, floor)
        trail, consistent = ans.beliefs, ans.jointly_consistent
    else:
        state = SessionState(system, NONOBLIVIOUS, floor)
        trail = [state.ask(f) for f in formulas]
        consistent = state.consistent()
    _emit(_json({"mode": args.mode, "floor": fraction_text(floor),
                 "trail": [b.as_dict(system) for b in trail],
                 "jointly_consistent": consistent}))
    return EXIT_OK


def _run_repl(args, system, floor) -> int:
    state = SessionState(system, args.mode, floor)
    interactive = sys.stdin.isatty()
    while True:
        if interactive:
            print("> ", end="", flush=True)
        line = sys.stdin.readline()
        if not line:
            return EXIT_OK
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith(":"):
            cmd, _, rest = line.partition(" ")
            rest = rest.strip()
            if cmd == ":quit":
                return EXIT_OK
            elif cmd == ":mode" and rest in (OBLIVIOUS, NONOBLIVIOUS):
                state.mode = rest
                print(f"mode={rest}")
            elif cmd == ":floor" and rest:
                try:
                    state.floor = _probability(rest)
                except UsageError as exc:
                    print(f"error: {exc}")
                    continue
                print(f"floor={fraction_text(state.floor)}")
            elif cmd == ":trail":
                for b in state.trail:
                    print(f"{b.index}. {b.as_dict(system)['query']}: {_belief_line(b, system)}")
            elif cmd == ":check":
                print("consistent" if state.consistent() else "inconsistent")
            elif cmd == ":reset":
                state.reset()
                print("reset")
            else:
                print("commands: :mode oblivious|nonoblivious, :floor X, :trail, :check, :reset, :quit")
            continue
        try:
            b = state.ask(parse_formula(line, state.base))
        except ParseError as exc:
            print(f"error: {exc}")
            continue
        except InconsistentSystem as exc:
            print(f"error: {exc}")
            continue
        print(_belief_line(b, system), flush=True)


def cmd_session(args) -> int:
    system = _read_system(args.input)
    floor = _probability(args.floor)
    if not evidence_all(system).total_models:
        raise InconsistentSystem("system has no models")
    if args.queries:
        return _run_batch(args, system, floor)
    return _run_repl(args, system, floor)


def cmd_approx(args) -> int:
    system = _read_system(args.input)
    if args.early:
        decisions = early_typical(system, args.branching)
        header = ["variable", "value", "tau0", "tau_f", "lower", "upper"]
        rows = [[system.name(d.variable), system.lit_name(d.value), d.tau0, d.tau_f,
                 fraction_text(d.lower), fraction_text(d.upper)] for d in decisions.values()]
    else:
        if not args.literal:
            raise UsageError("approx needs --literal or --early")
        lit = system.literal(args.literal)
        exact = evidence_all(system).evidence(lit) if args.exact else None
        header = ["order", "clauses", "variables", "saturated", "approx", "exact", "epsilon", "credible"]
        rows = []
        for i in range(1, args.order + 1):
            se = surrounding_evidence(system, lit, i, exact)
            rows.append([i, len(se.surrounding.clause_ids), se.surrounding.subsystem.num_vars,
                         se.surrounding.saturated, fraction_text(se.approx),
                         "" if exact is None else fraction_text(exact),
                         "" if se.epsilon is None else fraction_text(se.epsilon),
                         "" if se.credible is None else se.credible])
    if args.format == "json":
        _emit(_json([dict(zip(header, r)) for r in rows]))
    elif args.format == "csv":
        _emit(_csv(header, rows))
    else:
        _emit(_table(header, [[str(c) for c in r] for r in rows]))
    return EXIT_OK


def cmd_gen(args) -> int:
    if args.clauses is None and args.ratio is None:
        raise UsageError("gen needs --clauses or --ratio")
    C = args.clauses if args.clauses is not None else round(args.ratio * args.vars)
    try:
        cfg = GenConfig(args.vars, C, args.width, args.imp, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    system = gen_random_cnf(cfg)
    m = metrics(system)
    _emit(f"c seed {args.seed} ratio {float(m.ratio):.4g} imp {float(m.imp):.4g}\n" + render_dimacs(system))
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.vars > 40 and not args.allow_large:
        raise GuardRefusal(f"B={args.vars} exceeds the desk-scale limit of 40; pass --allow-large")

    def progress(row):
        print(f"{row.axis}={row.value:g}: p_mtm={row.p_mtm:.3f} er_mtm={row.mean_er_mtm:.3f} "
              f"sat={row.sat_count}/{row.samples} {row.seconds:.1f}s", file=sys.stderr, flush=True)

    rows = sweep(args.axis, args.grid, args.vars, args.samples, args.seed, args.width,
                 args.jobs, branching=args.branching, allow_large=args.allow_large,
                 progress=None if args.quiet else progress)
    text = rows_to_csv(rows, timing=not args.no_timing)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        _emit(text)
    if args.dat:
        with open(args.dat, "w") as fh:
            fh.write(rows_to_gnuplot(rows))
    return EXIT_OK


def cmd_solve_m0(args) -> int:
    sol = solve_m0(args.vars)
    d = {"B": sol.B, "phi_star": decimal(sol.phi_star, 15), "M0": decimal(sol.M0, 15),
         "residual": decimal(sol.residual, 3)}
    if args.format == "json":
        _emit(_json(d))
    elif args.format == "csv":
        _emit(_csv(list(d), [list(d.values())]))
    else:
        _emit("".join(f"{k}: {v}\n" for k, v in d.items()))
    return EXIT_OK


def cmd_typical_models(args) -> int:
    system = _read_system(args.input)
    cap = args.cap
    table = evidence_all(system, args.branching)
    if table.total_models > cap:
        if not args.force:
            raise GuardRefusal(f"{table.total_models} models exceed --cap {cap}; pass --force to enumerate")
        cap = table.total_models
    try:
        models = typical_models(system, cap, table)
    except CapExceeded as exc:
        raise GuardRefusal(str(exc)) from None
    names = [[system.lit_name(l) for l in m] for m in models]
    if args.format == "json":
        _emit(_json(names))
    elif args.format == "csv":
        _emit(_csv([system.name(v) for v in system.variables],
                   [[int(l > 0) for l in m] for m in models]))
    else:
        _emit("".join("{" + ", ".join(n) + "}\n" for n in names))
    return EXIT_OK


# -- argument parsing ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default=_env_default("format", "table"))
    common.add_argument("--branching", choices=sorted(BRANCHING), default=_env_default("branching", "static"))
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="typmod", description="Typical atoms, typical models and evidence by exact model counting.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_, needs_input=True):
        sp = sub.add_parser(name, parents=[common], help=help_, description=help_)
        if needs_input:
            sp.add_argument("input", help="DIMACS file, or - for standard input")
        sp.set_defaults(func=func)
        return sp

    sp = add("count", cmd_count, "count models")
    sp.add_argument("--ledger", action="store_true", help="also show per-literal model and non-model counts")

    sp = add("evidence", cmd_evidence, "evidence of every variable, or of one formula")
    sp.add_argument("--formula", help="formula such as 'a & !b -> c'")

    add("typical", cmd_typical, "typical atoms, most typical model, kernel and erratum statistics")

    sp = add("kernel", cmd_kernel, "kernel verdicts per typical atom")
    sp.add_argument("--stability", metavar="PHI", help="check which kernel atoms survive adding PHI")

    sp = add("session", cmd_session, "answer queries one by one (interactive) or from a file")
    sp.add_argument("--mode", choices=(OBLIVIOUS, NONOBLIVIOUS), default=NONOBLIVIOUS)
    sp.add_argument("--floor", default=_env_default("floor", "0"),
                    help="abstain when |E - 1/2| is below this value")
    sp.add_argument("--queries", help="file with one formula per line; prints the trail as JSON")

    sp = add("approx", cmd_approx, "evidence from surroundings, or early typical-atom decisions")
    sp.add_argument("--literal", help="literal such as a or -a")
    sp.add_argument("--order", type=int, default=1, help="largest surrounding order to report")
    sp.add_argument("--exact", action="store_true", help="compare with the exact evidence")
    sp.add_argument("--early", action="store_true", help="decide typical atoms from running bounds")
    sp.set_defaults(branching=_env_default("branching", "fail-first"))

    sp = add("gen", cmd_gen, "random CNF in DIMACS form", needs_input=False)
    sp.add_argument("--vars", type=int, required=True)
    sp.add_argument("--clauses", type=int)
    sp.add_argument("--ratio", type=float)
    sp.add_argument("--width", type=int, default=3)
    sp.add_argument("--imp", type=float, help="target impurity")
    sp.add_argument("--seed", type=int, default=_env_default("seed", 0))

    sp = add("sweep", cmd_sweep, "p(mtm) and ER(mtm) along clause ratio or impurity", needs_input=False)
    sp.add_argument("--axis", choices=("ratio", "impurity"), required=True)
    sp.add_argument("--grid", type=float, nargs="+", required=True)
    sp.add_argument("--vars", type=int, default=30)
    sp.add_argument("--samples", type=int, default=500, help="satisfiable instances per grid point")
    sp.add_argument("--width", type=int, default=3)
    sp.add_argument("--seed", type=int, default=_env_default("seed", 0))
    sp.add_argument("--jobs", type=int, default=_env_default("jobs", 1))
    sp.add_argument("--out", help="CSV path (default: standard output)")
    sp.add_argument("--dat", help="also write a gnuplot data file")
    sp.add_argument("--allow-large", action="store_true", help="lift the B <= 40 guard")
    sp.add_argument("--no-timing", action="store_true", help="write 0 in the seconds column")
    sp.add_argument("--quiet", action="store_true")
    sp.set_defaults(branching=_env_default("branching", "frequency"))

    sp = add("solve-m0", cmd_solve_m0, "model count at which estimated p(mtm) is smallest", needs_input=False)
    sp.add_argument("--vars", type=int, required=True)

    sp = add("typical-models", cmd_typical_models, "list typical models (enumerates every model)")
    sp.add_argument("--cap", type=int, default=_env_default("cap", 10000))
    sp.add_argument("--force", action="store_true", help="enumerate even beyond --cap")
    return p


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(format="%(message)s", level=logging.WARNING, stream=sys.stderr)
    try:
        args = build_parser().parse_args(argv)
        if args.verbose:
            log.setLevel(logging.INFO)
        return args.func(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except (UsageError, ParseError, NotTypical, GenerationError, ValueError) as exc:
        if isinstance(exc, InconsistentSystem):
            print(f"typmod: inconsistent: {exc}", file=sys.stderr)
            return EXIT_INCONSISTENT
        print(f"typmod: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GuardRefusal as exc:
        print(f"typmod: refused: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except BrokenPipeError:
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
