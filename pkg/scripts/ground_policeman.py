"""Write grounded Policeman/Criminal systems S_i over a finite domain as DIMACS.

    python scripts/ground_policeman.py fixtures/

S_0 says Alex is a policeman, Bob a criminal, policemen are neither criminal
nor dangerous, criminals are not helpful.  Each further stage i adds: a
policeman meeting condition i is helpful, a criminal meeting condition i is
dangerous.
"""

import argparse
from pathlib import Path

from typmod.formula import CnfSystem, render_dimacs

DOMAIN = ["Alex", "Bob", "Carl", "Dana"]


def ground(domain_size: int, stages: int) -> CnfSystem:
    people = DOMAIN[:domain_size]
    preds = ["Policeman", "Criminal", "Dangerous", "Helpful"]
    preds += [f"PCond{j}" for j in range(1, stages + 1)]
    preds += [f"CCond{j}" for j in range(1, stages + 1)]
    names = [f"{p}({x})" for x in people for p in preds]
    idx = {n: i for i, n in enumerate(names, 1)}

    def at(p, x):
        return idx[f"{p}({x})"]

    clauses = [(at("Policeman", "Alex"),), (at("Criminal", "Bob"),)]
    for x in people:
        clauses.append((-at("Policeman", x), -at("Criminal", x)))
        clauses.append((-at("Policeman", x), -at("Dangerous", x)))
        clauses.append((-at("Criminal", x), -at("Helpful", x)))
        for j in range(1, stages + 1):
            clauses.append((-at("Policeman", x), -at(f"PCond{j}", x), at("Helpful", x)))
            clauses.append((-at("Criminal", x), -at(f"CCond{j}", x), at("Dangerous", x)))
    return CnfSystem.from_clauses(clauses, len(names), names)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("outdir", type=Path)
    ap.add_argument("--domains", type=int, nargs="+", default=[2, 3])
    ap.add_argument("--stages", type=int, nargs="+", default=[0, 1, 2])
    args = ap.parse_args()
    args.outdir.mkdir(parents=True, exist_ok=True)
    for d in args.domains:
        for i in args.stages:
            path = args.outdir / f"policeman-d{d}-i{i}.cnf"
            path.write_text(render_dimacs(ground(d, i)))
            print(path)


if __name__ == "__main__":
    main()
