"""p(mtm) against impurity for random 3-CNF at clause ratio 4.26.

    python scripts/sweep_impurity.py --out results/impurity.csv --dat results/impurity.dat
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from typmod.experiments import rows_to_csv, rows_to_gnuplot, sweep

REFERENCE = {0.0: 1.00, 0.5: 0.78, 0.9: 0.99}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--grid", type=float, nargs="+", default=sorted(REFERENCE))
    ap.add_argument("--vars", type=int, default=30)
    ap.add_argument("--samples", type=int, default=500)
    ap.add_argument("--seed", type=int, default=3)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", type=Path)
    ap.add_argument("--dat", type=Path)
    ap.add_argument("--no-timing", action="store_true")
    args = ap.parse_args(argv)

    def progress(row):
        print(f"imp={row.value:g}  p_mtm={row.p_mtm:.3f}  mean_imp={row.mean_imp:.3f}  "
              f"sat={row.sat_count}/{row.samples}  {row.seconds:.0f}s", file=sys.stderr)

    rows = sweep("impurity", args.grid, args.vars, args.samples, args.seed, jobs=args.jobs,
                 allow_large=True, progress=progress)
    text = rows_to_csv(rows, timing=not args.no_timing)
    if args.out:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(text)
    else:
        sys.stdout.write(text)
    if args.dat:
        args.dat.parent.mkdir(parents=True, exist_ok=True)
        args.dat.write_text(rows_to_gnuplot(rows))
    return 0


if __name__ == "__main__":
    sys.exit(main())
