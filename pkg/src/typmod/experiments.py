"""Random CNF generation and the p(mtm) / ER(mtm) sweeps."""

from __future__ import annotations

import csv
import hashlib
import io
import math
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import mpmath

from .counter import count_ledger, find_model
from .formula import CnfSystem, metrics

PHASE_RATIO = 4.26
IMPURITY_TOLERANCE = 0.02
CSV_FIELDS = ["axis", "value", "B", "samples", "sat_count", "p_mtm", "mean_er_mtm",
              "mean_model_count", "seconds"]


class GenerationError(RuntimeError):
    pass


@dataclass(frozen=True)
class GenConfig:
    B: int
    C: int
    clause_width: int = 3
    target_impurity: float | None = None
    seed: int = 0

    def __post_init__(self):
        if not 1 <= self.clause_width <= self.B:
            raise ValueError(f"clause width {self.clause_width} not in 1..{self.B}")
        if self.C < 0:
            raise ValueError("negative clause count")
        if self.target_impurity is not None and not 0 <= self.target_impurity <= 1:
            raise ValueError("target impurity must lie in [0, 1]")


def _imp_options(o: int) -> list[float]:
    return [m / (o - m) for m in range(o // 2 + 1)] if o else [0.0]


def _expected_imp(options: list[float], aim: float) -> float:
    # mixing the two achievable ratios around ``aim`` hits it exactly, up to the cap
    return min(aim, options[-1])


def _calibrate(occ: list[int], target: float) -> float:
    """Per-variable aim so that the mean expected impurity equals ``target``."""
    opts = [_imp_options(o) for o in occ]

    def mean_for(aim):
        return sum(_expected_imp(op, aim) for op in opts) / len(opts)

    lo, hi = 0.0, 1.0
    if mean_for(hi) < target - 1e-12:
        return math.nan
    for _ in range(60):
        mid = (lo + hi) / 2
        if mean_for(mid) < target:
            lo = mid
        else:
            hi = mid
    return hi


def _minority_count(o: int, aim: float, rng: random.Random) -> int:
    opts = _imp_options(o)
    if aim <= opts[0]:
        return 0
    if aim >= opts[-1]:
        return len(opts) - 1
    hi = next(i for i, r in enumerate(opts) if r >= aim)
    lo = hi - 1
    p = (aim - opts[lo]) / (opts[hi] - opts[lo])
    return hi if rng.random() < p else lo


def _draw(config: GenConfig, rng: random.Random) -> list[tuple[int, ...]]:
    B, w = config.B, config.clause_width
    var_sets = [rng.sample(range(1, B + 1), w) for _ in range(config.C)]
    if config.target_impurity is None:
        return [tuple(v if rng.random() < 0.5 else -v for v in vs) for vs in var_sets]
    slots: dict[int, list[tuple[int, int]]] = {v: [] for v in range(1, B + 1)}
    for ci, vs in enumerate(var_sets):
        for pi, v in enumerate(vs):
            slots[v].append((ci, pi))
    aim = _calibrate([len(slots[v]) for v in range(1, B + 1)], config.target_impurity)
    if math.isnan(aim):
        aim = 1.0  # beyond this draw's ceiling: push every variable to its most balanced split
    signs = [[1] * w for _ in range(config.C)]
    for v in range(1, B + 1):
        o = len(slots[v])
        m = _minority_count(o, aim, rng)
        majority = 1 if rng.random() < 0.5 else -1
        minority = set(rng.sample(range(o), m))
        for k, (ci, pi) in enumerate(slots[v]):
            signs[ci][pi] = -majority if k in minority else majority
    return [tuple(s * v for s, v in zip(sg, vs)) for sg, vs in zip(signs, var_sets)]


def gen_random_cnf(config: GenConfig, max_tries: int = 200) -> CnfSystem:
    """Uniform random ``clause_width``-CNF, optionally steered to a target impurity.

    Without a target every literal sign is a fair coin.  With one, each
    variable's occurrences are split into a majority and minority polarity
    whose ratio aims at a calibrated per-variable value; drafts whose
    impurity misses the target by more than 0.02 are redrawn.
    """
    rng = random.Random(config.seed)
    for _ in range(max_tries):
        clauses = _draw(config, rng)
        system = CnfSystem(config.B, tuple(clauses))
        if config.target_impurity is None:
            return system
        if abs(float(metrics(system).imp) - config.target_impurity) <= IMPURITY_TOLERANCE:
            return system
    raise GenerationError(f"no draw within {IMPURITY_TOLERANCE} of impurity "
                          f"{config.target_impurity} after {max_tries} tries")


def instance_seed(master: int, grid_index: int, j: int) -> int:
    digest = hashlib.blake2b(f"{master}/{grid_index}/{j}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big")


# -- per-instance measurement ----------------------------------------------------

@dataclass(frozen=True)
class InstanceResult:
    satisfiable: bool
    models: int
    has_mtm: bool
    er_mtm: Fraction | None
    imp: Fraction


def measure(system: CnfSystem, branching: str = "frequency") -> InstanceResult:
    """Model count, most-typical-model existence and its erratum for one system."""
    imp = metrics(system).imp
    led = count_ledger(system, branching)
    M = led.total_models
    if M == 0:
        return InstanceResult(False, 0, False, None, imp)
    B = system.num_vars
    typical = []
    mean = Fraction(0)
    for v in range(1, B + 1):
        k = led.models_with[v]
        if 2 * k >= M:
            typical.append(v)
            mean += k
        else:
            typical.append(-v)
            mean += M - k
    mean /= M * B
    has = find_model(system.add_units(typical), branching) is not None
    return InstanceResult(True, M, has, (1 - mean) if has else None, imp)


@dataclass(frozen=True)
class _Job:
    axis: str
    value: float
    B: int
    width: int
    seed: int
    branching: str


def _run_job(job: _Job) -> InstanceResult:
    if job.axis == "ratio":
        cfg = GenConfig(job.B, round(job.value * job.B), job.width, None, job.seed)
    else:
        cfg = GenConfig(job.B, round(PHASE_RATIO * job.B), job.width, job.value, job.seed)
    return measure(gen_random_cnf(cfg), job.branching)


@dataclass
class ExperimentRow:
    axis: str
    value: float
    B: int
    samples: int  # instances generated
    sat_count: int
    mtm_count: int
    p_mtm: float
    mean_er_mtm: float
    mean_model_count: float
    mean_imp: float
    seconds: float

    @property
    def flagged(self) -> bool:
        return self.sat_count == 0


def _results(jobs: Sequence[_Job], pool: ProcessPoolExecutor | None) -> Iterator[InstanceResult]:
    if pool is None:
        return map(_run_job, jobs)
    return pool.map(_run_job, jobs, chunksize=8)


def sweep(
    axis: str,
    grid: Sequence[float],
    B: int,
    samples: int,
    seed: int,
    width: int = 3,
    jobs: int = 1,
    max_attempts: int | None = None,
    branching: str = "frequency",
    allow_large: bool = False,
    progress=None,
) -> list[ExperimentRow]:
    """One row per grid point, each from ``samples`` satisfiable random instances.

    Instance ``j`` at grid point ``g`` is drawn from ``instance_seed(seed, g, j)``;
    instances are consumed in index order, so results do not depend on ``jobs``.
    Unsatisfiable draws are counted in ``samples`` but excluded from the averages.
    """
    if axis not in ("ratio", "impurity"):
        raise ValueError(f"unknown axis {axis!r}")
    if B > 40 and not allow_large:
        raise ValueError(f"B={B} exceeds the desk-scale guard of 40")
    if max_attempts is None:
        max_attempts = 400 * samples
    pool = ProcessPoolExecutor(jobs) if jobs > 1 else None
    try:
        return _sweep(axis, grid, B, samples, seed, width, pool, max(64, 16 * jobs),
                      max_attempts, branching, progress)
    finally:
        if pool is not None:
            pool.shutdown(cancel_futures=True)


def _sweep(axis, grid, B, samples, seed, width, pool, batch, max_attempts, branching, progress):
    rows = []
    for gi, value in enumerate(grid):
        t0 = time.perf_counter()
        generated = sat = mtm = 0
        er_sum = Fraction(0)
        count_sum = 0
        imp_sum = Fraction(0)
        j = 0
        while sat < samples and j < max_attempts:
            chunk = [_Job(axis, value, B, width, instance_seed(seed, gi, jj), branching)
                     for jj in range(j, min(j + batch, max_attempts))]
            j += len(chunk)
            for res in _results(chunk, pool):
                if sat >= samples:
                    break
                generated += 1
                if not res.satisfiable:
                    continue
                sat += 1
                count_sum += res.models
                imp_sum += res.imp
                if res.has_mtm:
                    mtm += 1
                    er_sum += res.er_mtm
        row = ExperimentRow(
            axis=axis,
            value=value,
            B=B,
            samples=generated,
            sat_count=sat,
            mtm_count=mtm,
            p_mtm=mtm / sat if sat else math.nan,
            mean_er_mtm=float(er_sum / mtm) if mtm else math.nan,
            mean_model_count=count_sum / sat if sat else math.nan,
            mean_imp=float(imp_sum / sat) if sat else math.nan,
            seconds=time.perf_counter() - t0,
        )
        rows.append(row)
        if progress is not None:
            progress(row)
    return rows


def _fmt(x: float, spec: str) -> str:
    return "nan" if isinstance(x, float) and math.isnan(x) else format(x, spec)


def rows_to_csv(rows: Sequence[ExperimentRow], timing: bool = True) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for r in rows:
        w.writerow([r.axis, format(r.value, "g"), r.B, r.samples, r.sat_count,
                    _fmt(r.p_mtm, ".6f"), _fmt(r.mean_er_mtm, ".6f"),
                    _fmt(r.mean_model_count, ".6g"), format(r.seconds if timing else 0.0, ".3f")])
    return buf.getvalue()


def rows_to_gnuplot(rows: Sequence[ExperimentRow]) -> str:
    lines = [f"# {rows[0].axis if rows else 'value'} p_mtm mean_er_mtm sat_count"]
    for r in rows:
        lines.append(f"{r.value:g} {_fmt(r.p_mtm, '.6f')} {_fmt(r.mean_er_mtm, '.6f')} {r.sat_count}")
    return "\n".join(lines) + "\n"


def rows_as_dicts(rows: Sequence[ExperimentRow]) -> list[dict]:
    return [asdict(r) for r in rows]


# -- where the estimated p(mtm) bottoms out ----------------------------------------

@dataclass(frozen=True)
class M0Solution:
    B: int
    phi_star: mpmath.mpf
    M0: mpmath.mpf
    residual: mpmath.mpf


def m0_equation(phi, B: int):
    """Left-hand side of the stationarity condition in ``phi`` (zero at the minimum)."""
    phi = mpmath.mpf(phi)
    return (1 - phi) * mpmath.log(1 - phi) + phi ** (1 - mpmath.mpf(1) / B) / (2 * mpmath.log(2))


class SolverError(RuntimeError):
    pass


def solve_m0(B: int, grid: int = 2000) -> M0Solution:
    """Interior root of :func:`m0_equation` and the model count it corresponds to.

    The expression vanishes at 0 and, for small ``B``, crosses zero once more
    very close to 0 on the way down.  The root of interest is where it turns
    from negative to positive; the scan takes the rightmost such crossing.
    """
    if B < 2:
        raise ValueError("B must be at least 2")
    with mpmath.workdps(40):
        xs = [mpmath.mpf(i) / grid for i in range(1, grid)]
        fs = [m0_equation(x, B) for x in xs]
        crossing = None
        for i in range(len(xs) - 1):
            if fs[i] < 0 <= fs[i + 1]:
                crossing = i
        if crossing is None:
            trace = ", ".join(f"{float(x):.3f}:{float(f):+.2e}" for x, f in list(zip(xs, fs))[:: grid // 20])
            raise SolverError(f"no sign change for B={B}; scan {trace}")
        lo, hi = xs[crossing], xs[crossing + 1]
        for _ in range(200):
            mid = (lo + hi) / 2
            if m0_equation(mid, B) < 0:
                lo = mid
            else:
                hi = mid
        phi = (lo + hi) / 2
        m0 = mpmath.power(2, 2 * B * (1 - phi ** (mpmath.mpf(1) / B)))
        return M0Solution(B, +phi, +m0, +m0_equation(phi, B))


@dataclass(frozen=True)
class EmpiricalMinimum:
    value: float
    p_mtm: float
    mean_model_count: float
    m0: M0Solution | None


def locate_empirical_minimum(rows: Sequence[ExperimentRow], with_m0: bool = True) -> EmpiricalMinimum:
    """Grid point with the smallest p(mtm); reported next to the analytic M0 for comparison only."""
    usable = [r for r in rows if not r.flagged]
    if len(usable) < 3:
        raise ValueError("need at least three usable rows")
    best = min(usable, key=lambda r: r.p_mtm)
    return EmpiricalMinimum(best.value, best.p_mtm, best.mean_model_count,
                            solve_m0(best.B) if with_m0 and best.B >= 2 else None)
