"""Seeded Monte Carlo sweeps of the solver and their comparison with the limit laws.

Trial ``i`` of every cell draws its formula and its solver choices from
``RngStream(master_seed, i)``, so a sweep is a pure function of its config:
worker count and scheduling only change how fast the records arrive.
Records are sorted by ``(n, m, trial)`` before anything is reported.
"""

import csv
import io
import json
import math
import os
import time
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

from .analytic import rho_distribution, sat_prob_limit, walk_acceptance_law, wobble_law
from .core import UniverseKind, evaluate
from .errors import EmptyCell, ResourceLimitError
from .generator import DEFAULT_MEMORY_BUDGET, clauses_for_c, clauses_for_rate, effective_rate, sample_formula
from .rng import RngStream
from .solver import brute_force_solve, pur_solve, unit_prop_solve
from .stats import binned, empirical_pmf, normal_ci, tv_distance

CSV_HEADER = ("n", "m", "c", "lambda", "kind", "trial", "seed", "status", "iterations", "final_stage", "ms")
RATE_MODES = ("c", "m", "lambda")
RHO_KMAX = 40
WORKERS_ENV = "HORNPHASE_WORKERS"


@dataclass
class ExperimentConfig:
    """What to sweep.

    ``rates`` are read according to ``rate_mode``: ``"c"`` gives
    ``m = round(c * 2**n)``, ``"m"`` gives explicit clause counts and
    ``"lambda"`` picks the ``m`` whose finite-n rate is closest.
    """

    n_values: list
    rates: list
    rate_mode: str = "c"
    kind: UniverseKind = UniverseKind.STRICT
    trials: int = 100
    master_seed: int = 0
    workers: int = 1
    outputs: dict = field(default_factory=dict)
    timing: bool = False
    memory_budget: int | None = DEFAULT_MEMORY_BUDGET

    def __post_init__(self):
        self.kind = UniverseKind.parse(self.kind)
        self.n_values = [int(n) for n in self.n_values]
        self.rates = list(self.rates)
        if self.rate_mode not in RATE_MODES:
            raise ValueError(f"rate_mode must be one of {RATE_MODES}, got {self.rate_mode!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.n_values or not self.rates:
            raise ValueError("need at least one n and one rate")
        if any(n < 1 for n in self.n_values):
            raise ValueError("every n must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    def clause_count(self, n, rate):
        if self.rate_mode == "c":
            return clauses_for_c(n, rate)
        if self.rate_mode == "lambda":
            return clauses_for_rate(n, rate, self.kind)
        return int(rate)

    def cells(self):
        """Sorted distinct ``(n, m)`` pairs."""
        return sorted({(n, self.clause_count(n, r)) for n in self.n_values for r in self.rates})

    def to_dict(self):
        d = asdict(self)
        d["kind"] = self.kind.value
        return d

    @classmethod
    def from_dict(cls, d):
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def from_json(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass(frozen=True)
class TrialRecord:
    n: int
    m: int
    c: float
    lam: float
    kind: str
    trial: int
    seed: int
    status: str
    iterations: int | None
    final_stage: int | None
    ms: float = 0.0

    @property
    def ok(self):
        return self.status in ("SAT", "UNSAT")


def _worker_count(cfg):
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    return cfg.workers


def run_trial(n, m, kind, master_seed, trial, timing=False, memory_budget=DEFAULT_MEMORY_BUDGET):
    rate = effective_rate(n, m, kind)
    common = dict(n=n, m=m, c=rate.c, lam=rate.lam, kind=rate.kind.value, trial=trial, seed=master_seed)
    start = time.perf_counter()
    rng = RngStream(master_seed, trial)
    try:
        formula = sample_formula(n, m, kind, rng, memory_budget=memory_budget)
        outcome = pur_solve(formula, rng)
    except (ResourceLimitError, MemoryError):
        return TrialRecord(status="ERROR", iterations=None, final_stage=None, **common)
    ms = (time.perf_counter() - start) * 1e3 if timing else 0.0
    return TrialRecord(
        status=outcome.status.value,
        iterations=outcome.iterations,
        final_stage=outcome.final_stage,
        ms=ms,
        **common,
    )


def run_sweep(cfg):
    """All trials of every cell, sorted by ``(n, m, trial)``."""
    tasks = [(n, m, t) for n, m in cfg.cells() for t in range(cfg.trials)]

    def job(task):
        n, m, t = task
        return run_trial(n, m, cfg.kind, cfg.master_seed, t, cfg.timing, cfg.memory_budget)

    workers = _worker_count(cfg)
    if workers == 1:
        records = [job(task) for task in tasks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(job, tasks))
    records.sort(key=lambda r: (r.n, r.m, r.trial))
    return records


# ---------------------------------------------------------------- summaries


@dataclass
class SummaryStats:
    """Empirical laws of one ``(n, m, kind)`` cell next to their predictions.

    ``predicted`` uses the finite-n rate ``lam``; ``predicted_limit`` uses
    ``lambda_limit``; ``predicted_walk`` is the carry-over walk limit at
    ``lam``.  TV distances are ``None`` when the conditioning status never
    occurred.
    """

    n: int
    m: int
    kind: str
    c: float
    lam: float
    lambda_limit: float
    trials: int
    failed: int
    sat_count: int
    sat_fraction: float
    se: float
    ci_lo: float
    ci_hi: float
    predicted: float
    predicted_limit: float
    predicted_walk: float
    hist_sat: dict
    hist_unsat: dict
    tv_rho: float | None = None
    tv_rho_finite: float | None = None
    tv_rho_walk: float | None = None
    tv_eta: dict = field(default_factory=dict)

    def to_dict(self):
        d = asdict(self)
        d["hist_sat"] = {str(k): v for k, v in sorted(self.hist_sat.items())}
        d["hist_unsat"] = {str(k): v for k, v in sorted(self.hist_unsat.items())}
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        d["hist_sat"] = {int(k): v for k, v in d["hist_sat"].items()}
        d["hist_unsat"] = {int(k): v for k, v in d["hist_unsat"].items()}
        return cls(**d)


def rho_tv(iterations, lam):
    """TV between the empirical SAT iteration law and the limit law at rate ``lam``."""
    rho = rho_distribution(lam, RHO_KMAX)
    support = range(RHO_KMAX + 1)
    model = binned(rho.as_dict(), support, rho.tail_mass)
    return tv_distance(empirical_pmf(iterations, support), model)


def walk_tv(iterations, lam):
    model = dict(enumerate(walk_acceptance_law(lam, RHO_KMAX).rho()))
    return tv_distance(empirical_pmf(iterations, range(RHO_KMAX + 1)), model)


def eta_tv(iterations, n, c_like, variant):
    """TV between ``iterations - floor(log2 n)`` on UNSAT and the wobble law."""
    law = wobble_law(c_like, n, variant)
    shift = int(math.floor(math.log2(n)))
    model = binned(law.as_dict(), law.support, law.truncation_mass)
    return tv_distance(empirical_pmf([i - shift for i in iterations], law.support), model)


def summarize(records):
    """Statistics for records of a single cell."""
    records = list(records)
    if not records:
        raise EmptyCell("no records to summarize")
    first = records[0]
    if any((r.n, r.m, r.kind) != (first.n, first.m, first.kind) for r in records):
        raise ValueError("records span more than one (n, m, kind) cell")
    rate = effective_rate(first.n, first.m, first.kind)
    good = [r for r in records if r.ok]
    if not good:
        raise EmptyCell("every trial in the cell failed")
    sat = [r.iterations for r in good if r.status == "SAT"]
    unsat = [r.iterations for r in good if r.status == "UNSAT"]
    p, lo, hi, se = normal_ci(len(sat), len(good))
    stats = SummaryStats(
        n=first.n,
        m=first.m,
        kind=rate.kind.value,
        c=rate.c,
        lam=rate.lam,
        lambda_limit=rate.lambda_limit,
        trials=len(records),
        failed=len(records) - len(good),
        sat_count=len(sat),
        sat_fraction=p,
        se=se,
        ci_lo=lo,
        ci_hi=hi,
        predicted=sat_prob_limit(rate.lam),
        predicted_limit=sat_prob_limit(rate.lambda_limit),
        predicted_walk=walk_acceptance_law(rate.lam).sat_prob if rate.lam > 0 else 1.0,
        hist_sat=dict(sorted(Counter(sat).items())),
        hist_unsat=dict(sorted(Counter(unsat).items())),
    )
    if sat and rate.lam > 0:
        stats.tv_rho = rho_tv(sat, rate.lambda_limit)
        stats.tv_rho_finite = rho_tv(sat, rate.lam)
        stats.tv_rho_walk = walk_tv(sat, rate.lam)
    if unsat and first.n >= 2:
        for variant in ("sqrt", "linear"):
            stats.tv_eta[variant] = eta_tv(unsat, first.n, rate.lam, variant)
    return stats


def summarize_sweep(records):
    """One :class:`SummaryStats` per cell, in cell order."""
    cells = {}
    for r in records:
        cells.setdefault((r.n, r.m, r.kind), []).append(r)
    return [summarize(cells[key]) for key in sorted(cells)]


# ---------------------------------------------------------------- reports


def _real(x):
    return format(x, ".17g")


def records_csv(records):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in records:
        writer.writerow(
            (
                r.n,
                r.m,
                _real(r.c),
                _real(r.lam),
                r.kind,
                r.trial,
                r.seed,
                r.status,
                "" if r.iterations is None else r.iterations,
                "" if r.final_stage is None else r.final_stage,
                _real(r.ms),
            )
        )
    return buf.getvalue().encode("ascii")


def parse_records_csv(data):
    """Inverse of the CSV report."""
    text = data.decode("ascii") if isinstance(data, bytes) else data
    reader = csv.reader(io.StringIO(text))
    header = tuple(next(reader))
    if header != CSV_HEADER:
        raise ValueError(f"unexpected header {header}")
    out = []
    for row in reader:
        n, m, c, lam, kind, trial, seed, status, it, fs, ms = row
        out.append(
            TrialRecord(
                n=int(n),
                m=int(m),
                c=float(c),
                lam=float(lam),
                kind=kind,
                trial=int(trial),
                seed=int(seed),
                status=status,
                iterations=int(it) if it else None,
                final_stage=int(fs) if fs else None,
                ms=float(ms),
            )
        )
    return out


def stats_json(stats):
    if isinstance(stats, SummaryStats):
        stats = [stats]
    payload = {"cells": [s.to_dict() for s in stats]}
    return (json.dumps(payload, indent=2, sort_keys=True) + "\n").encode("ascii")


def parse_stats_json(data):
    return [SummaryStats.from_dict(d) for d in json.loads(data)["cells"]]


def plot_table(stats):
    """Whitespace table, one row per cell: ``c sat_fraction ci_lo ci_hi predicted``."""
    if isinstance(stats, SummaryStats):
        stats = [stats]
    lines = ["# n m c sat_fraction ci_lo ci_hi predicted"]
    for s in stats:
        values = (s.c, s.sat_fraction, s.ci_lo, s.ci_hi, s.predicted)
        lines.append(f"{s.n} {s.m} " + " ".join(_real(v) for v in values))
    return ("\n".join(lines) + "\n").encode("ascii")


def emit_report(records, stats, format="csv"):
    """Serialize a sweep: ``csv`` (records), ``json`` (summaries) or ``plot`` (summary table)."""
    if format == "csv":
        return records_csv(records)
    if format == "json":
        return stats_json(stats)
    if format == "plot":
        return plot_table(stats)
    raise ValueError(f"unknown report format {format!r}")


def write_outputs(cfg, records, stats):
    """Write each report named in ``cfg.outputs`` (keys ``csv``, ``json``, ``plot``)."""
    for fmt, path in cfg.outputs.items():
        with open(path, "wb") as fh:
            fh.write(emit_report(records, stats, fmt))


# ---------------------------------------------------------------- oracle cross-check


@dataclass
class CrossCheckReport:
    trials: int
    sat_count: int = 0
    disagreements: list = field(default_factory=list)  # (trial, reason)

    @property
    def ok(self):
        return not self.disagreements


def cross_check(trials, n_max=12, m_max=200, master_seed=0):
    """Random formulas through all three solvers; statuses and minimal models must agree.

    Trial ``i`` draws ``n`` in ``[1, n_max]``, ``m`` in ``[1, m_max]`` and
    alternates the universe, all from ``RngStream(master_seed, i)``.
    """
    kinds = (UniverseKind.STRICT, UniverseKind.PADDED)
    report = CrossCheckReport(trials=trials)
    for i in range(trials):
        rng = RngStream(master_seed, i)
        n = 1 + rng.integers(n_max)
        m = 1 + rng.integers(m_max)
        formula = sample_formula(n, m, kinds[i % 2], rng)
        pur = pur_solve(formula, rng)
        unit = unit_prop_solve(formula)
        brute = brute_force_solve(formula)
        if not pur.status is unit.status is brute.status:
            report.disagreements.append((i, "status"))
            continue
        if not pur.satisfiable:
            continue
        report.sat_count += 1
        if not evaluate(formula, pur.model):
            report.disagreements.append((i, "model does not satisfy"))
        elif not pur.model == unit.model == brute.model:
            report.disagreements.append((i, "model not minimal"))
        elif pur.iterations != len(unit.model.true_set):
            report.disagreements.append((i, "iteration count"))
    return report
