"""Simulation of the clause-count chains behind the solver's analysis.

Three processes are simulated directly, without building formulas:

* the profile chain on ``(hn1, hn2, hp1, hp2, e)``, which tracks the class
  counts of the never-halting solver variant stage by stage;
* the one-dimensional chain ``U_{t-1} = U_t - 1 - Bin(U_t - 1, 1/t)``
  bounding the clause count, with its concentration envelope;
* an empirical domination check comparing the clause counts of the real
  solver against the thinned variant, each conditioned on survival.

Run ``i`` of a batch always draws from ``RngStream(master_seed, i)``, so
batches are reproducible and independent of how they are scheduled.
"""

import csv
from dataclasses import dataclass, field

import numba
import numpy as np

from .analytic import concentration_lower_bound
from .core import ClauseClass, class_counts, universe_size
from .errors import InvalidProfile
from .generator import sample_formula
from .rng import RngStream, next_below, next_binomial
from .solver import pur_trace_arrays, variant_trace_arrays
from .stats import ccdf_table, empirical_pmf, tv_distance

PROFILE_FIELDS = ("hn1", "hn2", "hp1", "hp2", "e")


@dataclass(frozen=True)
class Profile:
    """Class counts at stage ``t``."""

    hn1: int
    hn2: int
    hp1: int
    hp2: int
    e: int
    t: int

    def __post_init__(self):
        for name in PROFILE_FIELDS + ("t",):
            value = getattr(self, name)
            if value < 0:
                raise InvalidProfile(f"{name} must be nonnegative, got {value}")

    @property
    def n_total(self):
        return self.hn1 + self.hn2 + self.hp1 + self.hp2 + self.e

    def as_tuple(self):
        return (self.hn1, self.hn2, self.hp1, self.hp2, self.e)


@dataclass(frozen=True)
class TransitionProbs:
    p1: float
    p2: float
    p3: float
    p4: float


def transition_probs(t):
    """Stage-``t`` probabilities; ``p2`` and ``p4`` are 0 at ``t = 1`` where no non-unit clause fits."""
    if t < 1:
        raise InvalidProfile(f"stage must be >= 1, got {t}")
    if t == 1:
        return TransitionProbs(1.0, 0.0, 0.5, 0.0)
    return TransitionProbs(1.0 / t, 1.0 / (2 ** (t - 1) - 1), 0.5, (t - 1) / (2**t - t - 1))


# ---------------------------------------------------------------- kernels


@numba.njit(nogil=True, cache=True)
def _chain_step(state, hn1, hn2, hp1, hp2, e, t):
    p1 = 1.0 / t
    if hp1 > 0:
        p2 = 0.0
        p4 = 0.0
        if t >= 2:
            p2 = 1.0 / (2.0 ** (t - 1) - 1.0)
            p4 = (t - 1.0) / (2.0**t - t - 1.0)
        d1p = next_binomial(state, hp1 - 1, p1)
        d2p = next_binomial(state, hp2, p1)
        d12p = next_binomial(state, hp2 - d2p, p2)
        de = next_binomial(state, hn1, p1)
        d12n = next_binomial(state, hn2, p4)
        return (
            hn1 - de + d12n,
            hn2 - d12n,
            hp1 - 1 - d1p + d12p,
            hp2 - d2p - d12p,
            e + de,
        )
    total = hn1 + hn2 + hp2 + e
    if total == 0:
        return hn1, hn2, hp1, hp2, e
    # one clause removed with probability proportional to class sizes
    j = next_below(state, total)
    if j < hn1:
        hn1 -= 1
    elif j < hn1 + hn2:
        hn2 -= 1
    elif j < hn1 + hn2 + hp2:
        hp2 -= 1
    else:
        e -= 1
    return (
        hn1 - next_binomial(state, hn1, p1),
        hn2 - next_binomial(state, hn2, p1),
        hp1,
        hp2 - next_binomial(state, hp2, p1),
        e - next_binomial(state, e, p1),
    )


@numba.njit(nogil=True, cache=True)
def _multinomial_profile(state, m, probs):
    # probs in PU, PNU, NU, NNU order; conditional binomials
    out = np.zeros(4, np.int64)
    left = m
    mass = 1.0
    for k in range(3):
        if left == 0 or mass <= 0.0:
            break
        q = min(1.0, probs[k] / mass)
        out[k] = next_binomial(state, left, q)
        left -= out[k]
        mass -= probs[k]
    out[3] = left
    return out


@numba.njit(nogil=True, cache=True)
def _trajectory(state, n, m, probs, out):
    first = _multinomial_profile(state, m, probs)
    hp1, hp2, hn1, hn2 = first[0], first[1], first[2], first[3]
    e = 0
    for t in range(n, 0, -1):
        row = n - t
        out[row, 0] = hn1
        out[row, 1] = hn2
        out[row, 2] = hp1
        out[row, 3] = hp2
        out[row, 4] = e
        hn1, hn2, hp1, hp2, e = _chain_step(state, hn1, hn2, hp1, hp2, e, t)
    out[n, 0] = hn1
    out[n, 1] = hn2
    out[n, 2] = hp1
    out[n, 3] = hp2
    out[n, 4] = e


@numba.njit(nogil=True, cache=True)
def _simple_chain(state, n, start, steps, out):
    u = start
    out[0] = u
    for i in range(steps):
        t = n - i
        if u > 0:
            u = u - 1 - next_binomial(state, u - 1, 1.0 / t)
            if u < 0:
                u = 0
        out[i + 1] = u


# ---------------------------------------------------------------- profile chain


def profile_step(g, rng):
    """One stage of the profile chain from ``g``; returns the profile at stage ``g.t - 1``."""
    if not isinstance(g, Profile):
        raise InvalidProfile("expected a Profile")
    if g.t < 1:
        raise InvalidProfile("cannot step past stage 0")
    nxt = _chain_step(rng.state, g.hn1, g.hn2, g.hp1, g.hp2, g.e, g.t)
    return Profile(*(int(v) for v in nxt), t=g.t - 1)


def _class_probs(n, kind):
    counts = class_counts(n, kind)
    u = universe_size(n, kind)
    order = (
        ClauseClass.POSITIVE_UNIT,
        ClauseClass.POSITIVE_NON_UNIT,
        ClauseClass.NEGATIVE_UNIT,
        ClauseClass.NEGATIVE_NON_UNIT,
    )
    return np.array([counts[c] / u for c in order])


def trajectory_array(n, m, kind, rng):
    """Chain trajectory as an ``(n + 1, 5)`` array, columns in ``PROFILE_FIELDS`` order."""
    if n < 1:
        raise InvalidProfile(f"need n >= 1, got {n}")
    if m < 0:
        raise InvalidProfile("clause count must be nonnegative")
    out = np.zeros((n + 1, 5), np.int64)
    _trajectory(rng.state, n, m, _class_probs(n, kind), out)
    return out


def profile_trajectory(n, m, kind, rng):
    """Multinomial initial profile over ``m`` clauses, then ``n`` chain steps; ``n + 1`` profiles."""
    arr = trajectory_array(n, m, kind, rng)
    return [Profile(*(int(v) for v in arr[r]), t=n - r) for r in range(n + 1)]


def write_trajectories(trajectories, fh):
    """CSV dump of several trajectories: ``run,t,hn1,hn2,hp1,hp2,e,n_total``."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(("run", "t") + PROFILE_FIELDS + ("n_total",))
    for run, traj in enumerate(trajectories):
        for g in traj:
            writer.writerow((run, g.t) + g.as_tuple() + (g.n_total,))


def _variant_profiles(n, m, kind, runs, master_seed):
    # solver-variant traces reordered to PROFILE_FIELDS columns
    out = np.zeros((runs, n + 1, 5), np.int64)
    for i in range(runs):
        rng = RngStream(master_seed, i)
        formula = sample_formula(n, m, kind, rng)
        counts, _, _ = variant_trace_arrays(formula, rng, False)
        out[i] = counts[:, [2, 3, 0, 1, 4]]
    return out


def _chain_profiles(n, m, kind, runs, master_seed):
    out = np.zeros((runs, n + 1, 5), np.int64)
    for i in range(runs):
        out[i] = trajectory_array(n, m, kind, RngStream(master_seed, i))
    return out


@dataclass
class FidelityReport:
    """Per stage and component TV distance between chain and solver marginals."""

    n: int
    m: int
    runs: int
    tv: dict = field(default_factory=dict)  # (t, component) -> distance

    @property
    def max_tv(self):
        return max(self.tv.values()) if self.tv else 0.0

    @property
    def worst(self):
        return max(self.tv, key=self.tv.get) if self.tv else None


def fidelity_check(n, m, kind, runs, master_seed=0):
    """Compare chain marginals with instrumented solver-variant marginals at every stage."""
    solver = _variant_profiles(n, m, kind, runs, master_seed)
    # a different seed keeps the two samples independent
    chain = _chain_profiles(n, m, kind, runs, master_seed ^ 0x5A5A5A5A)
    report = FidelityReport(n=n, m=m, runs=runs)
    for r in range(n + 1):
        for c, name in enumerate(PROFILE_FIELDS):
            p = empirical_pmf(solver[:, r, c].tolist())
            q = empirical_pmf(chain[:, r, c].tolist())
            report.tv[(n - r, name)] = tv_distance(p, q)
    return report


# ---------------------------------------------------------------- simple chain


def simple_chain_run(n, n_start, steps, rng):
    """``U_n = n_start`` then ``steps`` transitions; returns ``steps + 1`` values, floored at 0."""
    if not (0 <= steps <= n):
        raise ValueError(f"need 0 <= steps <= n, got steps={steps}, n={n}")
    if n_start < 1:
        raise ValueError("starting count must be positive")
    out = np.zeros(steps + 1, np.int64)
    _simple_chain(rng.state, n, n_start, steps, out)
    return out.tolist()


def within_envelope(n, n_start, path, envelope="final"):
    """Whether a simple-chain path stays inside the concentration envelope.

    With ``envelope="final"`` every visited value must lie in ``[y_t, n_start]``
    where ``t`` is the last stage of the path.  ``"pointwise"`` demands the
    stricter ``U_j >= y_j`` at each visited stage ``j``.
    """
    last = n - (len(path) - 1)
    if envelope == "final":
        if last < 1 or len(path) == 1:
            return all(u <= n_start for u in path)
        y = concentration_lower_bound(n, last, n_start)
        return all(y <= u <= n_start for u in path)
    if envelope != "pointwise":
        raise ValueError(f"unknown envelope {envelope!r}")
    for i, u in enumerate(path):
        t = n - i
        if t < 1:
            break
        if u > n_start or u < concentration_lower_bound(n, t, n_start):
            return False
    return True


def concentration_check(n, n_start, steps, runs, rng, envelope="final"):
    """Fraction of ``runs`` simple-chain paths that stay inside the envelope."""
    if runs < 1:
        raise ValueError("need at least one run")
    hits = 0
    for i in range(runs):
        path = simple_chain_run(n, n_start, steps, RngStream(rng.master_seed, i))
        hits += within_envelope(n, n_start, path, envelope)
    return hits / runs


# ---------------------------------------------------------------- domination


@dataclass
class StageCcdf:
    t: int
    grid: np.ndarray
    ccdf_pur: np.ndarray
    ccdf_variant: np.ndarray
    samples_pur: int
    samples_variant: int

    @property
    def violation(self):
        if not self.samples_pur or not self.samples_variant:
            return 0.0
        return float(np.max(self.ccdf_variant - self.ccdf_pur))


@dataclass
class DominationReport:
    max_violation: float
    worst_stage: int | None
    tables: dict  # t -> StageCcdf
    runs: int
    min_samples: int


def _pur_counts(n, m, kind, runs, master_seed):
    per_stage = {t: [] for t in range(1, n + 1)}
    for i in range(runs):
        rng = RngStream(master_seed, i)
        formula = sample_formula(n, m, kind, rng)
        _, final_stage, counts, _ = pur_trace_arrays(formula, rng)
        for t in range(max(final_stage, 1), n + 1):
            per_stage[t].append(int(counts[n - t, 5]))
    return per_stage


def _variant_counts(n, m, kind, runs, master_seed, thin_negative=True):
    # conditioned on every earlier stage having a positive unit and no empty clause so far
    per_stage = {t: [] for t in range(1, n + 1)}
    for i in range(runs):
        rng = RngStream(master_seed, i)
        formula = sample_formula(n, m, kind, rng)
        counts, events, _ = variant_trace_arrays(formula, rng, thin_negative)
        for r in range(n):
            t = n - r
            if counts[r, 4] != 0:
                break
            per_stage[t].append(int(counts[r, 5]))
            if events[r] != 2:
                break
    return per_stage


def domination_check(n, m, kind, runs, rng, min_samples=1000, against=None):
    """Empirical check that the thinned variant's clause count is dominated by the solver's.

    For every stage, the survival-conditioned CCDFs of both clause counts
    are tabulated; ``max_violation`` is the largest ``CCDF_variant - CCDF_pur``
    over stages where both sides have at least ``min_samples`` samples.
    ``against="pur"`` compares the solver with an independent copy of itself.
    """
    seed_a = rng.master_seed
    seed_b = rng.master_seed ^ 0xA5A5A5A5A5A5
    first = _pur_counts(n, m, kind, runs, seed_a)
    if against == "pur":
        second = _pur_counts(n, m, kind, runs, seed_b)
    else:
        second = _variant_counts(n, m, kind, runs, seed_b)
    tables = {}
    worst, worst_t = 0.0, None
    for t in range(1, n + 1):
        a, b = first[t], second[t]
        hi = max(a + b, default=0)
        grid = np.arange(0, hi + 2)
        table = StageCcdf(
            t=t,
            grid=grid,
            ccdf_pur=ccdf_table(a, grid) if a else np.zeros(grid.size),
            ccdf_variant=ccdf_table(b, grid) if b else np.zeros(grid.size),
            samples_pur=len(a),
            samples_variant=len(b),
        )
        tables[t] = table
        if len(a) >= min_samples and len(b) >= min_samples and table.violation > worst:
            worst, worst_t = table.violation, t
    return DominationReport(
        max_violation=worst, worst_stage=worst_t, tables=tables, runs=runs, min_samples=min_samples
    )
