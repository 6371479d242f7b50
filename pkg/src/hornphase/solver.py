"""Positive unit resolution and its instrumented variants.

``pur_solve`` is the randomized procedure: while a positive unit clause
exists, pick one occurrence uniformly, reject if the complementary negative
unit is present, otherwise set its variable true.  ``pur2_run`` and
``pur3_run`` are the never-halting variants used to study the clause-count
process; they always run all ``n`` stages and return the per-stage class
counts.  ``unit_prop_solve`` (deterministic forward chaining) and
``brute_force_solve`` are independent references.

The randomized kernels keep, per clause, the number of body literals whose
variable is still unassigned.  With packed bodies, the occurrence list of
the variable just assigned is walked as a bit test over the live clauses,
which are compacted as they die.
"""

import enum
from collections import deque
from dataclasses import dataclass

import numba
import numpy as np

from .core import Assignment, ClauseClass
from .errors import ArityTooLarge
from .rng import next_below, next_double

BRUTE_FORCE_MAX_VARS = 24

# class codes shared by the kernels; also the column order of trace counts
_PU, _PNU, _NU, _NNU, _E = 0, 1, 2, 3, 4

_ACCEPT, _REJECT, _SURVIVE, _NO_UNIT, _NONE = 0, 1, 2, 3, -1


class Status(enum.Enum):
    SATISFIABLE = "SAT"
    UNSATISFIABLE = "UNSAT"


class StageEvent(enum.Enum):
    ACCEPT = "accept"
    REJECT = "reject"
    SURVIVE = "survive"
    NO_UNIT_BRANCH = "no-unit"


_EVENTS = {
    _ACCEPT: StageEvent.ACCEPT,
    _REJECT: StageEvent.REJECT,
    _SURVIVE: StageEvent.SURVIVE,
    _NO_UNIT: StageEvent.NO_UNIT_BRANCH,
    _NONE: None,
}


@dataclass(frozen=True)
class StageRecord:
    """Clause-class counts at the start of a stage and what the stage did.

    ``event`` is None only on the closing stage-0 snapshot of the variants.
    """

    stage: int
    hp1: int
    hp2: int
    hn1: int
    hn2: int
    e: int
    n_total: int
    event: StageEvent | None
    chosen_var: int | None = None

    @property
    def counts(self):
        return (self.hp1, self.hp2, self.hn1, self.hn2, self.e, self.n_total)

    @property
    def nonempty(self):
        return self.n_total - self.e

    def count(self, cls):
        return {
            ClauseClass.POSITIVE_UNIT: self.hp1,
            ClauseClass.POSITIVE_NON_UNIT: self.hp2,
            ClauseClass.NEGATIVE_UNIT: self.hn1,
            ClauseClass.NEGATIVE_NON_UNIT: self.hn2,
            ClauseClass.EMPTY: self.e,
        }[cls]


@dataclass(frozen=True)
class SolveOutcome:
    status: Status
    iterations: int
    final_stage: int
    model: Assignment | None = None
    trace: tuple | None = None

    @property
    def satisfiable(self):
        return self.status is Status.SATISFIABLE


# ---------------------------------------------------------------- kernels


@numba.njit(inline="always")
def _popcount(x):
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return np.int64((x * np.uint64(0x0101010101010101)) >> np.uint64(56))


@numba.njit(inline="always")
def _class_code(head, rem):
    if head > 0:
        return _PU if rem == 0 else _PNU
    if rem == 0:
        return _E
    return _NU if rem == 1 else _NNU


@numba.njit(inline="always")
def _last_unassigned(bodies, c, true_words):
    for k in range(bodies.shape[1]):
        word = bodies[c, k] & ~true_words[k]
        if word != 0:
            low = word & (~word + np.uint64(1))
            return 64 * k + _popcount(low - np.uint64(1)) + 1
    return 0


@numba.njit(inline="always")
def _record(counts, events, chosen, row, cls, event, var):
    total = 0
    for k in range(5):
        counts[row, k] = cls[k]
        total += cls[k]
    counts[row, 5] = total
    events[row] = event
    chosen[row] = var


@numba.njit(nogil=True, cache=True)
def _pur_kernel(heads, bodies, n, state, counts, events, chosen, model):
    """Run PUR; fills trace rows ``0..n-final_stage`` and ``model``; returns (sat, final_stage)."""
    m = heads.shape[0]
    remaining = np.empty(m, np.int32)
    alive = np.ones(m, np.bool_)
    live = np.empty(m, np.int32)
    pool = np.empty(m, np.int32)
    neg_units = np.zeros(n + 1, np.int64)
    true_words = np.zeros(bodies.shape[1], np.uint64)
    cls = np.zeros(5, np.int64)
    pool_len = 0
    n_live = 0
    for c in range(m):
        rem = 0
        for k in range(bodies.shape[1]):
            rem += _popcount(bodies[c, k])
        remaining[c] = rem
        code = _class_code(heads[c], rem)
        cls[code] += 1
        if code == _PU:
            pool[pool_len] = c
            pool_len += 1
        else:
            if code == _NU:
                neg_units[_last_unassigned(bodies, c, true_words)] += 1
            live[n_live] = c
            n_live += 1

    t = n
    while True:
        row = n - t
        pick = -1
        while pool_len > 0:
            j = next_below(state, pool_len)
            if alive[pool[j]]:
                pick = pool[j]
                break
            pool_len -= 1
            pool[j] = pool[pool_len]
        if pick < 0:
            _record(counts, events, chosen, row, cls, _ACCEPT, 0)
            return True, t
        x = heads[pick]
        if neg_units[x] > 0:
            _record(counts, events, chosen, row, cls, _REJECT, x)
            return False, t
        _record(counts, events, chosen, row, cls, _SURVIVE, x)
        model[x] = True
        word_k = (x - 1) >> 6
        bit = np.uint64(1) << np.uint64((x - 1) & 63)
        true_words[word_k] |= bit
        # positive units with head x sit in the pool, not in the live list
        for i in range(pool_len):
            c = pool[i]
            if alive[c] and heads[c] == x:
                alive[c] = False
                cls[_PU] -= 1
        kept = 0
        for i in range(n_live):
            c = live[i]
            if not alive[c]:
                continue
            h = heads[c]
            if h == x:
                alive[c] = False
                cls[_class_code(h, remaining[c])] -= 1
                continue
            if bodies[c, word_k] & bit:
                rem = remaining[c] - 1
                remaining[c] = rem
                if h > 0:
                    if rem == 0:
                        cls[_PNU] -= 1
                        cls[_PU] += 1
                        pool[pool_len] = c
                        pool_len += 1
                        continue
                elif rem == 1:
                    cls[_NNU] -= 1
                    cls[_NU] += 1
                    neg_units[_last_unassigned(bodies, c, true_words)] += 1
            live[kept] = c
            kept += 1
        n_live = kept
        t -= 1


@numba.njit(nogil=True, cache=True)
def _variant_kernel(heads, bodies, n, state, thin_negative, counts, events, chosen):
    """PUR2 (``thin_negative`` False) or PUR3 (True) over all n stages."""
    m = heads.shape[0]
    remaining = np.empty(m, np.int32)
    alive = np.ones(m, np.bool_)
    live = np.empty(m, np.int32)
    pool = np.empty(m, np.int32)
    cls = np.zeros(5, np.int64)
    pool_len = 0
    for c in range(m):
        rem = 0
        for k in range(bodies.shape[1]):
            rem += _popcount(bodies[c, k])
        remaining[c] = rem
        code = _class_code(heads[c], rem)
        cls[code] += 1
        live[c] = c
        if code == _PU:
            pool[pool_len] = c
            pool_len += 1
    n_live = m

    for t in range(n, 0, -1):
        row = n - t
        p = 1.0 / t
        kept = 0
        for i in range(n_live):
            if alive[live[i]]:
                live[kept] = live[i]
                kept += 1
        n_live = kept

        has_unit = False
        for i in range(pool_len):
            if alive[pool[i]]:
                has_unit = True
                break
        if not has_unit:
            _record(counts, events, chosen, row, cls, _NO_UNIT, 0)
            pool_len = 0
            if n_live == 0:
                continue
            j = next_below(state, n_live)
            c = live[j]
            alive[c] = False
            cls[_class_code(heads[c], remaining[c])] -= 1
            for i in range(n_live):
                c = live[i]
                if alive[c] and next_double(state) < p:
                    alive[c] = False
                    cls[_class_code(heads[c], remaining[c])] -= 1
            continue

        # snapshot before the thinning so the row is the stage-start profile
        _record(counts, events, chosen, row, cls, _SURVIVE, 0)
        if thin_negative:
            for i in range(n_live):
                c = live[i]
                if alive[c] and heads[c] == 0 and remaining[c] >= 2:
                    if next_double(state) < p:
                        alive[c] = False
                        cls[_NNU] -= 1
        pick = -1
        while pool_len > 0:
            j = next_below(state, pool_len)
            if alive[pool[j]]:
                pick = pool[j]
                break
            pool_len -= 1
            pool[j] = pool[pool_len]
        x = heads[pick]
        chosen[row] = x
        word_k = (x - 1) >> 6
        bit = np.uint64(1) << np.uint64((x - 1) & 63)
        for i in range(n_live):
            c = live[i]
            if not alive[c]:
                continue
            h = heads[c]
            if h == x:
                alive[c] = False
                cls[_class_code(h, remaining[c])] -= 1
                continue
            if bodies[c, word_k] & bit:
                old = _class_code(h, remaining[c])
                rem = remaining[c] - 1
                remaining[c] = rem
                new = _class_code(h, rem)
                cls[old] -= 1
                cls[new] += 1
                if new == _PU:
                    pool[pool_len] = c
                    pool_len += 1
    _record(counts, events, chosen, n, cls, _NONE, 0)


def _trace_records(n, counts, events, chosen, rows):
    out = []
    for r in range(rows):
        var = int(chosen[r])
        c = counts[r]
        out.append(
            StageRecord(
                stage=n - r,
                hp1=int(c[0]),
                hp2=int(c[1]),
                hn1=int(c[2]),
                hn2=int(c[3]),
                e=int(c[4]),
                n_total=int(c[5]),
                event=_EVENTS[int(events[r])],
                chosen_var=var or None,
            )
        )
    return tuple(out)


def _trace_buffers(n):
    return (
        np.zeros((n + 1, 6), np.int64),
        np.full(n + 1, _NONE, np.int8),
        np.zeros(n + 1, np.int32),
    )


# ---------------------------------------------------------------- public API


def pur_solve(formula, rng, want_trace=False):
    """Randomized positive unit resolution on ``formula`` using ``rng``."""
    n = formula.num_vars
    counts, events, chosen = _trace_buffers(n)
    model = np.zeros(n + 1, np.bool_)
    sat, final_stage = _pur_kernel(
        formula.heads, formula.bodies, n, rng.state, counts, events, chosen, model
    )
    final_stage = int(final_stage)
    trace = None
    if want_trace:
        trace = _trace_records(n, counts, events, chosen, n - final_stage + 1)
    return SolveOutcome(
        status=Status.SATISFIABLE if sat else Status.UNSATISFIABLE,
        iterations=n - final_stage,
        final_stage=final_stage,
        model=Assignment(tuple(model[1:])) if sat else None,
        trace=trace,
    )


def pur_trace_arrays(formula, rng):
    """PUR as raw arrays ``(sat, final_stage, counts, events)``; rows past the end are zero."""
    n = formula.num_vars
    counts, events, chosen = _trace_buffers(n)
    model = np.zeros(n + 1, np.bool_)
    sat, final_stage = _pur_kernel(
        formula.heads, formula.bodies, n, rng.state, counts, events, chosen, model
    )
    return bool(sat), int(final_stage), counts, events


def variant_trace_arrays(formula, rng, thin_negative):
    n = formula.num_vars
    counts, events, chosen = _trace_buffers(n)
    _variant_kernel(formula.heads, formula.bodies, n, rng.state, thin_negative, counts, events, chosen)
    return counts, events, chosen


def pur2_run(formula, rng):
    """All ``n`` stages of PUR2; returns ``n + 1`` stage records (stage n down to 0)."""
    counts, events, chosen = variant_trace_arrays(formula, rng, False)
    return list(_trace_records(formula.num_vars, counts, events, chosen, formula.num_vars + 1))


def pur3_run(formula, rng):
    """As :func:`pur2_run`, but negative non-unit clauses are thinned before each assignment."""
    counts, events, chosen = variant_trace_arrays(formula, rng, True)
    return list(_trace_records(formula.num_vars, counts, events, chosen, formula.num_vars + 1))


def unit_prop_solve(formula):
    """Deterministic forward chaining with per-clause counters.

    On satisfiable input the forced set is the minimal model.  Linear in
    the number of literal occurrences.
    """
    n = formula.num_vars
    clauses = formula.clauses
    missing = [len(c.body) for c in clauses]
    watchers = [[] for _ in range(n + 1)]
    for i, clause in enumerate(clauses):
        for v in clause.body:
            watchers[v].append(i)
    forced = [False] * (n + 1)
    queue = deque()
    derived = 0

    def fire(i):
        head = clauses[i].head
        if head is None:
            return False
        if not forced[head]:
            forced[head] = True
            queue.append(head)
        return True

    conflict = False
    for i, clause in enumerate(clauses):
        if missing[i] == 0 and not fire(i):
            conflict = True
            break
    while queue and not conflict:
        v = queue.popleft()
        derived += 1
        for i in watchers[v]:
            missing[i] -= 1
            if missing[i] == 0 and not fire(i):
                conflict = True
                break
    if conflict:
        return SolveOutcome(Status.UNSATISFIABLE, iterations=derived, final_stage=n - derived)
    model = Assignment(tuple(forced[1:]))
    size = len(model.true_set)
    return SolveOutcome(Status.SATISFIABLE, iterations=size, final_stage=n - size, model=model)


def brute_force_solve(formula, chunk=1 << 16):
    """Try all ``2**n`` assignments; return the minimal model when one exists."""
    n = formula.num_vars
    if n > BRUTE_FORCE_MAX_VARS:
        raise ArityTooLarge(f"brute force is limited to {BRUTE_FORCE_MAX_VARS} variables, got {n}")
    heads = formula.heads.astype(np.int64)
    bodies = formula.bodies[:, 0]
    head_bits = np.where(heads > 0, np.uint64(1) << (np.maximum(heads, 1) - 1).astype(np.uint64), 0)
    head_bits = head_bits.astype(np.uint64)
    has_head = heads > 0
    best = None
    clause_block = max(1, (1 << 22) // min(chunk, 1 << n))
    for start in range(0, 1 << n, chunk):
        a = np.arange(start, min(start + chunk, 1 << n), dtype=np.uint64)
        ok = np.ones(a.shape[0], dtype=bool)
        for lo in range(0, formula.num_clauses, clause_block):
            hb = head_bits[lo : lo + clause_block, None]
            sat = (has_head[lo : lo + clause_block, None] & ((a[None, :] & hb) != 0)) | (
                (bodies[lo : lo + clause_block, None] & ~a[None, :]) != 0
            )
            ok &= sat.all(axis=0)
        if ok.any():
            models = a[ok]
            sizes = np.bitwise_count(models)
            cand = int(models[np.argmin(sizes)])
            if best is None or cand.bit_count() < best.bit_count():
                best = cand
    if best is None:
        return SolveOutcome(Status.UNSATISFIABLE, iterations=0, final_stage=n)
    model = Assignment(tuple(bool(best >> (v - 1) & 1) for v in range(1, n + 1)))
    size = best.bit_count()
    return SolveOutcome(Status.SATISFIABLE, iterations=size, final_stage=n - size, model=model)
