"""Uniform random Horn clauses and formulas from the multiset model.

A clause is drawn by picking the head uniformly from ``{absent, 1..t}`` and
flipping one fair coin per variable for the body (bit ``v - 1`` of the
random words), rejecting the empty clause and, for the strict universe,
clauses whose head also appears in the body.  Up to 32 variables a single
64-bit draw supplies both: the body from its low ``t`` bits and the head
from its high half.
"""

from dataclasses import dataclass

import numba
import numpy as np

from .core import HornFormula, UniverseKind, num_words, universe_size
from .errors import InvalidArity, ResourceLimitError
from .rng import next_below, next_u64

DEFAULT_MEMORY_BUDGET = 2 * 1024**3


@numba.njit(nogil=True, cache=True)
def _fill_formula(state, t, strict, heads, bodies):
    w = bodies.shape[1]
    top_bits = t - 64 * (w - 1)
    top_mask = np.uint64(0xFFFFFFFFFFFFFFFF)
    if top_bits < 64:
        top_mask = (np.uint64(1) << np.uint64(top_bits)) - np.uint64(1)
    if t <= 32:
        # one draw per attempt: body from the low t bits, head from the high half
        bound = np.uint64(t + 1)
        threshold = (np.uint64(4294967296) - bound) % bound
        for row in range(heads.shape[0]):
            while True:
                r = next_u64(state)
                x = (r >> np.uint64(32)) * bound
                if (x & np.uint64(0xFFFFFFFF)) < threshold:
                    continue
                head = np.int64(x >> np.uint64(32))
                body = r & top_mask
                if head == 0:
                    if body != 0:
                        break
                    continue
                if strict and (body >> np.uint64(head - 1)) & np.uint64(1):
                    continue
                break
            heads[row] = head
            bodies[row, 0] = body
        return
    for row in range(heads.shape[0]):
        while True:
            head = next_below(state, t + 1)
            nonempty = False
            for k in range(w):
                word = next_u64(state)
                if k == w - 1:
                    word &= top_mask
                bodies[row, k] = word
                if word != 0:
                    nonempty = True
            if head == 0:
                if nonempty:
                    break
                continue
            if strict:
                hv = head - 1
                if (bodies[row, hv >> 6] >> np.uint64(hv & 63)) & np.uint64(1):
                    continue
            break
        heads[row] = head


def formula_bytes(n, m):
    return m * (4 + 8 * num_words(n))


def sample_formula(n, m, kind, rng, memory_budget=DEFAULT_MEMORY_BUDGET):
    """``m`` independent uniform clauses over ``n`` variables, in draw order."""
    if n < 1:
        raise InvalidArity(f"variable count must be >= 1, got {n}")
    if m < 0:
        raise ValueError("clause count must be nonnegative")
    need = formula_bytes(n, m)
    if memory_budget is not None and need > memory_budget:
        raise ResourceLimitError(
            f"{m} clauses over {n} variables need {need} bytes, budget is {memory_budget}"
        )
    heads = np.empty(m, dtype=np.int32)
    bodies = np.empty((m, num_words(n)), dtype=np.uint64)
    strict = UniverseKind.parse(kind) is UniverseKind.STRICT
    _fill_formula(rng.state, n, strict, heads, bodies)
    return HornFormula(n, heads, bodies, validate=False)


def sample_clause(t, kind, rng):
    if t < 1:
        raise InvalidArity(f"variable count must be >= 1, got {t}")
    formula = sample_formula(t, 1, kind, rng)
    return formula.clause(0)


def sample_clause_arrays(t, kind, rng, count):
    """``count`` clauses as raw ``(heads, bodies)`` arrays; for bulk statistics."""
    formula = sample_formula(t, count, kind, rng)
    return formula.heads, formula.bodies


@dataclass(frozen=True)
class Rate:
    """Expected number of positive unit clauses, at finite n and in the limit.

    ``c = m / 2**n`` is kept alongside to make the universe choice visible:
    ``lambda_limit`` equals ``c`` for the padded universe and ``2c`` for the
    strict one.
    """

    n: int
    m: int
    kind: UniverseKind
    lam: float
    lambda_limit: float

    @property
    def c(self):
        return self.m / 2.0**self.n


def _kappa(kind):
    return 0.5 if UniverseKind.parse(kind) is UniverseKind.STRICT else 1.0


def effective_rate(n, m, kind=UniverseKind.STRICT):
    kind = UniverseKind.parse(kind)
    lam = m * n / universe_size(n, kind)
    return Rate(n=n, m=m, kind=kind, lam=lam, lambda_limit=m / (_kappa(kind) * 2.0**n))


def clauses_for_rate(n, lam, kind=UniverseKind.STRICT):
    """Clause count whose finite-n rate ``m*n/|U|`` is closest to ``lam``."""
    return max(0, round(lam * universe_size(n, kind) / n))


def clauses_for_c(n, c):
    return max(0, round(c * 2**n))

