"""Horn clauses, formulas, clause universes and assignment evaluation.

A formula stores its clauses column-wise: ``heads[i]`` is the positive
variable of clause ``i`` (0 when the clause is negative) and ``bodies[i]``
is a packed bit mask of its negated variables, spread over
``ceil(n / 64)`` words.  Variable ``v`` lives in bit ``(v - 1) % 64`` of
word ``(v - 1) // 64``.  The columnar layout is what lets the solver and
generator kernels handle millions of clauses; ``HornClause`` is the
per-clause view used at API boundaries.
"""

import enum
import itertools
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArity, InvalidClause


class UniverseKind(enum.Enum):
    """Which set of nonempty Horn clauses the random model draws from.

    STRICT clauses never contain a complementary pair (head not in body).
    PADDED clauses pair any head (or none) with any subset of the variables.
    """

    STRICT = "strict"
    PADDED = "padded"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown universe kind {value!r}") from None


class ClauseClass(enum.Enum):
    POSITIVE_UNIT = "PU"
    POSITIVE_NON_UNIT = "PNU"
    NEGATIVE_UNIT = "NU"
    NEGATIVE_NON_UNIT = "NNU"
    EMPTY = "E"


def class_of(has_head, body_size):
    """Clause class from the two quantities that determine it."""
    if has_head:
        return ClauseClass.POSITIVE_UNIT if body_size == 0 else ClauseClass.POSITIVE_NON_UNIT
    if body_size == 0:
        return ClauseClass.EMPTY
    return ClauseClass.NEGATIVE_UNIT if body_size == 1 else ClauseClass.NEGATIVE_NON_UNIT


@dataclass(frozen=True)
class HornClause:
    """At most one positive literal (``head``) plus a set of negated variables."""

    head: int | None
    body: frozenset = frozenset()

    def __post_init__(self):
        body = frozenset(int(v) for v in self.body)
        object.__setattr__(self, "body", body)
        if self.head is not None:
            object.__setattr__(self, "head", int(self.head))
            if self.head < 1:
                raise InvalidClause(f"variable index must be >= 1, got {self.head}")
        elif not body:
            raise InvalidClause("the empty clause cannot appear in a formula")
        if body and min(body) < 1:
            raise InvalidClause(f"variable index must be >= 1, got {min(body)}")

    @property
    def is_tautology(self):
        return self.head is not None and self.head in self.body

    @property
    def max_var(self):
        return max(itertools.chain((self.head or 0,), self.body), default=0)

    def literals(self):
        """DIMACS literals: head first, then the body in ascending order."""
        lits = [self.head] if self.head is not None else []
        lits.extend(-v for v in sorted(self.body))
        return lits

    def __str__(self):
        return " v ".join(f"x{l}" if l > 0 else f"~x{-l}" for l in self.literals())


def classify_clause(clause):
    return class_of(clause.head is not None, len(clause.body))


def _check_arity(t):
    if t < 1:
        raise InvalidArity(f"variable count must be >= 1, got {t}")


def universe_size(t, kind=UniverseKind.STRICT):
    """Number of nonempty Horn clauses over ``t`` variables."""
    _check_arity(t)
    if UniverseKind.parse(kind) is UniverseKind.STRICT:
        return (t + 2) * 2 ** (t - 1) - 1
    return (t + 1) * 2**t - 1


def class_counts(t, kind=UniverseKind.STRICT):
    """Size of each clause class inside the universe over ``t`` variables."""
    _check_arity(t)
    strict = UniverseKind.parse(kind) is UniverseKind.STRICT
    return {
        ClauseClass.POSITIVE_UNIT: t,
        ClauseClass.POSITIVE_NON_UNIT: t * (2 ** (t - 1) - 1) if strict else t * (2**t - 1),
        ClauseClass.NEGATIVE_UNIT: t,
        ClauseClass.NEGATIVE_NON_UNIT: 2**t - 1 - t,
    }


def enumerate_universe(t, kind=UniverseKind.STRICT):
    """Every clause of the universe, heads in order ``None, 1..t``; bodies by bit pattern."""
    _check_arity(t)
    strict = UniverseKind.parse(kind) is UniverseKind.STRICT
    out = []
    for head in itertools.chain((None,), range(1, t + 1)):
        for bits in range(2**t):
            body = frozenset(v for v in range(1, t + 1) if bits >> (v - 1) & 1)
            if head is None and not body:
                continue
            if strict and head in body:
                continue
            out.append(HornClause(head, body))
    return out


def num_words(num_vars):
    return max(1, (num_vars + 63) // 64)


def body_to_words(body, num_vars):
    words = [0] * num_words(num_vars)
    for v in body:
        words[(v - 1) >> 6] |= 1 << ((v - 1) & 63)
    return words


def words_to_body(words):
    body = []
    for w, word in enumerate(words):
        word = int(word)
        while word:
            low = word & -word
            body.append(64 * w + low.bit_length())
            word ^= low
    return frozenset(body)


class HornFormula:
    """An ordered multiset of Horn clauses over variables ``1..num_vars``.

    Instances are immutable; the backing arrays are marked read-only.
    """

    __slots__ = ("num_vars", "heads", "bodies")

    def __init__(self, num_vars, heads, bodies, validate=True):
        num_vars = int(num_vars)
        _check_arity(num_vars)
        heads = np.ascontiguousarray(heads, dtype=np.int32)
        bodies = np.ascontiguousarray(bodies, dtype=np.uint64)
        w = num_words(num_vars)
        if bodies.ndim == 1 and w == 1:
            bodies = bodies.reshape(-1, 1)
        if heads.ndim != 1 or bodies.shape != (heads.shape[0], w):
            raise InvalidClause(
                f"expected heads of shape (m,) and bodies of shape (m, {w}), "
                f"got {heads.shape} and {bodies.shape}"
            )
        if validate and heads.size:
            if heads.min() < 0 or heads.max() > num_vars:
                raise InvalidClause("head variable out of range")
            spare = 64 * w - num_vars
            if spare and np.any(bodies[:, -1] >> np.uint64(64 - spare)):
                raise InvalidClause("body variable out of range")
            if np.any((heads == 0) & ~bodies.any(axis=1)):
                raise InvalidClause("the empty clause cannot appear in a formula")
        heads.flags.writeable = False
        bodies.flags.writeable = False
        self.num_vars = num_vars
        self.heads = heads
        self.bodies = bodies

    @classmethod
    def from_clauses(cls, num_vars, clauses):
        clauses = list(clauses)
        for i, clause in enumerate(clauses):
            if not isinstance(clause, HornClause):
                raise InvalidClause(f"clause {i + 1} is not a HornClause")
            if clause.max_var > num_vars:
                raise InvalidClause(f"clause {i + 1} mentions a variable above {num_vars}")
        heads = np.array([c.head or 0 for c in clauses], dtype=np.int32)
        bodies = np.array(
            [body_to_words(c.body, num_vars) for c in clauses], dtype=np.uint64
        ).reshape(len(clauses), num_words(num_vars))
        return cls(num_vars, heads, bodies)

    @classmethod
    def empty(cls, num_vars):
        return cls(num_vars, np.zeros(0, np.int32), np.zeros((0, num_words(num_vars)), np.uint64))

    @property
    def num_clauses(self):
        return int(self.heads.shape[0])

    def __len__(self):
        return self.num_clauses

    def clause(self, i):
        h = int(self.heads[i])
        return HornClause(h or None, words_to_body(self.bodies[i]))

    def __iter__(self):
        for i in range(self.num_clauses):
            yield self.clause(i)

    @property
    def clauses(self):
        return tuple(self)

    def body_sizes(self):
        return np.bitwise_count(self.bodies).sum(axis=1, dtype=np.int64)

    def profile_counts(self):
        """Count of each clause class in this formula."""
        sizes = self.body_sizes()
        positive = self.heads > 0
        return {
            ClauseClass.POSITIVE_UNIT: int(np.count_nonzero(positive & (sizes == 0))),
            ClauseClass.POSITIVE_NON_UNIT: int(np.count_nonzero(positive & (sizes > 0))),
            ClauseClass.NEGATIVE_UNIT: int(np.count_nonzero(~positive & (sizes == 1))),
            ClauseClass.NEGATIVE_NON_UNIT: int(np.count_nonzero(~positive & (sizes >= 2))),
        }

    def __eq__(self, other):
        if not isinstance(other, HornFormula):
            return NotImplemented
        return (
            self.num_vars == other.num_vars
            and np.array_equal(self.heads, other.heads)
            and np.array_equal(self.bodies, other.bodies)
        )

    __hash__ = None

    def __repr__(self):
        return f"HornFormula(num_vars={self.num_vars}, num_clauses={self.num_clauses})"


@dataclass(frozen=True)
class Assignment:
    """Total truth assignment; ``values[v - 1]`` is the value of variable ``v``."""

    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(bool(b) for b in self.values))

    @classmethod
    def from_true_set(cls, num_vars, true_vars):
        true_vars = set(true_vars)
        return cls(tuple(v in true_vars for v in range(1, num_vars + 1)))

    @classmethod
    def all_false(cls, num_vars):
        return cls((False,) * num_vars)

    @property
    def num_vars(self):
        return len(self.values)

    @property
    def true_set(self):
        return frozenset(v for v, b in enumerate(self.values, start=1) if b)

    def __getitem__(self, var):
        if var < 1:
            raise IndexError(var)
        return self.values[var - 1]


def evaluate(formula, assignment):
    """True iff ``assignment`` satisfies every clause of ``formula``."""
    if assignment.num_vars != formula.num_vars:
        raise ValueError(
            f"assignment covers {assignment.num_vars} variables, formula has {formula.num_vars}"
        )
    if formula.num_clauses == 0:
        return True
    true_words = np.array(body_to_words(assignment.true_set, formula.num_vars), dtype=np.uint64)
    values = np.array((False,) + assignment.values)
    head_true = values[formula.heads] & (formula.heads > 0)
    body_false = (formula.bodies & ~true_words).any(axis=1)
    return bool(np.all(head_true | body_false))
