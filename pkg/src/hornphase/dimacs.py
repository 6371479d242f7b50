"""DIMACS CNF reading and writing for Horn formulas."""

import warnings

import numpy as np

from .core import HornFormula, num_words
from .errors import (
    ClauseCountMismatch,
    ComplementaryClause,
    EmptyClauseInInput,
    LiteralOutOfRange,
    MalformedHeader,
    NonHornClause,
)


def _text(data):
    if isinstance(data, (bytes, bytearray, memoryview)):
        data = bytes(data).decode("ascii")
    return data


def parse_dimacs(data, strict=True, allow_tautologies=False):
    """Parse DIMACS CNF text (``str`` or ``bytes``) into a :class:`HornFormula`.

    Duplicate literals inside a clause are collapsed; duplicate clauses are
    kept.  With ``allow_tautologies`` a clause holding both ``v`` and ``-v``
    becomes ``(head=v, body={v, ...})``; otherwise it is rejected.  A clause
    count that disagrees with the header is an error when ``strict`` and a
    warning otherwise.
    """
    num_vars = declared = None
    heads = []
    bodies = []
    current = []

    def close_clause():
        index = len(heads) + 1
        if not current:
            raise EmptyClauseInInput(f"clause {index} is empty", index)
        lits = set(current)
        positives = {l for l in lits if l > 0}
        negatives = {-l for l in lits if l < 0}
        if len(positives) > 1:
            raise NonHornClause(f"clause {index} has {len(positives)} positive literals", index)
        if positives & negatives and not allow_tautologies:
            raise ComplementaryClause(f"clause {index} contains a complementary pair", index)
        words = [0] * num_words(num_vars)
        for v in negatives:
            words[(v - 1) >> 6] |= 1 << ((v - 1) & 63)
        heads.append(positives.pop() if positives else 0)
        bodies.append(words)
        current.clear()

    for lineno, raw in enumerate(_text(data).splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            if num_vars is not None:
                raise MalformedHeader(f"line {lineno}: second problem line")
            fields = line.split()
            if len(fields) != 4 or fields[1] != "cnf":
                raise MalformedHeader(f"line {lineno}: expected 'p cnf <vars> <clauses>'")
            try:
                num_vars, declared = int(fields[2]), int(fields[3])
            except ValueError:
                raise MalformedHeader(f"line {lineno}: non-integer header field") from None
            if num_vars < 1 or declared < 0:
                raise MalformedHeader(f"line {lineno}: header values out of range")
            continue
        if num_vars is None:
            raise MalformedHeader(f"line {lineno}: clause data before the problem line")
        for token in line.split():
            try:
                lit = int(token)
            except ValueError:
                raise MalformedHeader(f"line {lineno}: bad literal {token!r}") from None
            if lit == 0:
                close_clause()
            elif abs(lit) > num_vars:
                index = len(heads) + 1
                raise LiteralOutOfRange(
                    f"clause {index}: literal {lit} exceeds {num_vars} variables", index
                )
            else:
                current.append(lit)

    if num_vars is None:
        raise MalformedHeader("missing problem line")
    if current:
        # last clause without its terminating 0
        close_clause()
    if len(heads) != declared:
        message = f"header declares {declared} clauses, found {len(heads)}"
        if strict:
            raise ClauseCountMismatch(message)
        warnings.warn(message, stacklevel=2)
    bodies_arr = np.array(bodies, dtype=np.uint64).reshape(len(heads), num_words(num_vars))
    return HornFormula(num_vars, np.array(heads, dtype=np.int32), bodies_arr)


def write_dimacs(formula):
    """Serialize ``formula`` as DIMACS bytes (LF line endings, clause order kept)."""
    lines = [f"p cnf {formula.num_vars} {formula.num_clauses}"]
    for clause in formula:
        lines.append(" ".join(map(str, clause.literals())) + " 0")
    return ("\n".join(lines) + "\n").encode("ascii")


def read_dimacs(path, **kwargs):
    with open(path, "rb") as fh:
        return parse_dimacs(fh.read(), **kwargs)
