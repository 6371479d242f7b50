"""Random Horn satisfiability: generator, positive unit resolution and its limit laws."""

__version__ = "0.1.0"

from .core import (
    Assignment,
    ClauseClass,
    HornClause,
    HornFormula,
    UniverseKind,
    class_counts,
    classify_clause,
    enumerate_universe,
    evaluate,
    universe_size,
)
from .dimacs import parse_dimacs, read_dimacs, write_dimacs
from .generator import Rate, effective_rate, sample_clause, sample_formula
from .rng import RngStream
from .solver import SolveOutcome, StageEvent, StageRecord, Status, brute_force_solve, pur2_run, pur3_run, pur_solve, unit_prop_solve

__all__ = [
    "Assignment",
    "ClauseClass",
    "HornClause",
    "HornFormula",
    "Rate",
    "RngStream",
    "SolveOutcome",
    "StageEvent",
    "StageRecord",
    "Status",
    "UniverseKind",
    "brute_force_solve",
    "class_counts",
    "classify_clause",
    "effective_rate",
    "enumerate_universe",
    "evaluate",
    "parse_dimacs",
    "pur2_run",
    "pur3_run",
    "pur_solve",
    "read_dimacs",
    "sample_clause",
    "sample_formula",
    "unit_prop_solve",
    "universe_size",
    "write_dimacs",
]
