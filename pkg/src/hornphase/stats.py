"""Small distribution utilities shared by the chain checks and sweeps."""

import math
from collections import Counter

import numpy as np

from .errors import NotNormalized

# key collecting the mass that falls outside a listed support
TAIL = "tail"

_NORMALIZATION_TOL = 1e-9


def _as_mapping(dist):
    if isinstance(dist, dict):
        return dist
    return dict(enumerate(dist))


def tv_distance(p, q):
    """Total variation distance ``0.5 * sum |p_i - q_i|`` over the union of supports.

    ``p`` and ``q`` are mappings from outcome to mass (sequences are indexed
    from 0).  Each must be nonnegative and sum to 1 within 1e-9.
    """
    p = _as_mapping(p)
    q = _as_mapping(q)
    for name, dist in (("p", p), ("q", q)):
        if any(v < 0 for v in dist.values()):
            raise NotNormalized(f"{name} has negative mass")
        total = math.fsum(dist.values())
        if abs(total - 1.0) > _NORMALIZATION_TOL:
            raise NotNormalized(f"{name} sums to {total!r}, not 1")
    keys = set(p) | set(q)
    return min(1.0, 0.5 * math.fsum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys))


def empirical_pmf(values, support=None):
    """Relative frequencies of ``values``; outcomes outside ``support`` go to ``TAIL``."""
    values = list(values)
    if not values:
        raise ValueError("no samples")
    counts = Counter(values)
    if support is not None:
        support = set(support)
        outside = sum(c for v, c in counts.items() if v not in support)
        counts = Counter({v: c for v, c in counts.items() if v in support})
        if outside:
            counts[TAIL] = outside
    total = len(values)
    return {k: c / total for k, c in counts.items()}


def binned(dist, support, tail_mass=None):
    """Restrict ``dist`` to ``support`` and put the rest (or ``tail_mass``) under ``TAIL``."""
    support = set(support)
    out = {k: v for k, v in dist.items() if k in support}
    rest = tail_mass if tail_mass is not None else 1.0 - math.fsum(out.values())
    if rest > 0:
        out[TAIL] = rest
    return out


def normal_ci(successes, trials, z=1.96):
    """Proportion with a normal-approximation interval: ``(p, lo, hi, se)``."""
    if trials <= 0:
        raise ValueError("need at least one trial")
    p = successes / trials
    se = math.sqrt(p * (1.0 - p) / trials)
    return p, p - z * se, p + z * se, se


def ccdf_table(samples, grid):
    """``Pr[X >= a]`` for each ``a`` in ``grid``."""
    s = np.sort(np.asarray(samples))
    grid = np.asarray(grid)
    return 1.0 - np.searchsorted(s, grid, side="left") / s.size
