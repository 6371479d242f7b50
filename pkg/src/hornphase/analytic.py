"""Closed-form limit laws for the random Horn model.

Everything here is a function of the effective rate ``lam`` (the expected
number of positive unit clauses).  Functions that take a rate accept either
a float or a :class:`~hornphase.generator.Rate`; for the latter the limiting
value ``lambda_limit`` is used.

Products of the form ``prod(1 - exp(-2**i * lam))`` are evaluated with
``expm1`` so that small rates keep full relative precision.
"""

import math
from dataclasses import dataclass

import numpy as np

from .core import UniverseKind, universe_size
from .errors import DomainError

# exp(-x) underflows to exactly zero past this; factors are then exactly 1
_EXP_CUTOFF = 745.0
_ETA_TRUNCATION = 1e-12


def _rate(lam):
    lam = getattr(lam, "lambda_limit", lam)
    lam = float(lam)
    if not math.isfinite(lam):
        raise DomainError(f"rate must be finite, got {lam}")
    return lam


def _check_unit_interval(x):
    if not (0.0 <= x < 1.0):
        raise DomainError(f"argument must lie in [0, 1), got {x}")


def f_product(x, tol=1e-12):
    """``F(x) = prod_{k>=0} (1 - x**(2**k))``, absolute error below ``tol``.

    The product stops once the remaining factors can move it by less than
    ``sum_{j>=k} x**(2**j) <= x**(2**k) / (1 - x)``.
    """
    x = float(x)
    _check_unit_interval(x)
    if tol <= 0:
        raise DomainError("tolerance must be positive")
    value = 1.0
    power = x
    while power / (1.0 - x) >= tol:
        value *= 1.0 - power
        power *= power
    return value


def f_series(x, num_terms):
    """Taylor partial sum ``sum_{i<num_terms} (-1)**popcount(i) * x**i`` of ``F``."""
    x = float(x)
    _check_unit_interval(x)
    if num_terms <= 0:
        return 0.0
    i = np.arange(num_terms, dtype=np.uint64)
    signs = 1.0 - 2.0 * (np.bitwise_count(i) & 1)
    return float(np.sum(signs * x ** i.astype(np.float64)))


def f_of_rate(lam):
    """``F(exp(-lam))`` computed factor by factor as ``-expm1(-2**k * lam)``.

    Factors are taken until they round to exactly 1.
    """
    lam = _rate(lam)
    if lam <= 0:
        raise DomainError(f"rate must be positive, got {lam}")
    value = 1.0
    a = lam
    while a < 40.0:
        value *= -math.expm1(-a)
        a *= 2.0
    return value


def sat_prob_limit(lam):
    """Limiting satisfiability probability ``1 - F(exp(-lam))``."""
    lam = _rate(lam)
    if lam < 0:
        raise DomainError(f"rate must be nonnegative, got {lam}")
    if lam == 0:
        return 1.0
    return 1.0 - f_of_rate(lam)


def partial_pi(lam, k):
    """Survival through the first ``k`` stages: ``prod_{i<k} (1 - exp(-2**i * lam))``."""
    lam = _rate(lam)
    if k < 0:
        raise DomainError("k must be nonnegative")
    if lam <= 0:
        return 1.0 if k == 0 else 0.0
    value = 1.0
    a = lam
    for _ in range(k):
        if a >= _EXP_CUTOFF:
            break
        value *= -math.expm1(-a)
        a *= 2.0
    return value


def _accept_weight(lam, k):
    # probability of accepting after exactly k iterations, unnormalized
    a = math.ldexp(lam, k) if k < 1100 else math.inf
    return math.exp(-a) * partial_pi(lam, k)


@dataclass(frozen=True)
class RhoDistribution:
    """Limit law of the number of iterations given satisfiability.

    ``probabilities[k]`` is the mass at ``k``; ``tail_mass`` is the exact
    mass beyond the last listed value.
    """

    lam: float
    probabilities: tuple
    tail_mass: float

    @property
    def kmax(self):
        return len(self.probabilities) - 1

    def pmf(self, k):
        if 0 <= k < len(self.probabilities):
            return self.probabilities[k]
        return 0.0

    def as_dict(self):
        return dict(enumerate(self.probabilities))


def rho_distribution(lam, kmax=40):
    lam = _rate(lam)
    if lam <= 0:
        raise DomainError(f"rate must be positive, got {lam}")
    if kmax < 0:
        raise DomainError("kmax must be nonnegative")
    f = f_of_rate(lam)
    denom = 1.0 - f
    probs = tuple(_accept_weight(lam, k) / denom for k in range(kmax + 1))
    # telescoping: the weights from k on sum to partial_pi(lam, k) - F
    tail = max(0.0, (partial_pi(lam, kmax + 1) - f) / denom)
    return RhoDistribution(lam=lam, probabilities=probs, tail_mass=tail)


def acceptance_sum(lam, kmax=40):
    """``sum_{k<=kmax} exp(-2**k lam) * partial_pi(lam, k)``; tends to ``sat_prob_limit``."""
    lam = _rate(lam)
    return math.fsum(_accept_weight(lam, k) for k in range(kmax + 1))


# ---------------------------------------------------------------- UNSAT side


def wobble_tail(k, c):
    """``G(k, c) = exp(-c * sum_{j<=k} 2**j) = exp(-c * 2**(k+1))``."""
    if c <= 0:
        raise DomainError(f"scale must be positive, got {c}")
    if k >= 1100:
        return 0.0
    return math.exp(-math.ldexp(c, k + 1))


def eta_probability(k, c):
    """``G(k-1, c) - G(k, c)``, evaluated without cancellation."""
    if c <= 0:
        raise DomainError(f"scale must be positive, got {c}")
    if k >= 1100:
        return 0.0
    a = math.ldexp(c, k)
    return math.exp(-a) * -math.expm1(-a)


def wobble_scale(c_like, n, variant="sqrt"):
    """``c / 2**frac(log2 sqrt(n))`` (``sqrt``) or ``c / 2**frac(log2 n)`` (``linear``)."""
    if c_like <= 0:
        raise DomainError(f"scale must be positive, got {c_like}")
    if n < 2:
        raise DomainError(f"n must be at least 2, got {n}")
    if variant == "sqrt":
        exponent = 0.5 * math.log2(n)
    elif variant == "linear":
        exponent = math.log2(n)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return c_like / 2.0 ** (exponent - math.floor(exponent))


@dataclass(frozen=True)
class EtaDistribution:
    """Law of ``iterations - floor(log2 n)`` on unsatisfiable instances.

    Masses are listed for ``k = kmin..kmax``; ``truncation_mass`` is the
    exact total outside that window.
    """

    c_n: float
    kmin: int
    kmax: int
    probabilities: tuple
    truncation_mass: float
    variant: str = "sqrt"

    @property
    def support(self):
        return range(self.kmin, self.kmax + 1)

    def pmf(self, k):
        if self.kmin <= k <= self.kmax:
            return self.probabilities[k - self.kmin]
        return 0.0

    def as_dict(self):
        return dict(zip(self.support, self.probabilities))


def eta_window(c_n, kmin, kmax):
    """Masses on ``[kmin, kmax]`` plus the exact mass outside it."""
    probs = tuple(eta_probability(k, c_n) for k in range(kmin, kmax + 1))
    below = -math.expm1(-math.ldexp(c_n, kmin))  # 1 - G(kmin - 1)
    above = wobble_tail(kmax, c_n)
    return probs, below + above


def wobble_law(c_like, n, variant="sqrt"):
    c_n = wobble_scale(c_like, n, variant)
    # widen until each side holds less than the truncation threshold
    kmin = 0
    while -math.expm1(-math.ldexp(c_n, kmin)) >= _ETA_TRUNCATION / 2:
        kmin -= 1
    kmax = 0
    while wobble_tail(kmax, c_n) >= _ETA_TRUNCATION / 2:
        kmax += 1
    probs, outside = eta_window(c_n, kmin, kmax)
    return EtaDistribution(
        c_n=c_n, kmin=kmin, kmax=kmax, probabilities=probs, truncation_mass=outside, variant=variant
    )


# ---------------------------------------------------------------- finite n


def finite_accept_prob(t, n_clauses, kind=UniverseKind.STRICT):
    """Exact probability that ``n_clauses`` uniform clauses over ``t`` variables hold no positive unit."""
    if n_clauses < 0:
        raise DomainError("clause count must be nonnegative")
    u = universe_size(t, kind)
    return math.exp(n_clauses * math.log1p(-t / u))


def concentration_lower_bound(n, t, n_start):
    """Lower envelope ``N_n - (n - t) * (1 + 2 (N_n - 1) / t)`` at stage ``t``; the upper one is ``N_n``."""
    if not (1 <= t <= n):
        raise DomainError(f"need 1 <= t <= n, got t={t}, n={n}")
    if n_start < 1:
        raise DomainError("starting count must be positive")
    return n_start - (n - t) * (1.0 + 2.0 * (n_start - 1) / t)


# ---------------------------------------------------------------- carry-over walk


def _poisson_pmf(mean, kmax):
    if mean == 0:
        return np.eye(1, kmax + 1).ravel()
    j = np.arange(kmax + 1)
    logs = j * math.log(mean) - mean - np.array([math.lgamma(v + 1) for v in j])
    return np.exp(logs)


@dataclass(frozen=True)
class WalkLaw:
    """Acceptance law of the positive-unit walk ``H_{k+1} = H_k - 1 + Poisson(lam * 2**k)``."""

    lam: float
    accept: tuple  # accept[k]: probability of stopping after exactly k iterations

    @property
    def sat_prob(self):
        return math.fsum(self.accept)

    def rho(self):
        total = self.sat_prob
        return tuple(a / total for a in self.accept)


def walk_acceptance_law(lam, kmax=40):
    """Limit law obtained by following the class-count chain rather than fresh formulas.

    At large ``n`` rejections in the first few stages vanish, and the number
    of positive units evolves as ``H_0 ~ Poisson(lam)``, ``H_{k+1} = H_k - 1 +
    Poisson(lam * 2**k)`` while ``H_k > 0``; acceptance happens at the first
    ``k`` with ``H_k = 0``.  Since ``H`` falls by at most one per stage, values
    above ``kmax - k`` cannot reach zero in time and are dropped; the result
    is exact for acceptance within ``kmax`` stages.
    """
    lam = _rate(lam)
    if lam <= 0:
        raise DomainError(f"rate must be positive, got {lam}")
    cap = kmax + 1
    dist = _poisson_pmf(lam, cap)
    accept = []
    for k in range(kmax + 1):
        accept.append(float(dist[0]))
        if k == kmax:
            break
        alive = dist[1:]  # H = 1..cap, shifted down by the unit consumed
        fresh = _poisson_pmf(math.ldexp(lam, k), cap) if math.ldexp(lam, k) < 1e4 else np.zeros(cap + 1)
        dist = np.convolve(alive, fresh)[: cap + 1]
    return WalkLaw(lam=lam, accept=tuple(accept))
