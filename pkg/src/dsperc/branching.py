"""Binomial Galton–Watson processes (one and two types) and their analytic companions."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln


def gw_progeny(d: int, p: float, cap: int, rng: np.random.Generator) -> int:
    """Total progeny (root included) of a ``Bin(d, p)`` tree, returning ``cap`` once reached."""
    return int(gw_progeny_many(d, p, cap, 1, rng)[0])


def gw_progeny_many(d: int, p: float, cap: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """``size`` independent runs of :func:`gw_progeny`, generation-synchronous."""
    if cap < 1:
        raise ValueError("cap must be >= 1")
    total = np.ones(size, dtype=np.int64)
    gen = np.ones(size, dtype=np.int64)
    active = total < cap
    while active.any():
        kids = rng.binomial(gen[active] * d, p)
        total[active] += kids
        gen[active] = kids
        active &= (gen > 0) & (total < cap)
    return np.minimum(total, cap)


def gw_generation_sizes(d: int, p: float, generations: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """``(size, generations + 1)`` array of generation sizes ``X_0..X_k``."""
    out = np.zeros((size, generations + 1), dtype=np.int64)
    out[:, 0] = 1
    for k in range(1, generations + 1):
        out[:, k] = rng.binomial(out[:, k - 1] * d, p)
    return out


def gw_progeny_pmf(d: int, p: float, tmax: int) -> np.ndarray:
    """Exact ``P(T = t)`` for ``t = 0..tmax`` via the hitting-time identity
    ``P(T = t) = P(Bin(t d, p) = t - 1) / t``."""
    pmf = np.zeros(tmax + 1)
    for t in range(1, tmax + 1):
        trials, k = t * d, t - 1
        if k > trials:
            continue
        if p == 0.0:
            pmf[t] = 1.0 if t == 1 else 0.0
        elif p == 1.0:
            pmf[t] = (1.0 / t) if k == trials else 0.0
        else:
            logp = (gammaln(trials + 1) - gammaln(k + 1) - gammaln(trials - k + 1)
                    + k * math.log(p) + (trials - k) * math.log1p(-p))
            pmf[t] = math.exp(logp) / t
    return pmf


def poisson_ld_rate(lam: float) -> float:
    """``lam - 1 - log(lam)``."""
    if lam <= 0:
        raise ValueError("lambda must be positive")
    return lam - 1.0 - math.log(lam)


def progeny_tail_bound(lam: float, t: float) -> float:
    """``exp(-t * I_lam)`` clipped to ``[0, 1]``.

    For offspring mean at most ``lam < 1`` this bounds ``P(T > t)``; at
    ``t = 1`` it does not bound ``P(T >= 1) = 1``.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    return min(1.0, max(0.0, math.exp(-t * poisson_ld_rate(lam))))


@dataclass(frozen=True)
class TwoTypeSpec:
    """``trials[a][b]`` = trial count of ``xi_ab``, the type-``b`` offspring of a type-``a`` parent."""

    t11: int
    t12: int
    t21: int
    t22: int
    p: float
    start: tuple = (1, 0)

    def __post_init__(self):
        if min(self.t11, self.t12, self.t21, self.t22) < 0:
            raise ValueError("trial counts must be non-negative")
        if not 0 <= self.p <= 1:
            raise ValueError("p must lie in [0, 1]")


@dataclass(frozen=True)
class MeanMatrix:
    m11: object
    m12: object
    m21: object
    m22: object

    def as_array(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m21, self.m22]], dtype=float)


def mean_matrix(spec: TwoTypeSpec) -> MeanMatrix:
    # entries keep the numeric type of p, so Fraction inputs stay exact
    p = spec.p
    return MeanMatrix(spec.t11 * p, spec.t12 * p, spec.t21 * p, spec.t22 * p)


def spectral_radius(M) -> float:
    """Perron root of a non-negative 2x2 matrix: ``(a+d)/2 + sqrt(((a-d)/2)^2 + bc)``."""
    if isinstance(M, MeanMatrix):
        a, b, c, d = M.m11, M.m12, M.m21, M.m22
    else:
        (a, b), (c, d) = M
    a, b, c, d = float(a), float(b), float(c), float(d)
    return 0.5 * (a + d) + math.sqrt(0.25 * (a - d) ** 2 + b * c)


def two_type_progeny(spec: TwoTypeSpec, cap: int, rng: np.random.Generator) -> tuple[int, int]:
    out = two_type_progeny_many(spec, cap, 1, rng)
    return int(out[0, 0]), int(out[0, 1])


def two_type_progeny_many(spec: TwoTypeSpec, cap: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """``(size, 2)`` per-type totals; a run stops once the combined total reaches ``cap``."""
    if cap < 1:
        raise ValueError("cap must be >= 1")
    p = float(spec.p)
    g1 = np.full(size, spec.start[0], dtype=np.int64)
    g2 = np.full(size, spec.start[1], dtype=np.int64)
    tot = np.column_stack((g1, g2)).astype(np.int64)
    active = ((g1 + g2) > 0) & (tot.sum(axis=1) < cap)
    while active.any():
        a1, a2 = g1[active], g2[active]
        k1 = rng.binomial(a1 * spec.t11, p) + rng.binomial(a2 * spec.t21, p)
        k2 = rng.binomial(a1 * spec.t12, p) + rng.binomial(a2 * spec.t22, p)
        g1[active], g2[active] = k1, k2
        tot[active, 0] += k1
        tot[active, 1] += k2
        active &= ((g1 + g2) > 0) & (tot.sum(axis=1) < cap)
    return tot


def cap_hit_fraction(spec: TwoTypeSpec, cap: int, runs: int, rng: np.random.Generator) -> float:
    tot = two_type_progeny_many(spec, cap, runs, rng)
    return float(np.mean(tot.sum(axis=1) >= cap))
