"""The limiting relaxation equation and comparisons of simulated marginals against it.

The one-particle passive law converges (weakly, as N/M -> infinity with
N/M^2 -> 0 and fast active mixing) to the solution of

    df/dt = M(v) - f(v),    M = standard normal,

whose explicit solution is the mixture  f(v, t) = e^-t f0(v) + (1 - e^-t) M(v).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.special import betainc, erfc

from .observables import Histogram, ks_statistic, l1_distance, passive_histogram
from .sampler import marginal_density
from .simulator import EnsembleResult

__all__ = [
    "GaussianDensity",
    "SphereMarginalDensity",
    "InitialDensity",
    "bgk_solution",
    "bgk_cdf",
    "compare_to_limit",
]

# Composite-Simpson defaults for mass checks: the mixtures involved are
# smooth and negligible outside [-12, 12].
QUAD_RANGE = 12.0
QUAD_PANELS = 4800


@dataclass(frozen=True)
class GaussianDensity:
    """Centered normal density with standard deviation sigma."""

    sigma: float = 1.0

    def __post_init__(self):
        if not (self.sigma > 0.0) or not math.isfinite(self.sigma):
            raise ValueError("sigma must be positive and finite")

    def pdf(self, x):
        x = np.asarray(x, dtype=np.float64)
        return np.exp(-0.5 * (x / self.sigma) ** 2) / (self.sigma * math.sqrt(2.0 * math.pi))

    def cdf(self, x):
        x = np.asarray(x, dtype=np.float64)
        return 0.5 * erfc(-x / (self.sigma * math.sqrt(2.0)))


@dataclass(frozen=True)
class SphereMarginalDensity:
    """One coordinate of a uniform point on S^{m-1}(sqrt(m)); unit variance."""

    m: int

    def __post_init__(self):
        if self.m < 3:
            raise ValueError("sphere marginal requires m >= 3")

    def pdf(self, x):
        return marginal_density(self.m, x)

    def cdf(self, x):
        # x^2 / m is Beta(1/2, (m-1)/2) distributed, so the two-sided cdf
        # follows from the regularized incomplete beta function.
        x = np.asarray(x, dtype=np.float64)
        u = np.clip(x * x / self.m, 0.0, 1.0)
        half = betainc(0.5, 0.5 * (self.m - 1), u)
        return 0.5 * (1.0 + np.sign(x) * half)


InitialDensity = Union[GaussianDensity, SphereMarginalDensity]

_MAXWELLIAN = GaussianDensity(1.0)


def bgk_solution(f0: InitialDensity, v, t: float):
    """Mixture solution e^-t f0 + (1 - e^-t) M of the relaxation equation."""
    if t < 0.0:
        raise ValueError("t must be nonnegative")
    a = math.exp(-t)
    return a * f0.pdf(v) + (1.0 - a) * _MAXWELLIAN.pdf(v)


def bgk_cdf(f0: InitialDensity, v, t: float):
    """CDF of the mixture solution."""
    if t < 0.0:
        raise ValueError("t must be nonnegative")
    a = math.exp(-t)
    return a * f0.cdf(v) + (1.0 - a) * _MAXWELLIAN.cdf(v)


def compare_to_limit(ensemble: EnsembleResult, f0: InitialDensity, t: float,
                     lo: float = -6.0, hi: float = 6.0, bins: int = 120) -> tuple[float, float]:
    """(L1, KS) distances of the pooled passive marginal at time t from the mixture."""
    hist: Histogram = passive_histogram(ensemble, t, lo=lo, hi=hi, bins=bins)
    l1 = l1_distance(hist, lambda x: bgk_solution(f0, x, t))
    s = ensemble.time_index(t)
    pooled = ensemble.v_snapshots[:, s, :].ravel()
    ks = ks_statistic(pooled, lambda x: bgk_cdf(f0, x, t))
    return l1, ks
