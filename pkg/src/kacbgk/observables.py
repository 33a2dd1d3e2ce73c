"""Ensemble statistics: moment functionals with error bars, histograms, distances.

The four moments tracked per sample time are

    eta  = mean of (tau - 1)           excess active energy
    psi  = mean of (tau - 1)^2         its second moment
    zeta = mean of (m4(W) - m4~(V))    quartic eigenfunction / M
    xi   = mean of m4(V)               passive fourth moment

with standard errors computed across replicas.  Reductions run in replica
order so repeated runs reduce identically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .simulator import EnsembleResult, _splitmix64

__all__ = [
    "MomentRecord",
    "Histogram",
    "empirical_moments",
    "passive_histogram",
    "l1_distance",
    "ks_statistic",
    "pair_energy_covariance",
    "fit_exponential_rate",
]

_PAIR_SEED_TAG = 0x70A1B5EE

# Histogram defaults: out-of-range mass is tracked separately because the
# sphere support can exceed [-6, 6] for small N + M.
DEFAULT_LO = -6.0
DEFAULT_HI = 6.0
DEFAULT_BINS = 120


@dataclass(frozen=True)
class MomentRecord:
    """Moments at one time, each with a standard error (zero for exact oracles)."""

    t: float
    eta: float
    eta_se: float
    psi: float
    psi_se: float
    zeta: float
    zeta_se: float
    xi: float
    xi_se: float


@dataclass
class Histogram:
    """Counts on uniform bins of [lo, hi]; sum(counts) <= total, the rest is out of range."""

    lo: float
    hi: float
    bins: int
    counts: np.ndarray
    total: int

    @property
    def edges(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.bins + 1)


def empirical_moments(ensemble: EnsembleResult) -> list[MomentRecord]:
    """Replica averages of the four moments, one record per sample time."""
    r = ensemble.replicas
    if r < 2:
        raise ValueError("standard errors need at least 2 replicas")
    m = ensemble.params.n_active
    sqr = math.sqrt(r)

    eta_vals = ensemble.tau - 1.0
    psi_vals = eta_vals**2
    zeta_vals = ensemble.m4_active - (3.0 * m / (m + 2.0)) * ensemble.tau**2
    xi_vals = ensemble.m4_passive

    records = []
    for s, t in enumerate(ensemble.times):
        cols = [vals[:, s] for vals in (eta_vals, psi_vals, zeta_vals, xi_vals)]
        stats = [(float(np.mean(c)), float(np.std(c, ddof=1) / sqr)) for c in cols]
        records.append(MomentRecord(
            t=float(t),
            eta=stats[0][0], eta_se=stats[0][1],
            psi=stats[1][0], psi_se=stats[1][1],
            zeta=stats[2][0], zeta_se=stats[2][1],
            xi=stats[3][0], xi_se=stats[3][1]))
    return records


def passive_histogram(ensemble: EnsembleResult, t: float, lo: float = DEFAULT_LO,
                      hi: float = DEFAULT_HI, bins: int = DEFAULT_BINS) -> Histogram:
    """Pool all N passive coordinates across replicas at time t into one histogram."""
    if ensemble.v_snapshots is None:
        raise ValueError("ensemble was run without record_snapshots")
    if bins < 1:
        raise ValueError("bins must be >= 1")
    s = ensemble.time_index(t)
    pooled = ensemble.v_snapshots[:, s, :].ravel()
    counts, _ = np.histogram(pooled, bins=np.linspace(lo, hi, bins + 1))
    return Histogram(lo=lo, hi=hi, bins=bins, counts=counts.astype(np.int64),
                     total=int(pooled.size))


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


def _panel_masses(f, edges: np.ndarray) -> np.ndarray:
    """Per-panel integrals of a vectorized density by 8-point Gauss-Legendre.

    The nodes are strictly interior, so densities that jump exactly at
    panel edges (piecewise-constant histogram densities) integrate exactly.
    """
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * np.diff(edges)
    grid = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    vals = np.asarray(f(grid.ravel()), dtype=np.float64).reshape(grid.shape)
    return half * (vals @ _GL_WEIGHTS)


def _range_mass(f, a: float, b: float, panel_width: float = 0.05) -> float:
    if b <= a:
        return 0.0
    n = max(1, int(math.ceil((b - a) / panel_width)))
    return float(np.sum(_panel_masses(f, np.linspace(a, b, n + 1))))


def l1_distance(hist: Histogram, density) -> float:
    """L1 distance between a histogram and a vectorized density.

    Sum over bins of |count/total - integral of density over the bin|, plus
    the out-of-range empirical mass, plus the density mass outside [lo, hi]
    (integrated over [-12, 12] extended to cover the histogram range).
    Lies in [0, 2].
    """
    if hist.total <= 0:
        raise ValueError("histogram is empty")
    p_bins = _panel_masses(density, hist.edges)
    emp = hist.counts / hist.total
    inside = float(np.sum(np.abs(emp - p_bins)))
    out_of_range = (hist.total - int(hist.counts.sum())) / hist.total
    tail = max(_range_mass(density, min(hist.lo, -12.0), hist.lo), 0.0)
    tail += max(_range_mass(density, hist.hi, max(hist.hi, 12.0)), 0.0)
    return inside + out_of_range + tail


def ks_statistic(samples, cdf) -> float:
    """Sup over the sorted samples of |empirical CDF - cdf|.

    The empirical CDF is the right-continuous step function, evaluated at
    the sample points, so a sample set compared against its own empirical
    CDF gives exactly zero.
    """
    x = np.sort(np.asarray(samples, dtype=np.float64))
    if x.size == 0:
        raise ValueError("empty sample")
    f = np.asarray(cdf(x), dtype=np.float64)
    ecdf = np.arange(1, x.size + 1) / x.size
    return float(np.max(np.abs(f - ecdf)))


def pair_energy_covariance(ensemble: EnsembleResult, t: float, n_pairs: int = 1000,
                           return_stderr: bool = False):
    """Replica-averaged covariance between squared distinct passive coordinates.

    A factorization (chaos) diagnostic: for a product measure it vanishes;
    on the uniform sphere in n dimensions it equals -2/(n+2).  Estimated on
    a fixed, seed-derived subset of ``n_pairs`` coordinate pairs per replica,
    centered with the global mean of v^2 at time t.
    """
    if ensemble.v_snapshots is None:
        raise ValueError("ensemble was run without record_snapshots")
    n = ensemble.params.n_passive
    if n < 2:
        raise ValueError("need at least two passive coordinates")
    s = ensemble.time_index(t)
    vs = ensemble.v_snapshots[:, s, :]

    pair_rng = np.random.Generator(np.random.PCG64(
        _splitmix64(ensemble.params.seed ^ _PAIR_SEED_TAG)))
    ia = pair_rng.integers(0, n, size=n_pairs)
    ib = pair_rng.integers(0, n - 1, size=n_pairs)
    ib = np.where(ib >= ia, ib + 1, ib)

    sq = vs**2
    m2 = float(np.mean(sq))
    per_replica = np.mean((sq[:, ia] - m2) * (sq[:, ib] - m2), axis=1)
    cov = float(np.mean(per_replica))
    if not return_stderr:
        return cov
    se = float(np.std(per_replica, ddof=1) / math.sqrt(ensemble.replicas))
    return cov, se


def fit_exponential_rate(times, values, stderrs, min_snr: float = 5.0,
                         min_points: int = 3) -> float:
    """Decay rate from a weighted log-linear fit of y ~ y0 * exp(-rate * t).

    Only points whose magnitude exceeds ``min_snr`` standard errors (with the
    sign of the largest value) enter the fit; weights are (y / se)^2, the
    inverse variance of log|y| to first order.
    """
    t = np.asarray(times, dtype=np.float64)
    y = np.asarray(values, dtype=np.float64)
    se = np.asarray(stderrs, dtype=np.float64)
    sign = 1.0 if y[np.argmax(np.abs(y))] >= 0 else -1.0
    ys = sign * y
    floor = 1e-9 * float(np.max(np.abs(y)))
    se_eff = np.maximum(se, floor)
    mask = ys > min_snr * se_eff
    if int(np.sum(mask)) < min_points:
        raise ValueError("too few points above the noise floor for a rate fit")
    tt, yy, ww = t[mask], ys[mask], (ys[mask] / se_eff[mask]) ** 2
    ly = np.log(yy)
    wsum = np.sum(ww)
    tbar = np.sum(ww * tt) / wsum
    ybar = np.sum(ww * ly) / wsum
    slope = np.sum(ww * (tt - tbar) * (ly - ybar)) / np.sum(ww * (tt - tbar) ** 2)
    return float(-slope)
