"""Initial-data generators on the energy sphere and analytic reference densities."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .model import ModelParams, SystemState

__all__ = [
    "InitKind",
    "InitSpec",
    "sphere_area",
    "log_sphere_area",
    "sample_uniform_sphere",
    "sample_initial",
    "marginal_density",
    "gaussian_density",
]

# Radius of the tiny active sphere in the passive-spike state; |W| = 0 would
# leave the rotation walk stuck at the origin sphere.
SPIKE_ACTIVE_RADIUS = 1e-6


class InitKind(enum.Enum):
    UNIFORM_SPHERE = "uniform"
    TWO_TEMPERATURE = "two_temperature"
    PASSIVE_SPIKE = "passive_spike"


@dataclass(frozen=True)
class InitSpec:
    """Initial-data family plus the pre-projection spreads for TwoTemperature."""

    kind: InitKind = InitKind.UNIFORM_SPHERE
    sigma_passive: float = 1.0
    sigma_active: float = 2.0

    def __post_init__(self):
        if self.kind is InitKind.TWO_TEMPERATURE:
            for name in ("sigma_passive", "sigma_active"):
                s = getattr(self, name)
                if not (s > 0.0) or not math.isfinite(s):
                    raise ValueError(f"{name} must be positive and finite")


def log_sphere_area(n: int, r: float) -> float:
    """log of the surface measure of S^{n-1}(r); finite for dimensions in the thousands.

    All large-n consumers (area ratios in the marginal density) work with
    log differences, which stay well inside double range even when the area
    itself does not.
    """
    if n < 1:
        raise ValueError("dimension must be >= 1")
    if not (r > 0.0):
        raise ValueError("radius must be positive")
    return (n - 1) * math.log(r) + math.log(2.0) + 0.5 * n * math.log(math.pi) - gammaln(0.5 * n)


def sphere_area(n: int, r: float) -> float:
    """Surface measure of the sphere S^{n-1}(r) in R^n.

    Evaluated as exp(log_sphere_area): the naive product r^(n-1) * 2
    pi^(n/2) / Gamma(n/2) breaks near n ~ 350 where Gamma overflows, while
    the log form only saturates (to inf or 0) when the area itself leaves
    double range.
    """
    la = log_sphere_area(n, r)
    try:
        return math.exp(la)
    except OverflowError:
        return math.inf


def sample_uniform_sphere(dim: int, radius: float, rng: np.random.Generator) -> np.ndarray:
    """Uniform point on S^{dim-1}(radius): scaled standard normal vector."""
    if dim < 1:
        raise ValueError("dimension must be >= 1")
    if not (radius > 0.0):
        raise ValueError("radius must be positive")
    while True:
        z = rng.standard_normal(dim)
        norm = np.linalg.norm(z)
        if norm > 0.0:
            return z * (radius / norm)


def sample_initial(params: ModelParams, spec: InitSpec, rng: np.random.Generator) -> SystemState:
    """Draw an initial state on the sphere |V|^2 + |W|^2 = N + M.

    UniformSphere: uniform measure on the whole sphere.
    TwoTemperature: independent centered normals with spreads sigma_passive /
    sigma_active, then the concatenated vector is rescaled onto the sphere.
    The whole vector is rescaled (not per species) so the active-energy
    fluctuations that the second moments measure survive the projection.
    PassiveSpike: all energy in the passive coordinates (random signs), the
    active part on a tiny sphere of radius SPIKE_ACTIVE_RADIUS.
    """
    n, m = params.n_passive, params.n_active
    radius = math.sqrt(n + m)
    if spec.kind is InitKind.UNIFORM_SPHERE:
        z = sample_uniform_sphere(n + m, radius, rng)
        return SystemState(z[:n], z[n:])
    if spec.kind is InitKind.TWO_TEMPERATURE:
        while True:
            v = rng.standard_normal(n) * spec.sigma_passive
            w = rng.standard_normal(m) * spec.sigma_active
            norm = math.sqrt(np.dot(v, v) + np.dot(w, w))
            if norm > 0.0:
                break
        scale = radius / norm
        return SystemState(v * scale, w * scale)
    if spec.kind is InitKind.PASSIVE_SPIKE:
        signs = np.where(rng.random(n) < 0.5, -1.0, 1.0)
        v = signs * math.sqrt((n + m) / n)
        w = sample_uniform_sphere(m, SPIKE_ACTIVE_RADIUS, rng)
        scale = radius / math.sqrt(np.dot(v, v) + np.dot(w, w))
        return SystemState(v * scale, w * scale)
    raise ValueError(f"unknown init kind {spec.kind!r}")


def marginal_density(m: int, x) -> np.ndarray | float:
    """Density of one coordinate of a uniform point on S^{m-1}(sqrt(m)).

    M_m(x) = Gamma(m/2) / (Gamma((m-1)/2) sqrt(m pi)) * (1 - x^2/m)^((m-3)/2)
    for |x| < sqrt(m), zero outside.  Requires m >= 3; for m in {1, 2} the
    marginal is atomic or has integrable singularities.  Converges to the
    standard normal density as m grows.
    """
    if m < 3:
        raise ValueError("marginal density requires m >= 3")
    x_arr = np.asarray(x, dtype=np.float64)
    scalar = x_arr.ndim == 0
    x_arr = np.atleast_1d(x_arr)
    out = np.zeros_like(x_arr)
    logc = gammaln(0.5 * m) - gammaln(0.5 * (m - 1)) - 0.5 * math.log(m * math.pi)
    inside = np.abs(x_arr) < math.sqrt(m)
    xi = x_arr[inside]
    out[inside] = np.exp(logc + (0.5 * (m - 3)) * np.log1p(-(xi * xi) / m))
    return float(out[0]) if scalar else out


def gaussian_density(x) -> np.ndarray | float:
    """Standard normal density, the limit of marginal_density as m -> infinity."""
    x_arr = np.asarray(x, dtype=np.float64)
    out = np.exp(-0.5 * x_arr * x_arr) / math.sqrt(2.0 * math.pi)
    return float(out) if out.ndim == 0 else out
