"""Domain types and pure functionals of the two-species velocity jump process.

N passive velocities V and M active velocities W live on the energy sphere
|V|^2 + |W|^2 = N + M.  Two jump maps act on a state: a planar rotation of
an active pair (conserves the pair energy) and an exchange that swaps one
passive velocity with one active one (conserves the coordinate multiset).
The functionals below are the quantities every other module measures,
predicts, or fits.

Indices are 0-based everywhere in code.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ModelParams",
    "SystemState",
    "EventKind",
    "Event",
    "total_energy",
    "kac_rotation",
    "exchange",
    "tau",
    "fourth_moment",
    "m4_tilde",
    "kac_eigenfunction",
    "spectral_gap",
]

_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class ModelParams:
    """System size (N passive, M active), rotation intensity, and RNG seed.

    The exchange intensity is normalized to 1, so rotations of active pairs
    occur at total rate ``lam * N * M`` and exchanges at total rate ``N``.
    """

    n_passive: int
    n_active: int
    lam: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.n_active < 2:
            raise ValueError("n_active must be >= 2 (pair rotations need at least two active velocities)")
        if self.n_passive <= self.n_active:
            raise ValueError("n_passive must exceed n_active")
        if not (self.lam > 0.0) or not math.isfinite(self.lam):
            raise ValueError("lam must be positive and finite")
        if not (0 <= int(self.seed) <= _SEED_MASK):
            raise ValueError("seed must fit in 64 unsigned bits")

    @property
    def n_total(self) -> int:
        return self.n_passive + self.n_active

    @property
    def kac_rate(self) -> float:
        """Total rate of active-pair rotation events."""
        return self.lam * self.n_passive * self.n_active

    @property
    def exchange_rate(self) -> float:
        """Total rate of passive/active exchange events."""
        return float(self.n_passive)

    @property
    def relaxation_rate(self) -> float:
        """Decay rate 1 + N/M of the mean active-energy excess."""
        return 1.0 + self.n_passive / self.n_active

    @property
    def gap_rate(self) -> float:
        """Decay rate lam * N * gap of the quartic eigenfunction."""
        return self.lam * self.n_passive * spectral_gap(self.n_active)


@dataclass
class SystemState:
    """Point (V, W) on the sphere |V|^2 + |W|^2 = N + M."""

    v: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        self.v = np.ascontiguousarray(self.v, dtype=np.float64)
        self.w = np.ascontiguousarray(self.w, dtype=np.float64)
        if self.v.ndim != 1 or self.w.ndim != 1 or self.v.size == 0 or self.w.size == 0:
            raise ValueError("v and w must be nonempty 1-d arrays")

    @property
    def n_passive(self) -> int:
        return self.v.size

    @property
    def n_active(self) -> int:
        return self.w.size

    def copy(self) -> "SystemState":
        return SystemState(self.v.copy(), self.w.copy())

    def sphere_residual(self) -> float:
        """Relative deviation of the total energy from N + M."""
        n = self.v.size + self.w.size
        return abs(total_energy(self) / n - 1.0)


class EventKind(enum.Enum):
    KAC_ROTATION = "kac_rotation"
    EXCHANGE = "exchange"


@dataclass(frozen=True)
class Event:
    """One jump: waiting time, kind, indices, and (for rotations) the angle.

    For rotations j < k index the active pair; for exchanges j indexes the
    passive and k the active coordinate.  ``theta`` is None for exchanges.
    """

    dt: float
    kind: EventKind
    j: int
    k: int
    theta: float | None = field(default=None)


def total_energy(state: SystemState) -> float:
    """|V|^2 + |W|^2 (the conserved quantity; the physical 1/2 is dropped)."""
    return float(np.dot(state.v, state.v) + np.dot(state.w, state.w))


def kac_rotation(state: SystemState, j: int, k: int, theta: float) -> SystemState:
    """Rotate the active pair (w_j, w_k), j < k, by angle theta.

    (w_j, w_k) -> (w_j cos t - w_k sin t, w_j sin t + w_k cos t); all other
    coordinates are returned bitwise unchanged.
    """
    m = state.n_active
    if not (0 <= j < k < m):
        raise IndexError(f"need 0 <= j < k < {m}, got j={j}, k={k}")
    out = state.copy()
    c, s = math.cos(theta), math.sin(theta)
    wj, wk = out.w[j], out.w[k]
    out.w[j] = wj * c - wk * s
    out.w[k] = wj * s + wk * c
    return out


def exchange(state: SystemState, j: int, k: int) -> SystemState:
    """Swap passive v_j with active w_k; the coordinate multiset is preserved."""
    if not (0 <= j < state.n_passive):
        raise IndexError(f"passive index {j} out of range")
    if not (0 <= k < state.n_active):
        raise IndexError(f"active index {k} out of range")
    out = state.copy()
    out.v[j], out.w[k] = out.w[k], out.v[j]
    return out


def tau(state: SystemState) -> float:
    """Mean energy per active particle, (N + M - |V|^2) / M.

    Equals |W|^2 / M whenever the sphere constraint holds.
    """
    n = state.n_passive + state.n_active
    return float((n - np.dot(state.v, state.v)) / state.n_active)


def fourth_moment(x: np.ndarray) -> float:
    """Mean of the fourth powers of a nonempty sequence."""
    x = np.asarray(x, dtype=np.float64)
    if x.size == 0:
        raise ValueError("empty sequence")
    return float(np.mean(x**4))


def m4_tilde(state: SystemState) -> float:
    """Sphere average of the active fourth moment, 3M/(M+2) * tau(V)^2."""
    m = state.n_active
    t = tau(state)
    return 3.0 * m / (m + 2.0) * t * t


def kac_eigenfunction(state: SystemState) -> float:
    """Quartic eigenfunction phi = sum_j w_j^4 - 3|W|^4/(M+2) of the rotation generator.

    Expressed through the sphere constraint as M * (m4(W) - m4_tilde(V));
    it decays at rate lam * N * spectral_gap(M) under the pure rotation walk.
    """
    return state.n_active * (fourth_moment(state.w) - m4_tilde(state))


def spectral_gap(m: int) -> float:
    """Spectral gap (m + 2) / (2(m - 1)) of the normalized rotation generator; >= 1/2."""
    if m < 2:
        raise ValueError("spectral gap requires at least two active particles")
    return (m + 2.0) / (2.0 * (m - 1.0))
