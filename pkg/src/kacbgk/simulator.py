"""Exact continuous-time simulation of the jump process by competing exponential clocks.

Rotation and exchange rates are state-independent, so the competing-clock
(Gillespie) scheme is exact: waiting times are exponential with the total
rate and the event kind is a Bernoulli thinning.  The inner loop lives in a
compiled extension when available (`kacbgk._event_loop`) with a pure-Python
fallback selected at import; set ``KACBGK_PURE_PYTHON=1`` to force the
fallback.  Both backends consume the replica's uniform stream identically
and produce bitwise-identical trajectories.

Reproducibility contract: replica ``i`` of a run with seed ``s`` uses a
``numpy`` PCG64 generator seeded with ``splitmix64(s + (i+1) * 2**64/phi)``
(see `replica_seed`); all randomness is drawn from that stream, first for
the initial state, then for the event loop in chunks of CHUNK_EVENTS rows
of five uniforms.  Identical inputs therefore give bitwise-identical
ensembles on a given platform, for either backend.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

from .model import Event, EventKind, ModelParams, SystemState, total_energy
from .sampler import InitSpec, sample_initial

from . import _event_loop_py

if os.environ.get("KACBGK_PURE_PYTHON"):
    _kernel = _event_loop_py
else:
    try:
        from . import _event_loop as _kernel
    except ImportError:
        _kernel = _event_loop_py

__all__ = [
    "Schedule",
    "TrajectorySample",
    "EnsembleResult",
    "backend_name",
    "replica_seed",
    "next_event",
    "renormalize",
    "advance",
    "run_ensemble",
]

CHUNK_EVENTS = 4096
RENORM_THRESHOLD = 1e-9
RENORM_CHECK_EVERY = 10_000

_MASK64 = (1 << 64) - 1
_GOLDEN64 = 0x9E3779B97F4A7C15


def backend_name() -> str:
    """Name of the active event-loop backend: "cython" or "python"."""
    return _kernel.BACKEND_NAME


def _splitmix64(x: int) -> int:
    x = (x + _GOLDEN64) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def replica_seed(seed: int, replica: int) -> int:
    """64-bit mix of (seed, replica): splitmix64 of seed + (replica+1) * golden."""
    return _splitmix64((seed + (replica + 1) * _GOLDEN64) & _MASK64)


def _replica_rng(seed: int, replica: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(replica_seed(seed, replica)))


@dataclass(frozen=True)
class Schedule:
    """Horizon and the sorted times at which trajectory functionals are recorded."""

    t_end: float
    sample_times: np.ndarray

    def __post_init__(self):
        times = np.ascontiguousarray(self.sample_times, dtype=np.float64)
        object.__setattr__(self, "sample_times", times)
        if not (self.t_end > 0.0) or not math.isfinite(self.t_end):
            raise ValueError("t_end must be positive and finite")
        if times.ndim != 1 or times.size == 0:
            raise ValueError("sample_times must be a nonempty 1-d sequence")
        if times[0] < 0.0 or times[-1] > self.t_end:
            raise ValueError("sample_times must lie in [0, t_end]")
        if np.any(np.diff(times) <= 0.0):
            raise ValueError("sample_times must be strictly increasing")

    @classmethod
    def regular(cls, t_end: float, sample_dt: float) -> "Schedule":
        """Samples at 0, dt, 2 dt, ... up to t_end."""
        if not (sample_dt > 0.0):
            raise ValueError("sample_dt must be positive")
        n = int(math.floor(t_end / sample_dt + 1e-9))
        times = np.linspace(0.0, n * sample_dt, n + 1)
        if times[-1] > t_end:
            times[-1] = t_end
        return cls(t_end=t_end, sample_times=times)


@dataclass
class TrajectorySample:
    """Functionals of one trajectory at one scheduled time."""

    t: float
    tau: float
    m4_active: float
    m4_passive: float
    phi: float
    energy: float
    v_snapshot: np.ndarray | None = field(default=None)


@dataclass
class EnsembleResult:
    """Replica-by-time arrays of trajectory functionals for one ensemble run.

    ``tau``, ``m4_active``, ``m4_passive``, ``phi`` and ``energy`` have shape
    (replicas, n_times); ``v_snapshots``, when recorded, has shape
    (replicas, n_times, N).  ``n_events`` counts jumps per replica up to the
    last sample time.
    """

    params: ModelParams
    schedule: Schedule
    replicas: int
    disable_exchange: bool
    disable_kac: bool
    times: np.ndarray
    tau: np.ndarray
    m4_active: np.ndarray
    m4_passive: np.ndarray
    phi: np.ndarray
    energy: np.ndarray
    n_events: np.ndarray
    v_snapshots: np.ndarray | None = None

    def time_index(self, t: float) -> int:
        idx = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[idx] - t) > 1e-9 * max(1.0, abs(t)):
            raise ValueError(f"time {t} is not a sample time of this ensemble")
        return idx

    def replica_samples(self, replica: int) -> list[TrajectorySample]:
        out = []
        for s, t in enumerate(self.times):
            snap = None
            if self.v_snapshots is not None:
                snap = self.v_snapshots[replica, s].copy()
            out.append(TrajectorySample(
                t=float(t), tau=float(self.tau[replica, s]),
                m4_active=float(self.m4_active[replica, s]),
                m4_passive=float(self.m4_passive[replica, s]),
                phi=float(self.phi[replica, s]),
                energy=float(self.energy[replica, s]),
                v_snapshot=snap))
        return out


def _rates(params: ModelParams, disable_exchange: bool, disable_kac: bool) -> tuple[float, float]:
    """Total event rate and the rotation-selection threshold for u_kind."""
    if disable_exchange and disable_kac:
        raise ValueError("cannot disable both dynamics")
    if disable_exchange:
        return params.kac_rate, 2.0  # every event is a rotation
    if disable_kac:
        return params.exchange_rate, -1.0  # every event is an exchange
    total = params.kac_rate + params.exchange_rate
    return total, params.kac_rate / total


def next_event(params: ModelParams, rng: np.random.Generator,
               disable_exchange: bool = False, disable_kac: bool = False) -> Event:
    """Draw one jump: exponential waiting time, kind, indices, and angle.

    Consumes one row of five uniforms exactly as the event loop does, so the
    distributional contract tested here is the one the kernels implement.
    """
    rate_total, p_kac = _rates(params, disable_exchange, disable_kac)
    u0, u1, u2, u3, u4 = rng.random(5)
    dt = -math.log(1.0 - u0) / rate_total
    n, m = params.n_passive, params.n_active
    if u1 < p_kac:
        a = min(int(u2 * m), m - 1)
        b = min(int(u3 * (m - 1)), m - 2)
        if b >= a:
            b += 1
        return Event(dt=dt, kind=EventKind.KAC_ROTATION, j=min(a, b), k=max(a, b),
                     theta=u4 * (2.0 * math.pi))
    j = min(int(u2 * n), n - 1)
    k = min(int(u3 * m), m - 1)
    return Event(dt=dt, kind=EventKind.EXCHANGE, j=j, k=k, theta=None)


def renormalize(state: SystemState) -> SystemState:
    """Rescale a state onto the sphere |V|^2 + |W|^2 = N + M."""
    e = total_energy(state)
    if e <= 0.0:
        raise ValueError("cannot renormalize a zero state")
    scale = math.sqrt((state.n_passive + state.n_active) / e)
    return SystemState(state.v * scale, state.w * scale)


def advance(params: ModelParams, state: SystemState, schedule: Schedule,
            rng: np.random.Generator, *, disable_exchange: bool = False,
            disable_kac: bool = False, record_snapshots: bool = False,
            renormalize_state: bool = True,
            _kernel_module=None) -> list[TrajectorySample]:
    """Run one trajectory and record functionals at the scheduled times.

    Sampling is right-continuous: each record reflects the state after the
    last event at or before the sample time.  The caller's state is not
    mutated.  With renormalization on, the state is rescaled onto the sphere
    before every record and whenever the periodic energy check drifts past
    RENORM_THRESHOLD.
    """
    if state.n_passive != params.n_passive or state.n_active != params.n_active:
        raise ValueError("state dimensions do not match params")
    if state.sphere_residual() > 1e-6:
        raise ValueError("initial state is not on the energy sphere")
    kernel = _kernel_module if _kernel_module is not None else _kernel
    out_func, out_snap, _ = _advance_arrays(
        params, state, schedule, rng, disable_exchange, disable_kac,
        record_snapshots, renormalize_state, kernel)

    samples = []
    for s, ts in enumerate(schedule.sample_times):
        snap = out_snap[s].copy() if out_snap is not None else None
        samples.append(TrajectorySample(
            t=float(ts), tau=float(out_func[s, 0]), m4_active=float(out_func[s, 1]),
            m4_passive=float(out_func[s, 2]), phi=float(out_func[s, 3]),
            energy=float(out_func[s, 4]), v_snapshot=snap))
    return samples


def _advance_arrays(params, state, schedule, rng, disable_exchange, disable_kac,
                    record_snapshots, renormalize_state, kernel):
    """advance() without the dataclass wrapping; returns raw arrays and the event count."""
    rate_total, p_kac = _rates(params, disable_exchange, disable_kac)
    times = schedule.sample_times
    n_samp = times.size
    v = state.v.copy()
    w = state.w.copy()
    out_func = np.empty((n_samp, 5))
    out_snap = np.empty((n_samp, params.n_passive)) if record_snapshots else np.empty((1, 1))
    rows = np.empty((CHUNK_EVENTS, 5))
    t = 0.0
    s_idx = 0
    since_check = 0
    n_events = 0
    done = False
    while not done:
        rng.random(out=rows)
        done, t, s_idx, since_check, n_events = kernel.run_chunk(
            v, w, rows, t, times, s_idx, out_func, out_snap, record_snapshots,
            rate_total, p_kac, renormalize_state, RENORM_THRESHOLD,
            RENORM_CHECK_EVERY, since_check, n_events)
    return out_func, (out_snap if record_snapshots else None), n_events


def run_ensemble(params: ModelParams, spec: InitSpec, schedule: Schedule,
                 replicas: int, *, disable_exchange: bool = False,
                 disable_kac: bool = False, record_snapshots: bool = False,
                 renormalize_state: bool = True,
                 initial_state: SystemState | None = None,
                 _kernel_module=None) -> EnsembleResult:
    """Run independent replicas on independent generator streams.

    Replica i draws from the stream seeded by ``replica_seed(params.seed, i)``:
    first the initial state (unless a shared ``initial_state`` is supplied,
    in which case every replica starts from a copy of it), then the event
    loop.  The result is deterministic given all arguments.
    """
    if replicas < 1:
        raise ValueError("replicas must be >= 1")
    _rates(params, disable_exchange, disable_kac)  # validate flag combination
    kernel = _kernel_module if _kernel_module is not None else _kernel

    n_samp = schedule.sample_times.size
    tau = np.empty((replicas, n_samp))
    m4a = np.empty((replicas, n_samp))
    m4p = np.empty((replicas, n_samp))
    phi = np.empty((replicas, n_samp))
    energy = np.empty((replicas, n_samp))
    counts = np.empty(replicas, dtype=np.int64)
    snaps = np.empty((replicas, n_samp, params.n_passive)) if record_snapshots else None

    for i in range(replicas):
        rng = _replica_rng(params.seed, i)
        if initial_state is not None:
            state = initial_state.copy()
            if state.n_passive != params.n_passive or state.n_active != params.n_active:
                raise ValueError("initial_state dimensions do not match params")
        else:
            state = sample_initial(params, spec, rng)
        if state.sphere_residual() > 1e-6:
            raise ValueError("initial state is not on the energy sphere")
        out_func, out_snap, n_events = _advance_arrays(
            params, state, schedule, rng, disable_exchange, disable_kac,
            record_snapshots, renormalize_state, kernel)
        tau[i] = out_func[:, 0]
        m4a[i] = out_func[:, 1]
        m4p[i] = out_func[:, 2]
        phi[i] = out_func[:, 3]
        energy[i] = out_func[:, 4]
        counts[i] = n_events
        if snaps is not None:
            snaps[i] = out_snap

    return EnsembleResult(
        params=params, schedule=schedule, replicas=replicas,
        disable_exchange=disable_exchange, disable_kac=disable_kac,
        times=schedule.sample_times.copy(), tau=tau, m4_active=m4a,
        m4_passive=m4p, phi=phi, energy=energy, n_events=counts,
        v_snapshots=snaps)
