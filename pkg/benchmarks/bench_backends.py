#!/usr/bin/env python3
"""Benchmark the compiled event loop against the pure-Python fallback.

Both backends consume the replica uniform stream identically, so besides
timing them this script asserts that they produce bitwise-identical
trajectories.

Usage: python benchmarks/bench_backends.py [--events 1000000]
"""

import argparse
import time

import numpy as np

from kacbgk import InitKind, InitSpec, ModelParams, Schedule, run_ensemble
from kacbgk import _event_loop_py

try:
    from kacbgk import _event_loop
except ImportError:
    _event_loop = None


def run(kernel, params, schedule, replicas=1):
    spec = InitSpec(InitKind.UNIFORM_SPHERE)
    start = time.perf_counter()
    ens = run_ensemble(params, spec, schedule, replicas, _kernel_module=kernel)
    elapsed = time.perf_counter() - start
    return ens, elapsed


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--events", type=int, default=1_000_000,
                    help="approximate number of jump events to simulate")
    ap.add_argument("--n", type=int, default=100)
    ap.add_argument("--m", type=int, default=10)
    ap.add_argument("--lambda", dest="lam", type=float, default=1.0)
    args = ap.parse_args()

    params = ModelParams(n_passive=args.n, n_active=args.m, lam=args.lam, seed=12345)
    rate = params.kac_rate + params.exchange_rate
    t_end = args.events / rate
    schedule = Schedule.regular(t_end, t_end / 10.0)

    print(f"workload: N={args.n} M={args.m} lambda={args.lam} "
          f"~{args.events} events, 11 sample times")

    ens_py, t_py = run(_event_loop_py, params, schedule)
    events = int(ens_py.n_events[0])
    print(f"python backend: {events} events in {t_py:7.3f} s "
          f"({events / t_py / 1e6:6.2f} M events/s)")

    if _event_loop is None:
        print("compiled backend not built (install with the Cython extension)")
        return

    ens_cy, t_cy = run(_event_loop, params, schedule)
    print(f"cython backend: {events} events in {t_cy:7.3f} s "
          f"({events / t_cy / 1e6:6.2f} M events/s)")
    print(f"speedup: {t_py / t_cy:.1f}x")

    identical = all(
        np.array_equal(getattr(ens_py, f), getattr(ens_cy, f))
        for f in ("tau", "m4_active", "m4_passive", "phi", "energy", "n_events"))
    print(f"bitwise-identical trajectories: {identical}")
    if not identical:
        raise SystemExit("backend mismatch")


if __name__ == "__main__":
    main()
