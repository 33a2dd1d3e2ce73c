"""Batch front door: simulate | moments | verify with JSON config and flag overrides.

Exit codes: 0 success, 1 check failure, 2 configuration error.  All CSV
output uses 17-significant-digit floats, '.' decimal points and LF line
endings, and is byte-identical across reruns of the same configuration.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .model import ModelParams
from .moment_ode import moment_matrix, solve_moment_system, stationary_moments
from .observables import empirical_moments, passive_histogram
from .sampler import SPIKE_ACTIVE_RADIUS, InitKind, InitSpec
from .simulator import Schedule, run_ensemble
from .verify import SUITE_NAMES, run_suite

__all__ = ["ConfigError", "RunConfig", "main"]


class ConfigError(Exception):
    pass


_INIT_KINDS = {k.value: k for k in InitKind}


@dataclass
class RunConfig:
    n: int = 20
    m: int = 5
    lam: float = 1.0
    seed: int = 42
    init: str = "uniform"
    sigma_passive: float = 1.0
    sigma_active: float = 2.0
    t_end: float = 1.0
    sample_dt: float = 0.1
    replicas: int = 10
    disable_exchange: bool = False
    disable_kac: bool = False
    record_snapshots: bool = False
    output: str = "out"
    initial_moments: dict | None = None

    def model_params(self) -> ModelParams:
        try:
            return ModelParams(n_passive=self.n, n_active=self.m,
                               lam=self.lam, seed=self.seed)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def init_spec(self) -> InitSpec:
        if self.init not in _INIT_KINDS:
            raise ConfigError(f"unknown init kind {self.init!r}; "
                              f"choose from {sorted(_INIT_KINDS)}")
        try:
            return InitSpec(kind=_INIT_KINDS[self.init],
                            sigma_passive=self.sigma_passive,
                            sigma_active=self.sigma_active)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def schedule(self) -> Schedule:
        try:
            return Schedule.regular(self.t_end, self.sample_dt)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def as_json_dict(self) -> dict:
        d = asdict(self)
        d["lambda"] = d.pop("lam")
        if d["initial_moments"] is None:
            del d["initial_moments"]
        return d


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config document must be a JSON object")
    return raw

_CONFIG_KEYS = {"n": int, "m": int, "lambda": float, "seed": int, "t_end": float,
                "sample_dt": float, "replicas": int, "disable_exchange": bool,
                "disable_kac": bool, "record_snapshots": bool, "output": str,
                "sigma_passive": float, "sigma_active": float}


def _apply_json(cfg: RunConfig, raw: dict) -> dict:
    """Apply JSON keys onto cfg; returns the set of explicitly-given fields."""
    explicit = {}
    for key, value in raw.items():
        if key == "lambda":
            cfg.lam = float(value)
            explicit["lam"] = cfg.lam
        elif key == "init":
            if isinstance(value, str):
                cfg.init = value
                explicit["init"] = value
            elif isinstance(value, dict):
                cfg.init = value.get("kind", cfg.init)
                cfg.sigma_passive = float(value.get("sigma_passive", cfg.sigma_passive))
                cfg.sigma_active = float(value.get("sigma_active", cfg.sigma_active))
                explicit.update(init=cfg.init, sigma_passive=cfg.sigma_passive,
                                sigma_active=cfg.sigma_active)
            else:
                raise ConfigError("'init' must be a kind string or an object")
        elif key == "initial_moments":
            if not isinstance(value, dict):
                raise ConfigError("'initial_moments' must be an object")
            cfg.initial_moments = {k: float(v) for k, v in value.items()}
        elif key in _CONFIG_KEYS:
            field_name = "lam" if key == "lambda" else key
            setattr(cfg, field_name, _CONFIG_KEYS[key](value))
            explicit[field_name] = getattr(cfg, field_name)
        else:
            raise ConfigError(f"unknown config key {key!r}")
    return explicit


def _apply_flags(cfg: RunConfig, args: argparse.Namespace) -> dict:
    """Apply non-None CLI flags onto cfg (overrides win over JSON)."""
    explicit = {}
    mapping = dict(n="n", m="m", lam="lam", t_end="t_end", sample_dt="sample_dt",
                   replicas="replicas", seed="seed", init="init", output="output",
                   disable_exchange="disable_exchange", disable_kac="disable_kac",
                   record_snapshots="record_snapshots")
    for arg_name, field_name in mapping.items():
        value = getattr(args, arg_name, None)
        if value is not None:
            setattr(cfg, field_name, value)
            explicit[field_name] = value
    return explicit


def _build_config(args: argparse.Namespace) -> tuple[RunConfig, dict]:
    cfg = RunConfig()
    explicit = _apply_json(cfg, _load_config(args.config))
    explicit.update(_apply_flags(cfg, args))
    return cfg, explicit


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")


def _prepare_output(cfg: RunConfig) -> Path:
    out = Path(cfg.output)
    try:
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "config.json", "w", encoding="utf-8", newline="\n") as fh:
            json.dump(cfg.as_json_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise ConfigError(f"cannot write to output path {cfg.output!r}: {exc}") from exc
    return out


def cmd_simulate(cfg: RunConfig) -> int:
    params = cfg.model_params()
    spec = cfg.init_spec()
    schedule = cfg.schedule()
    if cfg.replicas < 2:
        raise ConfigError("simulate needs replicas >= 2 (standard errors)")
    if cfg.disable_exchange and cfg.disable_kac:
        raise ConfigError("cannot disable both dynamics")
    out = _prepare_output(cfg)
    ens = run_ensemble(params, spec, schedule, cfg.replicas,
                       disable_exchange=cfg.disable_exchange,
                       disable_kac=cfg.disable_kac,
                       record_snapshots=cfg.record_snapshots)
    records = empirical_moments(ens)
    _write_csv(out / "moments.csv",
               ["t", "eta", "eta_se", "psi", "psi_se", "zeta", "zeta_se", "xi", "xi_se"],
               [(r.t, r.eta, r.eta_se, r.psi, r.psi_se, r.zeta, r.zeta_se, r.xi, r.xi_se)
                for r in records])
    if cfg.record_snapshots:
        for i, t in enumerate(ens.times):
            hist = passive_histogram(ens, float(t))
            edges = hist.edges
            _write_csv(out / f"histogram_{i:04d}.csv", ["bin_lo", "bin_hi", "count"],
                       [(edges[b], edges[b + 1], hist.counts[b]) for b in range(hist.bins)])
    return 0


def _initial_moments(cfg: RunConfig, params: ModelParams):
    """(eta0, psi0, xi0, zeta0) for the deterministic moment command.

    Closed forms exist for the uniform measure (the fixed point) and the
    passive spike (a deterministic construction up to the active direction).
    TwoTemperature ensembles have no closed-form initial moments, so those
    must be supplied explicitly via 'initial_moments'.
    """
    if cfg.initial_moments is not None:
        im = cfg.initial_moments
        try:
            return (im["eta0"], im["psi0"], im["xi0"], im["zeta0"])
        except KeyError as exc:
            raise ConfigError("initial_moments needs eta0, psi0, xi0, zeta0") from exc
    kind = cfg.init_spec().kind
    n, m = params.n_passive, params.n_active
    if kind is InitKind.UNIFORM_SPHERE:
        psi0, xi0, zeta0 = stationary_moments(n, m)
        return (0.0, psi0, xi0, zeta0)
    if kind is InitKind.PASSIVE_SPIKE:
        total = float(n + m)
        eps2 = SPIKE_ACTIVE_RADIUS**2
        c2 = total / (total + eps2)
        tau0 = total / m * (eps2 / (total + eps2))
        eta0 = tau0 - 1.0
        return (eta0, eta0**2, (total / n) ** 2 * c2**2, 0.0)
    raise ConfigError("two_temperature initial moments are not closed-form; "
                      "supply them via 'initial_moments' in the config")


def cmd_moments(cfg: RunConfig) -> int:
    params = cfg.model_params()
    schedule = cfg.schedule()
    eta0, psi0, xi0, zeta0 = _initial_moments(cfg, params)
    out = _prepare_output(cfg)
    records = solve_moment_system(moment_matrix(params), psi0, xi0, zeta0, eta0,
                                  schedule.sample_times)
    _write_csv(out / "moments.csv", ["t", "eta", "psi", "zeta", "xi"],
               [(r.t, r.eta, r.psi, r.zeta, r.xi) for r in records])
    return 0


def cmd_verify(suite: str, explicit: dict, cfg: RunConfig) -> int:
    if suite not in SUITE_NAMES:
        raise ConfigError(f"unknown suite {suite!r}; choose from {SUITE_NAMES}")
    try:
        report = run_suite(suite, explicit)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    out = _prepare_output(cfg)
    verdict = {
        "suite": report.suite,
        "passed": report.passed,
        "elapsed_s": report.elapsed,
        "checks": [{"name": c.name, "passed": c.passed, "measured": c.measured,
                    "target": c.target, "detail": c.detail} for c in report.checks],
    }
    with open(out / "verdict.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(verdict, fh, indent=2)
        fh.write("\n")
    for c in report.checks:
        status = "PASS" if c.passed else "FAIL"
        detail = f" [{c.detail}]" if c.detail else ""
        print(f"{status} {report.suite}/{c.name}: measured {c.measured:.6g}, "
              f"target {c.target}{detail}")
    print(f"{'PASS' if report.passed else 'FAIL'} suite {report.suite} "
          f"({report.elapsed:.2f} s)")
    return 0 if report.passed else 1


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", default=None, help="JSON configuration document")
    p.add_argument("--n", type=int, default=None, help="passive particle count N")
    p.add_argument("--m", type=int, default=None, help="active particle count M")
    p.add_argument("--lambda", dest="lam", type=float, default=None,
                   help="rotation intensity")
    p.add_argument("--t-end", dest="t_end", type=float, default=None)
    p.add_argument("--sample-dt", dest="sample_dt", type=float, default=None)
    p.add_argument("--replicas", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--init", choices=sorted(_INIT_KINDS), default=None)
    p.add_argument("--output", default=None)
    p.add_argument("--disable-exchange", dest="disable_exchange",
                   action="store_true", default=None)
    p.add_argument("--disable-kac", dest="disable_kac",
                   action="store_true", default=None)
    p.add_argument("--record-snapshots", dest="record_snapshots",
                   action="store_true", default=None)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="kacbgk",
        description="Two-species Kac particle system: simulate, exact moment "
                    "oracle, and verification suites.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (("simulate", "run an ensemble and write moment/histogram CSVs"),
                            ("moments", "solve the exact moment ODE (no randomness)"),
                            ("verify", "run a verification suite and report PASS/FAIL")):
        p = sub.add_parser(name, help=help_text)
        _add_common_flags(p)
        if name == "verify":
            p.add_argument("--suite", required=True, choices=SUITE_NAMES)
    args = parser.parse_args(argv)

    try:
        cfg, explicit = _build_config(args)
        if args.command == "simulate":
            return cmd_simulate(cfg)
        if args.command == "moments":
            return cmd_moments(cfg)
        return cmd_verify(args.suite, explicit, cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
