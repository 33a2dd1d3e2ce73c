"""Kinetic Monte Carlo laboratory for a two-species Kac particle system.

N passive and M active velocities evolve on the energy sphere under random
active-pair rotations and passive/active exchanges.  The package simulates
the jump process exactly, tracks the moment functionals whose closed
finite-size dynamics are known, and compares passive marginals against the
explicit solution of the limiting relaxation (BGK) equation.
"""

from .bgk import (GaussianDensity, InitialDensity, SphereMarginalDensity,
                  bgk_cdf, bgk_solution, compare_to_limit)
from .model import (Event, EventKind, ModelParams, SystemState, exchange,
                    fourth_moment, kac_eigenfunction, kac_rotation, m4_tilde,
                    spectral_gap, tau, total_energy)
from .moment_ode import (MomentSystem, asymptotic_eigenvalues, eta_closed_form,
                         moment_matrix, solve_moment_system, stationary_moments)
from .observables import (Histogram, MomentRecord, empirical_moments,
                          fit_exponential_rate, ks_statistic, l1_distance,
                          pair_energy_covariance, passive_histogram)
from .sampler import (InitKind, InitSpec, gaussian_density, log_sphere_area,
                      marginal_density, sample_initial, sample_uniform_sphere,
                      sphere_area)
from .simulator import (EnsembleResult, Schedule, TrajectorySample, advance,
                        backend_name, next_event, renormalize, replica_seed,
                        run_ensemble)

__version__ = "0.1.0"

__all__ = [
    "ModelParams", "SystemState", "Event", "EventKind",
    "total_energy", "kac_rotation", "exchange", "tau", "fourth_moment",
    "m4_tilde", "kac_eigenfunction", "spectral_gap",
    "InitKind", "InitSpec", "sphere_area", "log_sphere_area",
    "sample_uniform_sphere",
    "sample_initial", "marginal_density", "gaussian_density",
    "Schedule", "TrajectorySample", "EnsembleResult", "backend_name",
    "replica_seed", "next_event", "renormalize", "advance", "run_ensemble",
    "MomentRecord", "Histogram", "empirical_moments", "passive_histogram",
    "l1_distance", "ks_statistic", "pair_energy_covariance",
    "fit_exponential_rate",
    "MomentSystem", "eta_closed_form", "moment_matrix", "solve_moment_system",
    "stationary_moments", "asymptotic_eigenvalues",
    "GaussianDensity", "SphereMarginalDensity", "InitialDensity",
    "bgk_solution", "bgk_cdf", "compare_to_limit",
    "__version__",
]
