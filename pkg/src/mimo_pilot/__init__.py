"""Multi-cell massive-MIMO uplink simulator with pilot power allocation.

Pilot reuse across cells contaminates channel estimates.  This package
models the hexagonal multi-cell uplink, quantifies the resulting
estimation error and SINR in closed form and by Monte-Carlo, and
allocates pilot powers in the target cell to minimize the average
relative channel estimation error under a total budget and per-user
bounds.
"""

from .airlink import (ChannelRealization, PilotObservation, SinrMoments,
                      complex_normal, empirical_sinr_terms, pilot_book,
                      pilot_phase, sample_channels)
from .estimators import (LS, MMSE, METHODS, ChannelEstimate, check_method,
                         estimate_ls, estimate_mmse, mmse_gain,
                         mmse_gain_matrix)
from .harness import (CDF_COLUMNS, EXPERIMENTS, GRID_COLUMNS, EmpiricalCdf,
                      ExperimentPlan, MetricReport, bench_allocators,
                      default_config, empirical_cdf, ks_distance, plan_for,
                      run_experiment, seed_schedule)
from .metrics import (RateReport, RateSummary, RceeReport, achievable_rate,
                      exp_rcee_bound_mmse, exp_rcee_closed,
                      exp_rcee_eppa_floor, exp_rcee_eppa_limit,
                      exp_rcee_limit, rate_summary, rcee_prefix_samples,
                      rcee_sample, sinr_closed, sinr_limit, upsilon)
from .ppa import (ALPHA, AsymptoticGroups, InterferenceProfile,
                  PilotAllocation, asymptotic_average, asymptotic_groups,
                  eppa_profile, exp_rcee_asymptotic, make_objective,
                  objective_value, ppa_allocate, unconstrained_optimum)
from .refsolver import ConstrainedProblem, SolveResult, project_bounded_simplex, solve
from .scenario import (CellLayout, ConfigurationError, FixtureFormatError,
                       LargeScaleRealization, SystemConfig, attenuation,
                       build_layout, db_to_linear, drop_users, in_hexagon,
                       large_scale, linear_to_db, load_beta_fixture,
                       sample_hexagon, sample_shadowing, save_beta_fixture)

__version__ = "0.1.0"

__all__ = [
    "ALPHA", "CDF_COLUMNS", "EXPERIMENTS", "GRID_COLUMNS", "LS", "METHODS",
    "MMSE", "AsymptoticGroups", "CellLayout", "ChannelEstimate",
    "ChannelRealization", "ConfigurationError", "ConstrainedProblem",
    "EmpiricalCdf", "ExperimentPlan", "FixtureFormatError",
    "InterferenceProfile", "LargeScaleRealization", "MetricReport",
    "PilotAllocation", "PilotObservation", "RateReport", "RateSummary",
    "RceeReport", "SinrMoments", "SolveResult", "SystemConfig",
    "achievable_rate", "asymptotic_average", "asymptotic_groups",
    "attenuation", "bench_allocators", "build_layout", "check_method",
    "complex_normal",
    "db_to_linear", "default_config", "drop_users", "empirical_cdf",
    "empirical_sinr_terms", "eppa_profile", "estimate_ls", "estimate_mmse",
    "exp_rcee_asymptotic", "exp_rcee_bound_mmse", "exp_rcee_closed",
    "exp_rcee_eppa_floor", "exp_rcee_eppa_limit", "exp_rcee_limit",
    "in_hexagon", "ks_distance", "large_scale", "linear_to_db",
    "load_beta_fixture", "make_objective", "mmse_gain", "mmse_gain_matrix",
    "objective_value", "pilot_book", "pilot_phase", "plan_for",
    "ppa_allocate", "project_bounded_simplex", "rate_summary",
    "rcee_prefix_samples", "rcee_sample", "run_experiment",
    "sample_channels", "sample_hexagon", "sample_shadowing",
    "save_beta_fixture", "seed_schedule", "sinr_closed", "sinr_limit",
    "solve", "unconstrained_optimum", "upsilon",
]
