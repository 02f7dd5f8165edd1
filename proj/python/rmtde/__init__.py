"""Deterministic equivalents for correlated MIMO multiple-access channels."""

from rmtde._core import (
    ChannelDraw,
    ConfigError,
    CovarianceSolution,
    DetEquivResult,
    DistributionGap,
    EnsembleResult,
    FadingFamily,
    FadingSpec,
    FixedPointState,
    MomentIdentity,
    PointStats,
    Quantity,
    ScenarioSpec,
    SolveOptions,
    SolverError,
    UniquenessDiagnostic,
    UserSpec,
    ValidationError,
    assemble_channel,
    build_scenario,
    cv_of,
    det_shannon,
    det_stieltjes,
    distribution_gap,
    empirical_mutual_info,
    empirical_stieltjes,
    load_scenario,
    moment_identity,
    optimize_covariance,
    run_ensemble,
    sample_fading,
    save_scenario,
    scenario_from_json,
    scenario_to_json,
    shannon_via_integral,
    solve_fixed_point,
    ula_correlation,
    uniqueness_diagnostic,
    waterfill_allocation,
)

__all__ = [
    "ChannelDraw",
    "ConfigError",
    "CovarianceSolution",
    "DetEquivResult",
    "DistributionGap",
    "EnsembleResult",
    "FadingFamily",
    "FadingSpec",
    "FixedPointState",
    "MomentIdentity",
    "PointStats",
    "Quantity",
    "ScenarioSpec",
    "SolveOptions",
    "SolverError",
    "UniquenessDiagnostic",
    "UserSpec",
    "ValidationError",
    "assemble_channel",
    "build_scenario",
    "cv_of",
    "det_shannon",
    "det_stieltjes",
    "distribution_gap",
    "empirical_mutual_info",
    "empirical_stieltjes",
    "load_scenario",
    "moment_identity",
    "optimize_covariance",
    "run_ensemble",
    "sample_fading",
    "save_scenario",
    "scenario_from_json",
    "scenario_to_json",
    "shannon_via_integral",
    "solve_fixed_point",
    "ula_correlation",
    "uniqueness_diagnostic",
    "waterfill_allocation",
]
