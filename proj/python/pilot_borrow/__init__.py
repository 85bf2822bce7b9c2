"""Pilot-data borrowing through robust mixture priors for two-arm binary trials."""

from ._core import (
    ArmCounts,
    BetaMixture,
    BetaParams,
    DesignScenario,
    PowerEstimate,
    RecruitmentModel,
    SampleSizeResult,
    beta_exceedance,
    build_robust_map,
    decide,
    estimate_power,
    expected_duration,
    find_min_sample_size,
    informative_weight,
    log_beta_binomial_pmf,
    log_beta_fn,
    log_gamma,
    months_for_probability,
    negbin_params,
    parse_config,
    recruitment_probability,
    reg_inc_beta,
    run_conflict_grid,
    run_grid_csv,
    simulate_replicate,
    split_arms,
    superiority_probability,
    update_posterior,
)

__all__ = [name for name in dir() if not name.startswith("_")]
