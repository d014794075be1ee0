"""Lyapunov-damped inertial optimization (LYDIA) and baselines."""

from ._core import (
    ConfigError,
    DivergenceError,
    InsufficientDataError,
    IterateState,
    Objective,
    RateFit,
    UnsupportedError,
    audit_monotonicity,
    build_objective,
    check_gradient,
    check_rate_lower_bound,
    descent_lemma_residual,
    estimate_rate,
    init_state,
    max_sampled_gradient_error,
    nag_momentum,
    objective_names,
    run,
    simulate,
    step,
    step_decrease_residual,
)

__all__ = [
    "ConfigError",
    "DivergenceError",
    "InsufficientDataError",
    "IterateState",
    "Objective",
    "RateFit",
    "UnsupportedError",
    "audit_monotonicity",
    "build_objective",
    "check_gradient",
    "check_rate_lower_bound",
    "descent_lemma_residual",
    "estimate_rate",
    "init_state",
    "max_sampled_gradient_error",
    "nag_momentum",
    "objective_names",
    "run",
    "simulate",
    "step",
    "step_decrease_residual",
]
