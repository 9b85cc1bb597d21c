"""Directed polymers with inverse-Wishart matrix disorder."""

from ._ivpoly import (
    ConfigError,
    NumericalError,
    ParameterError,
    algebraic_checks,
    change_of_variable,
    increment,
    logdet,
    martingale_check,
    multidigamma,
    multigamma_ln,
    normalization_n1,
    one_step_identity,
    one_step_update,
    quadrant_delta,
    run_cli,
    sample_inv_wishart,
    sample_wishart,
    star,
    strip_log_diag,
)

__all__ = [
    "ConfigError",
    "NumericalError",
    "ParameterError",
    "algebraic_checks",
    "change_of_variable",
    "increment",
    "logdet",
    "martingale_check",
    "multidigamma",
    "multigamma_ln",
    "normalization_n1",
    "one_step_identity",
    "one_step_update",
    "quadrant_delta",
    "run_cli",
    "sample_inv_wishart",
    "sample_wishart",
    "star",
    "strip_log_diag",
]
