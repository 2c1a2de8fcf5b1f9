"""Fractional-order PI control with a fractional Smith-like predictor."""

from ._core import (
    ApproxConfig,
    ConfigError,
    FactoredTF,
    FitError,
    FracPI,
    HighOrderPlant,
    RationalTF,
    __version__,
    analytic_step,
    approx_frac_pi,
    approx_lag,
    exact_frac_pi_response,
    exact_lag_response,
    hypervolume,
    non_dominated_sort,
    oustaloup,
    report,
    simulate,
    sweep,
    tune,
)

__all__ = [
    "ApproxConfig",
    "ConfigError",
    "FactoredTF",
    "FitError",
    "FracPI",
    "HighOrderPlant",
    "RationalTF",
    "__version__",
    "analytic_step",
    "approx_frac_pi",
    "approx_lag",
    "exact_frac_pi_response",
    "exact_lag_response",
    "hypervolume",
    "non_dominated_sort",
    "oustaloup",
    "report",
    "simulate",
    "sweep",
    "tune",
]
