"""Symmetric (midpoint) integration against random Fourier-series stochastic
measures: path sampling, integral sums and variation functionals, a
Doss-Sussmann equation solver, and oscillation certificates."""

try:
    from . import _smcalc
except ImportError:  # local checkout: the extension sits on sys.path instead
    import _smcalc
    import sys

    sys.modules[__name__ + "._smcalc"] = _smcalc

from ._smcalc import (
    DEFAULT_HORIZON,
    CoefficientProfile,
    FourierSM,
    Partition,
    SampledPath,
    boundedness_quantile,
    construct_oscillator1,
    construct_oscillator2,
    diagonal_S,
    drift_catalog_names,
    empirical_dyadic_S,
    f_of_eps,
    field_catalog_names,
    holder_diagnostic,
    parseval_check,
    quadratic_variation_mc,
    reverify_certificate,
    sigma_catalog_names,
    solve_sde,
    stieltjes_integral,
    strong_variation_estimate,
    sum_squared_increments,
    symmetric_integral,
    symmetric_sum,
    verify_chain_rule,
)

__all__ = [
    "DEFAULT_HORIZON",
    "CoefficientProfile",
    "FourierSM",
    "Partition",
    "SampledPath",
    "boundedness_quantile",
    "construct_oscillator1",
    "construct_oscillator2",
    "diagonal_S",
    "drift_catalog_names",
    "empirical_dyadic_S",
    "f_of_eps",
    "field_catalog_names",
    "holder_diagnostic",
    "parseval_check",
    "quadratic_variation_mc",
    "reverify_certificate",
    "sigma_catalog_names",
    "solve_sde",
    "stieltjes_integral",
    "strong_variation_estimate",
    "sum_squared_increments",
    "symmetric_integral",
    "symmetric_sum",
    "verify_chain_rule",
]
