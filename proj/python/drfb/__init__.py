from ._core import (
    BatteryParams,
    GainSolution,
    RbfBasis,
    basis_flux,
    bound_report,
    evaluate_basis,
    fit_basis,
    invert,
    lipschitz_bound,
    nernst,
    simulate,
    synthesize_gains,
    synthesize_trace,
    uniform_basis,
)

__all__ = [
    "BatteryParams",
    "GainSolution",
    "RbfBasis",
    "basis_flux",
    "bound_report",
    "evaluate_basis",
    "fit_basis",
    "invert",
    "lipschitz_bound",
    "nernst",
    "simulate",
    "synthesize_gains",
    "synthesize_trace",
    "uniform_basis",
]
