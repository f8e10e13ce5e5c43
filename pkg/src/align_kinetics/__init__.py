"""Coefficients, spectra and macroscopic models for alignment dynamics on the sphere."""

from .equilibria import EquilibriumClass, EquilibriumKind, kappa_of_rho, kappa_roots, rho_of_kappa
from .errors import (
    AlignKineticsError,
    AsymptoticRangeError,
    ConfigurationError,
    EquilibriumMismatchError,
    HyperbolicityLossError,
    InvalidInputError,
    NumericalBreakdownError,
    StabilityError,
    ValidityLossError,
)
from .gci import ClosureCoefficients, assemble_matrix_A, c_tilde, closure_coefficients, solve_gci
from .quadrature import ThetaGrid, dc_dkappa, order_parameter, vmf_average
from .spectrum import RateKind, assemble_matrix_B, convergence_rate, poincare_constant

__version__ = "0.1.0"

__all__ = [
    "AlignKineticsError",
    "AsymptoticRangeError",
    "ClosureCoefficients",
    "ConfigurationError",
    "EquilibriumClass",
    "EquilibriumKind",
    "EquilibriumMismatchError",
    "HyperbolicityLossError",
    "InvalidInputError",
    "NumericalBreakdownError",
    "RateKind",
    "StabilityError",
    "ThetaGrid",
    "ValidityLossError",
    "assemble_matrix_A",
    "assemble_matrix_B",
    "c_tilde",
    "closure_coefficients",
    "convergence_rate",
    "dc_dkappa",
    "kappa_of_rho",
    "kappa_roots",
    "order_parameter",
    "poincare_constant",
    "rho_of_kappa",
    "solve_gci",
    "vmf_average",
]
