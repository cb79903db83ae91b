"""Pseudospectral simulator and decay-rate harness for the compressible
Navier-Stokes-Korteweg system linearized about the constant state."""
from .params import (
    DerivedParameters,
    ParameterError,
    PhysicalParameters,
    PressureLaw,
    Regime,
    VacuumError,
    derive_constants,
    p1_of_phi,
    p2_of_phi,
)
from .spectral import Band, Grid, SpectralState, State, build_bands, to_physical, to_spectral
from .propagator import LinearOperator, lambda_pm, mode_semigroup, propagate
from .decay import DecaySeries, fit_exponent, theory_exponent

__all__ = [
    "Band",
    "DecaySeries",
    "DerivedParameters",
    "Grid",
    "LinearOperator",
    "ParameterError",
    "PhysicalParameters",
    "PressureLaw",
    "Regime",
    "SpectralState",
    "State",
    "VacuumError",
    "build_bands",
    "derive_constants",
    "fit_exponent",
    "lambda_pm",
    "mode_semigroup",
    "p1_of_phi",
    "p2_of_phi",
    "propagate",
    "theory_exponent",
    "to_physical",
    "to_spectral",
]
