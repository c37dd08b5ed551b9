"""Spectral tools for rank-one singular perturbations.

Herglotz transforms of measures, the Aronszajn-Donoghue eigenvalue criterion
for the self-adjoint extension family T_theta, the coupling parameter maps
(alpha, c) -> gamma -> v -> theta, and finite-matrix oracles.
"""
from .errors import (
    DegenerateDenominator,
    DegenerateSpectrum,
    ExcludedAngle,
    ForbiddenEnergy,
    NonUpperHalfPlane,
    NotNormalized,
    NotUnimodular,
    NumericalError,
    SameExtension,
    SingpertError,
    ValidationError,
)
from .herglotz import (
    ClassifierConfig,
    EnergyClass,
    HerglotzEval,
    boundary_value,
    classify_energies,
    g_n,
    inverse_square_moment,
    transform,
)
from .kernels import BACKEND
from .measure import Measure, Piece, Window, dyadic_benchmark, validate, weighted_integral
from .params import (
    Coupling,
    coupling_from_theta,
    gamma_from_coupling,
    theta_from_coupling,
    theta_from_v,
    v_from_gamma,
)
from .spectral import (
    AdProblem,
    ScanReport,
    coupling_sweep,
    eigenvalues_for_extension,
    extension_for_energy,
    forbidden_energy_scan,
)

__version__ = "0.1.0"

__all__ = [
    "AdProblem", "BACKEND", "ClassifierConfig", "Coupling", "DegenerateDenominator",
    "DegenerateSpectrum", "EnergyClass", "ExcludedAngle", "ForbiddenEnergy",
    "HerglotzEval", "Measure", "NonUpperHalfPlane", "NotNormalized", "NotUnimodular",
    "NumericalError", "Piece", "SameExtension", "ScanReport", "SingpertError",
    "ValidationError", "Window", "boundary_value", "classify_energies",
    "coupling_from_theta", "coupling_sweep", "dyadic_benchmark",
    "eigenvalues_for_extension", "extension_for_energy", "forbidden_energy_scan",
    "g_n", "gamma_from_coupling", "inverse_square_moment", "theta_from_coupling",
    "theta_from_v", "transform", "v_from_gamma", "validate", "weighted_integral",
]
