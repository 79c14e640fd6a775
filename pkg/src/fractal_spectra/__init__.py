"""Spectral asymptotics of strings with self-similar indefinite weights.

The package splits into four layers:

* selfsim: the self-similar weight itself (validation, closed-form
  moments, spectral order, arithmetic classification, refinements);
* spectral: tridiagonal pencils A + lambda B, inertia counts and
  eigenvalue extraction on either ray;
* asympt: amplitude estimates of the eigenvalue counting function on
  phase lattices, including the period-doubling diagnostics;
* renewal: the two-component renewal systems whose limits govern those
  amplitudes, in discrete, lattice and real-delay form.
"""

from .asympt import (
    AmplitudeEstimate,
    PeriodDoublingReport,
    PhaseBin,
    estimate_constant_s,
    estimate_periodic_s,
    lattice_magnitudes,
    period_doubling_check,
)
from .errors import (
    BudgetExceeded,
    CoefficientInvariantViolation,
    ContractionViolation,
    EnvelopeTooWide,
    FixedPointSingular,
    ForcingOnNegativeAxis,
    FractalSpectraError,
    LengthMismatch,
    NonConvergence,
    NonDegenerateParity,
    NonPositiveScale,
    NoSpectralOrder,
    NumericalError,
    RayExhausted,
    ScaleSumMismatch,
    SeriesDivergence,
    UnstableStep,
    ValidationError,
    WindowTooNarrow,
)
from .renewal import (
    DecayCertificate,
    DiscreteLimits,
    EtaBound,
    Forcing,
    ForcingComponent,
    LimitReport,
    RenewalCoefficients,
    RenewalSolution,
    component_mass,
    discrete_limits,
    eta_bound,
    exponential_cut_component,
    forcing_from_spec,
    gaussian_component,
    nonarithmetic_limit,
    periodic_limit_s,
    q_polynomial,
    solve_discrete,
    solve_lattice,
    solve_nonarithmetic,
    table_component,
    triangle_component,
    zero_component,
)
from .selfsim import (
    CellData,
    Refinement,
    SelfSimilarParams,
    SimilarityMeta,
    cell_moments,
    compute_meta,
    meta_from_mapping,
    meta_to_mapping,
    reference_params,
    refine,
    validate_params,
)
from .spectral import (
    ConvergedEigenvalues,
    CountingSeries,
    Pencil,
    assemble_pencil,
    build_pencil,
    counting_series,
    eigenvalues,
    eigenvalues_converged,
    inertia,
    inertia_with_flag,
    series_from_arrays,
)

__version__ = "0.1.0"

__all__ = [
    "AmplitudeEstimate",
    "BudgetExceeded",
    "CellData",
    "CoefficientInvariantViolation",
    "ContractionViolation",
    "ConvergedEigenvalues",
    "CountingSeries",
    "DecayCertificate",
    "DiscreteLimits",
    "EnvelopeTooWide",
    "EtaBound",
    "FixedPointSingular",
    "Forcing",
    "ForcingComponent",
    "ForcingOnNegativeAxis",
    "FractalSpectraError",
    "LengthMismatch",
    "LimitReport",
    "NonConvergence",
    "NonDegenerateParity",
    "NonPositiveScale",
    "NoSpectralOrder",
    "NumericalError",
    "Pencil",
    "PeriodDoublingReport",
    "PhaseBin",
    "RayExhausted",
    "Refinement",
    "RenewalCoefficients",
    "RenewalSolution",
    "ScaleSumMismatch",
    "SelfSimilarParams",
    "SeriesDivergence",
    "SimilarityMeta",
    "UnstableStep",
    "ValidationError",
    "WindowTooNarrow",
    "assemble_pencil",
    "build_pencil",
    "cell_moments",
    "component_mass",
    "compute_meta",
    "counting_series",
    "discrete_limits",
    "eigenvalues",
    "eigenvalues_converged",
    "estimate_constant_s",
    "estimate_periodic_s",
    "eta_bound",
    "exponential_cut_component",
    "forcing_from_spec",
    "gaussian_component",
    "inertia",
    "inertia_with_flag",
    "lattice_magnitudes",
    "meta_from_mapping",
    "meta_to_mapping",
    "nonarithmetic_limit",
    "period_doubling_check",
    "periodic_limit_s",
    "q_polynomial",
    "reference_params",
    "refine",
    "series_from_arrays",
    "solve_discrete",
    "solve_lattice",
    "solve_nonarithmetic",
    "table_component",
    "triangle_component",
    "validate_params",
    "zero_component",
]
