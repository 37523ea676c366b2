"""Simulator for a three-level lambda atom driven by coherent and stochastic fields.

The package builds the effective evolution generator of the reduced atomic
state two independent ways, solves for steady states in the bare and dressed
bases, evaluates the incoherent fluorescence spectrum through the regression
theorem, and validates the effective description against explicitly sampled
noise trajectories.
"""

__version__ = "0.1.0"

from .dressed import (
    DressedBasis,
    DressedPopulations,
    GammaSet,
    closed_form_populations,
    dressed_basis,
    gammas,
    noise_free_limit,
    numeric_dressed_populations,
)
from .generator import (
    AffineGenerator,
    GeneratorDiff,
    StabilityReport,
    compare_generators,
    constructed_generator,
    stability_spectrum,
    transcribed_generator,
)
from .noise import CoeffSet, ZMatrices, build_z, compute_coeffs, f_n
from .params import (
    AtomParams,
    DerivedQuantities,
    NoiseParams,
    derive,
    generalized_rabi,
)
from .spectrum import (
    CorrelationInit,
    SpectrumResult,
    initial_correlations,
    resolvent_response,
    s_inc,
    spectrum_sweep,
)
from .states import mat_to_vec, pairing_defect, populations, vec_to_mat
from .steady import (
    SingularGeneratorError,
    SteadyState,
    SweepResult,
    evolve,
    solve_steady,
    sweep,
)
from .trajectories import (
    EnsembleResult,
    OUPath,
    ensemble_average,
    integrate_trajectory,
    sample_ou,
)

__all__ = [
    "__version__",
    "AtomParams", "NoiseParams", "DerivedQuantities", "derive", "generalized_rabi",
    "CoeffSet", "ZMatrices", "f_n", "compute_coeffs", "build_z",
    "AffineGenerator", "GeneratorDiff", "StabilityReport",
    "constructed_generator", "transcribed_generator", "compare_generators",
    "stability_spectrum",
    "SteadyState", "SweepResult", "SingularGeneratorError",
    "solve_steady", "evolve", "sweep",
    "DressedBasis", "GammaSet", "DressedPopulations",
    "dressed_basis", "gammas", "closed_form_populations", "noise_free_limit",
    "numeric_dressed_populations",
    "CorrelationInit", "SpectrumResult",
    "initial_correlations", "resolvent_response", "s_inc", "spectrum_sweep",
    "OUPath", "EnsembleResult", "sample_ou", "integrate_trajectory", "ensemble_average",
    "vec_to_mat", "mat_to_vec", "pairing_defect", "populations",
]
