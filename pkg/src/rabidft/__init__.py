"""Ground-state density-functional theory for the quantum Rabi model.

Exact diagonalization in a truncated Fock basis, the conjugate pair of
ground energy and Levy-Lieb functional, the adiabatic connection in the
coupling scale, the photon-free approximation and the regular-polarization
geometry of small Dicke models.
"""

from .params import (
    BoundaryError,
    BracketError,
    ConvergenceError,
    ConvergenceOptions,
    DegenerateGroundStateError,
    DensityPair,
    DickeParams,
    ExternalPair,
    FitError,
    ModelParams,
    ParameterError,
    UnsupportedSizeError,
)
from .spectra import GroundSolution, ground_state, rabi_spectrum
from .observables import ExpectationSet, HypervirialReport, expectations, hypervirial_residuals
from .functionals import (
    FunctionalValue,
    HKInverseResult,
    constrained_optimizer,
    ground_energy,
    hk_inverse,
    legendre_grid_oracle,
    levy_lieb,
)
from .quadrature import QuadratureSpec
from .adiabatic import bounds_suite, correlation_breakdown, correlation_integral_I
from .ellipse import EllipseFit, fit_ellipse, fit_sweep
from .photon_free import build_pf_hamiltonian, compare_potentials, estimate_eta
from .dicke import irregular_faces, is_regular, regularity_rank

__version__ = "0.1.0"

__all__ = [
    "BoundaryError", "BracketError", "ConvergenceError", "ConvergenceOptions", "DegenerateGroundStateError",
    "DensityPair", "DickeParams", "ExternalPair", "FitError", "ModelParams", "ParameterError",
    "UnsupportedSizeError", "GroundSolution", "ground_state", "rabi_spectrum", "ExpectationSet",
    "HypervirialReport", "expectations", "hypervirial_residuals", "FunctionalValue", "HKInverseResult",
    "constrained_optimizer", "ground_energy", "hk_inverse", "legendre_grid_oracle", "levy_lieb",
    "QuadratureSpec", "bounds_suite", "correlation_breakdown", "correlation_integral_I", "EllipseFit",
    "fit_ellipse", "fit_sweep", "build_pf_hamiltonian", "compare_potentials", "estimate_eta",
    "irregular_faces", "is_regular", "regularity_rank", "__version__",
]
