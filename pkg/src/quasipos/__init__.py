"""Quasi-position quantum mechanics for generalized uncertainty principles."""

__version__ = "0.1.0"

from .errors import (ConfigurationError, ConventionError, DomainError, NoMinimumError,
                     NumericalError, QuasiposError, RegimeWarning, ResolutionError,
                     TruncationWarning)
from .kernels import BACKEND
from .mlstate import MLParams, MLState, ml_wavefunction, solve_ml_params, verify_ml_conditions
from .model import (GupModel, custom, custom_from_expression, identity, kinematic_scales, kmm,
                    model_from_dict, model_to_dict, p_of_rho, rho_of_p, sqrt_model)
from .overlap import identity_resolution_check, ml_overlap, position_overlap
from .quadrature import MomentumGrid, build_grid
from .solver import (HamiltonianSpec, Potential, compare_prescriptions, perturbation_first_order,
                     solve_spectrum)
from .transform import prime_map, to_momentum, to_quasiposition, xi_grid
from .wavefunction import WaveFunction

__all__ = [
    "BACKEND", "ConfigurationError", "ConventionError", "DomainError", "GupModel",
    "HamiltonianSpec", "MLParams", "MLState", "MomentumGrid", "NoMinimumError", "NumericalError",
    "Potential", "QuasiposError", "RegimeWarning", "ResolutionError", "TruncationWarning",
    "WaveFunction", "build_grid", "compare_prescriptions", "custom", "custom_from_expression",
    "identity", "identity_resolution_check", "kinematic_scales", "kmm", "ml_overlap",
    "ml_wavefunction", "model_from_dict", "model_to_dict", "p_of_rho", "perturbation_first_order",
    "position_overlap", "prime_map", "rho_of_p", "solve_ml_params", "solve_spectrum",
    "sqrt_model", "to_momentum", "to_quasiposition", "verify_ml_conditions", "xi_grid",
]
