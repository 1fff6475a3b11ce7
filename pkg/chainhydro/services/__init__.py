"""Service layer modules for chainhydro."""

from .chain_model import build_Ap, build_Ar, sample_masses, sample_profiles  # noqa: F401
from .classical_state import local_gibbs_moments, sample_state  # noqa: F401
from .euler_macro import MacroSolution, QuadratureError, solve_macro  # noqa: F401
from .quantum_state import quantum_locally_gibbs_state, thermal_energy_profile  # noqa: F401
from .spectral import SpectralService, build_spectral  # noqa: F401

__all__ = [
    "MacroSolution",
    "QuadratureError",
    "SpectralService",
    "build_Ap",
    "build_Ar",
    "build_spectral",
    "local_gibbs_moments",
    "quantum_locally_gibbs_state",
    "sample_masses",
    "sample_profiles",
    "sample_state",
    "solve_macro",
    "thermal_energy_profile",
]
