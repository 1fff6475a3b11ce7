"""Domain models package.

Immutable value types for chains, profiles, spectra, states, macroscopic
fields and experiment results.
"""

from .chain import ChainModelError, DisorderedChain, MassLaw, MassLawKind, TridiagSym
from .fields import MacroFields
from .profiles import (
    ProfilePreset,
    Profiles,
    TestFunction,
    get_test_function,
    make_profiles,
)
from .results import (
    CellFailure,
    ClusteringReport,
    ConvergenceReport,
    FrequencyScan,
    FunctionalKind,
    FunctionalResult,
    HighModeSplit,
    LinearFit,
    LocalizationScan,
    MetricFit,
    ModeSplit,
    ReportRow,
)
from .spectral import SpectralData, ThermalSpectral, high_mode_indices, low_mode_indices
from .state import GaussianChainState, QuantumCovariance, StateError, StateFlavor

__all__ = [
    "CellFailure",
    "ChainModelError",
    "ClusteringReport",
    "ConvergenceReport",
    "DisorderedChain",
    "FrequencyScan",
    "FunctionalKind",
    "FunctionalResult",
    "GaussianChainState",
    "HighModeSplit",
    "LinearFit",
    "LocalizationScan",
    "MacroFields",
    "MassLaw",
    "MassLawKind",
    "MetricFit",
    "ModeSplit",
    "ProfilePreset",
    "Profiles",
    "QuantumCovariance",
    "ReportRow",
    "SpectralData",
    "StateError",
    "StateFlavor",
    "TestFunction",
    "ThermalSpectral",
    "TridiagSym",
    "get_test_function",
    "high_mode_indices",
    "low_mode_indices",
    "make_profiles",
]
