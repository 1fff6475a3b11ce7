"""Linear-algebra adapters."""

from .tridiagonal import (
    SpectralError,
    TridiagonalEigen,
    check_decomposition,
    eig_sym_tridiag,
    fix_signs,
    nearest_orthonormal,
)

__all__ = [
    "SpectralError",
    "TridiagonalEigen",
    "check_decomposition",
    "eig_sym_tridiag",
    "fix_signs",
    "nearest_orthonormal",
]
