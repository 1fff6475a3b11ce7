"""LAPACK adapter for symmetric tridiagonal eigenproblems.

The decomposition runs the implicit QL/QR driver (``?stev``) with eigenvector
accumulation through :func:`scipy.linalg.eigh_tridiagonal`. The adapter adds
what callers rely on: clamping of tiny negative eigenvalues, a deterministic
sign convention, degenerate-gap detection and post-construction checks of
orthonormality and eigen-residuals. :func:`nearest_orthonormal` restores
orthonormality of bases derived from an eigenbasis.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal, polar

from chainhydro.domain.models.chain import TridiagSym
from chainhydro.infrastructure.observability import Timer, get_logger, increment_counter
from chainhydro.infrastructure.observability.metrics import (
    EIGENDECOMPOSITIONS,
    EIGENDECOMPOSITION_DURATION,
)

logger = get_logger(__name__)

ZERO_CLAMP = 1e-12
DEGENERATE_GAP = 1e-13
ORTHONORMALITY_TOL = 1e-10
RESIDUAL_TOL = 1e-9

_INFO_RE = re.compile(r"info\s*=\s*(-?\d+)", re.IGNORECASE)


class SpectralError(ArithmeticError):
    """Eigensolver failure or violated post-construction bound."""

    def __init__(self, message: str, mode: int | None = None) -> None:
        super().__init__(message)
        self.mode = mode


@dataclass(frozen=True)
class TridiagonalEigen:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    degenerate_modes: tuple[int, ...] = ()


def fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip columns so that each entry of largest magnitude is positive."""
    vectors = np.array(vectors, dtype=np.float64, copy=True)
    if vectors.ndim == 1:
        return vectors if vectors[np.argmax(np.abs(vectors))] >= 0 else -vectors
    rows = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[rows, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def degenerate_modes(eigenvalues: np.ndarray, gap: float = DEGENERATE_GAP) -> tuple[int, ...]:
    """Indices k with λ_{k+1} − λ_k below ``gap``."""
    gaps = np.diff(eigenvalues)
    return tuple(int(k) for k in np.flatnonzero(gaps < gap))


def check_decomposition(
    matrix: TridiagSym,
    eigenvalues: np.ndarray,
    eigenvectors: np.ndarray,
    label: str = "matrix",
) -> None:
    """Raise :class:`SpectralError` when orthonormality or residual bounds fail.

    Residuals are measured relative to the Gershgorin bound of ``matrix`` so
    that the kernel mode is judged on the same scale as the rest.
    """
    size = matrix.size
    gram = eigenvectors.T @ eigenvectors
    ortho = float(np.max(np.abs(gram - np.eye(size))))
    if ortho >= ORTHONORMALITY_TOL:
        raise SpectralError(
            f"{label}: eigenvectors not orthonormal (max deviation {ortho:.3e})"
        )
    scale = max(matrix.gershgorin_bound(), np.finfo(np.float64).tiny)
    residual = matrix.matvec(eigenvectors) - eigenvectors * eigenvalues[None, :]
    relative = np.linalg.norm(residual, axis=0) / scale
    worst = int(np.argmax(relative))
    if relative[worst] >= RESIDUAL_TOL:
        raise SpectralError(
            f"{label}: eigen-residual {relative[worst]:.3e} at mode {worst}",
            mode=worst,
        )


def eig_sym_tridiag(
    matrix: TridiagSym, label: str = "matrix", validate: bool = True
) -> TridiagonalEigen:
    """Full eigendecomposition, eigenvalues ascending, columns orthonormal."""
    if matrix.size < 2:
        raise SpectralError(f"{label}: need at least a 2×2 matrix, got size {matrix.size}")
    with Timer(EIGENDECOMPOSITION_DURATION):
        try:
            values, vectors = eigh_tridiagonal(
                matrix.diag, matrix.offdiag, lapack_driver="stev"
            )
        except LinAlgError as exc:
            match = _INFO_RE.search(str(exc))
            mode = int(match.group(1)) if match else None
            raise SpectralError(
                f"{label}: implicit QL did not converge (mode index {mode}): {exc}",
                mode=mode,
            ) from exc
    increment_counter(EIGENDECOMPOSITIONS)

    values = np.asarray(values, dtype=np.float64)
    clamp = ZERO_CLAMP * max(1.0, float(np.max(np.abs(values))))
    values[(values < 0.0) & (values > -clamp)] = 0.0
    vectors = fix_signs(vectors)

    degenerate = degenerate_modes(values)
    if degenerate:
        logger.warning(
            "%s: %d near-degenerate eigenvalue gap(s) below %.0e at modes %s",
            label,
            len(degenerate),
            DEGENERATE_GAP,
            list(degenerate[:8]),
        )
    if validate:
        check_decomposition(matrix, values, vectors, label=label)
    logger.debug("%s: diagonalized size %d", label, matrix.size)
    return TridiagonalEigen(values, vectors, degenerate)


def nearest_orthonormal(vectors: np.ndarray) -> np.ndarray:
    """Orthogonal polar factor of a square ``vectors``.

    It is the orthonormal matrix closest to ``vectors`` in Frobenius norm, so
    columns that are already nearly orthonormal move by about their Gram
    deviation and keep their signs.
    """
    unitary, _ = polar(np.asarray(vectors, dtype=np.float64))
    return np.asarray(unitary)


__all__ = [
    "DEGENERATE_GAP",
    "SpectralError",
    "TridiagonalEigen",
    "ZERO_CLAMP",
    "check_decomposition",
    "degenerate_modes",
    "eig_sym_tridiag",
    "fix_signs",
    "nearest_orthonormal",
]
