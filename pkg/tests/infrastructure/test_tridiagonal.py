import numpy as np
import pytest

from chainhydro.domain.models.chain import TridiagSym
from chainhydro.infrastructure.linalg import (
    SpectralError,
    check_decomposition,
    eig_sym_tridiag,
    fix_signs,
    nearest_orthonormal,
)
from chainhydro.infrastructure.linalg.tridiagonal import degenerate_modes
from chainhydro.infrastructure.observability import get_metrics_summary


def _laplacian(n: int) -> TridiagSym:
    diag = np.full(n, 2.0)
    diag[0] = diag[-1] = 1.0
    return TridiagSym(diag, np.full(n - 1, -1.0))


class TestEigSymTridiag:
    def test_free_laplacian(self):
        n = 12
        eigen = eig_sym_tridiag(_laplacian(n))
        expected = 4.0 * np.sin(np.pi * np.arange(n) / (2 * n)) ** 2
        np.testing.assert_allclose(eigen.eigenvalues, expected, atol=1e-13)
        assert abs(eigen.eigenvalues[0]) < 1e-14
        np.testing.assert_allclose(eigen.eigenvectors.T @ eigen.eigenvectors, np.eye(n), atol=1e-13)
        assert get_metrics_summary()["eigendecompositions_total"] == 1.0

    def test_against_jacobi(self, eigen_oracle):
        rng = np.random.default_rng(5)
        matrix = TridiagSym(rng.uniform(1.0, 3.0, 10), rng.uniform(-1.0, 1.0, 9))
        values, _ = eigen_oracle(matrix.to_dense())
        np.testing.assert_allclose(eig_sym_tridiag(matrix).eigenvalues, values, atol=1e-12)

    def test_sign_convention(self):
        eigen = eig_sym_tridiag(_laplacian(9))
        vectors = eigen.eigenvectors
        peaks = vectors[np.argmax(np.abs(vectors), axis=0), np.arange(9)]
        assert np.all(peaks > 0)

    def test_too_small(self):
        with pytest.raises(SpectralError, match="2×2"):
            eig_sym_tridiag(TridiagSym(np.array([1.0]), np.array([])))

    def test_degenerate_pair_reported(self):
        matrix = TridiagSym(np.array([1.0, 1.0, 3.0]), np.array([0.0, 0.0]))
        eigen = eig_sym_tridiag(matrix)
        assert eigen.degenerate_modes == (0,)


def test_fix_signs_vector():
    np.testing.assert_array_equal(fix_signs(np.array([0.1, -0.9])), [-0.1, 0.9])


def test_degenerate_modes():
    assert degenerate_modes(np.array([0.0, 1.0, 1.0 + 1e-15, 2.0])) == (1,)
    assert degenerate_modes(np.array([0.0, 1.0])) == ()


def test_check_decomposition_rejects_bad_vectors():
    matrix = _laplacian(6)
    eigen = eig_sym_tridiag(matrix)
    with pytest.raises(SpectralError, match="orthonormal"):
        check_decomposition(matrix, eigen.eigenvalues, 2.0 * eigen.eigenvectors)
    shuffled = eigen.eigenvalues[::-1].copy()
    with pytest.raises(SpectralError, match="residual") as info:
        check_decomposition(matrix, shuffled, eigen.eigenvectors)
    assert info.value.mode is not None


def test_nearest_orthonormal_keeps_columns():
    rng = np.random.default_rng(2)
    basis, _ = np.linalg.qr(rng.normal(size=(8, 8)))
    perturbed = basis + 1e-7 * rng.normal(size=(8, 8))
    fixed = nearest_orthonormal(perturbed)
    np.testing.assert_allclose(fixed.T @ fixed, np.eye(8), atol=1e-14)
    assert np.max(np.abs(fixed - basis)) < 1e-6
    assert np.all(np.sum(fixed * basis, axis=0) > 0)
