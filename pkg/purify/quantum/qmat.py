"""Small dense complex matrices (2x2, 4x4, 16x16) and density-matrix checks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from purify.constants import MATRIX_TOL, UNITARY_TOL
from purify.errors import (
    DimensionError,
    HermiticityError,
    NotUnitaryError,
    NumericalFailureError,
    PositivityError,
    TraceError,
)

CMatrix = NDArray[np.complex128]
Spectrum = NDArray[np.complex128]

SUPPORTED_DIMS = (2, 4, 16)

I2 = np.eye(2, dtype=np.complex128)
I4 = np.eye(4, dtype=np.complex128)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)


@dataclass(frozen=True, slots=True)
class DensityMatrix:
    """A matrix that passed :func:`validate_density`."""

    matrix: CMatrix

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])


def as_matrix(value: ArrayLike | DensityMatrix) -> CMatrix:
    """Return a complex square array, unwrapping validated density matrices."""
    if isinstance(value, DensityMatrix):
        return value.matrix
    matrix = np.asarray(value, dtype=np.complex128)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {matrix.shape}")
    if matrix.shape[0] not in SUPPORTED_DIMS:
        raise DimensionError(f"unsupported dimension {matrix.shape[0]}")
    if not np.all(np.isfinite(matrix)):
        raise NumericalFailureError("matrix has non-finite entries")
    return matrix


def dagger(matrix: ArrayLike) -> CMatrix:
    """Conjugate transpose over the last two axes."""
    return np.conj(np.swapaxes(np.asarray(matrix, dtype=np.complex128), -1, -2))


def kron(a: ArrayLike | DensityMatrix, b: ArrayLike | DensityMatrix) -> CMatrix:
    """Kronecker product with index ``(i*dim(B) + k, j*dim(B) + l)``."""
    left, right = as_matrix(a), as_matrix(b)
    if left.shape[0] * right.shape[0] > 16:
        raise DimensionError("Kronecker products are limited to 16x16")
    return np.kron(left, right)


def trace(matrix: ArrayLike | DensityMatrix) -> complex:
    return complex(np.trace(as_matrix(matrix)))


def eig_general(matrix: ArrayLike) -> Spectrum:
    """All four eigenvalues of a general (non-Hermitian) 4x4 matrix."""
    values = as_matrix(matrix)
    if values.shape[0] != 4:
        raise DimensionError(f"eig_general expects 4x4, got {values.shape}")
    try:
        spectrum = np.linalg.eigvals(values)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailureError(f"eigenvalue iteration failed: {exc}") from exc
    if not np.all(np.isfinite(spectrum)):
        raise NumericalFailureError("eigenvalue solver returned non-finite values")
    return spectrum


def validate_density(rho: ArrayLike | DensityMatrix) -> DensityMatrix:
    """Check Hermiticity, unit trace and positivity; tag the result validated.

    Raises the matching :class:`~purify.errors.ValidationFailure` subclass
    with the measured violation.
    """
    if isinstance(rho, DensityMatrix):
        return rho
    matrix = as_matrix(rho)
    if matrix.shape[0] not in (4, 16):
        raise DimensionError(f"density matrices are 4x4 or 16x16, got {matrix.shape}")

    asymmetry = float(np.max(np.abs(matrix - dagger(matrix))))
    if asymmetry > MATRIX_TOL:
        raise HermiticityError(asymmetry, MATRIX_TOL)

    trace_gap = abs(np.trace(matrix) - 1.0)
    if trace_gap > MATRIX_TOL:
        raise TraceError(trace_gap, MATRIX_TOL)

    lowest = float(np.linalg.eigvalsh(0.5 * (matrix + dagger(matrix)))[0])
    if lowest < -MATRIX_TOL:
        raise PositivityError(-lowest, MATRIX_TOL)

    return DensityMatrix(matrix)


def check_unitary(matrix: ArrayLike, tol: float = UNITARY_TOL) -> CMatrix:
    """Return ``matrix`` if ``U U^dagger = I`` within ``tol``."""
    u = as_matrix(matrix)
    deviation = float(np.max(np.abs(u @ dagger(u) - np.eye(u.shape[0]))))
    if deviation > tol:
        raise NotUnitaryError(f"gate deviates from unitarity by {deviation:.3e}")
    return u


def projector(vector: ArrayLike) -> CMatrix:
    """``|v><v|`` for a (not necessarily normalized) state vector."""
    v = np.asarray(vector, dtype=np.complex128)
    return np.outer(v, v.conj())
