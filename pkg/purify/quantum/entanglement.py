"""Wootters concurrence of two-qubit density matrices."""

from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike, NDArray

from purify.constants import MATRIX_TOL
from purify.errors import NumericalFailureError
from purify.quantum.qmat import SIGMA_Y, DensityMatrix, dagger, validate_density

SPIN_FLIP = np.kron(SIGMA_Y, SIGMA_Y)
"""sigma_y (x) sigma_y: real, anti-diagonal (-1, 1, 1, -1)."""

_SIGNS = np.array([1.0, -1.0, -1.0, -1.0])

RANK_TOL = 1e-14
"""Eigenvalues of rho at or below this are dropped from its square-root factor."""

# Dual-mode tolerances: square roots below LAMBDA_ZERO are treated as a
# locally vanishing eigenvalue (mu >= 0 has a minimum there, subgradient 0).
LAMBDA_ZERO = 1e-7
KINK_TOL = 1e-9
GAP_TOL = 1e-9
EIGEN_CONDITION_LIMIT = 1e6
IMAG_TOL = 1e-8


def _hermitian(matrices: NDArray) -> NDArray:
    return 0.5 * (matrices + dagger(matrices))


def flipped(rhos: NDArray) -> NDArray:
    """``(sy x sy) rho* (sy x sy)`` over a stack of 4x4 matrices."""
    return SPIN_FLIP @ np.conj(rhos) @ SPIN_FLIP


def rho_tilde(rho: ArrayLike) -> NDArray:
    """The non-Hermitian matrix ``rho (sy x sy) rho* (sy x sy)``."""
    matrix = np.asarray(rho, dtype=np.complex128)
    return matrix @ flipped(matrix)


def square_root_factor(rhos: NDArray) -> NDArray:
    """``W`` with ``rho = W W^dagger``, from the eigendecomposition of ``rho``.

    Columns whose eigenvalue is at or below ``RANK_TOL`` are zero, so a
    rank-deficient state contributes no rounding noise through them.
    """
    try:
        weights, vectors = np.linalg.eigh(_hermitian(rhos))
    except np.linalg.LinAlgError as exc:
        raise NumericalFailureError(f"eigenvalue iteration failed: {exc}") from exc
    kept = np.where(weights > RANK_TOL, weights, 0.0)
    return vectors * np.sqrt(kept)[..., None, :]


def tilde_roots(rhos: NDArray) -> NDArray[np.float64]:
    """Square roots of the eigenvalues of rho-tilde, descending.

    With ``rho = W W^dagger`` the nonzero spectrum of rho-tilde equals that of
    ``M M^dagger`` for the complex symmetric ``M = W^T (sy x sy) W``, so the
    roots are the singular values of ``M``.
    """
    factor = square_root_factor(rhos)
    overlap = np.swapaxes(factor, -1, -2) @ SPIN_FLIP @ factor
    try:
        roots = np.linalg.svd(overlap, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailureError(f"singular value iteration failed: {exc}") from exc
    if not np.all(np.isfinite(roots)):
        raise NumericalFailureError("concurrence spectrum is not finite")
    return roots


def tilde_spectrum(rhos: NDArray) -> NDArray[np.float64]:
    """Eigenvalues of rho-tilde, ascending, for a stack of density matrices."""
    return (tilde_roots(rhos) ** 2)[..., ::-1]


def concurrence_batch(rhos: ArrayLike, strict: bool = False) -> NDArray[np.float64]:
    """Concurrence of every 4x4 matrix in a ``(..., 4, 4)`` stack.

    With ``strict`` the clamp thresholds of :func:`concurrence` are enforced;
    otherwise values are clamped silently (optimizer hot path).
    """
    stack = np.asarray(rhos, dtype=np.complex128)
    values = tilde_roots(stack) @ _SIGNS
    if strict:
        overshoot = float(np.max(values)) - 1.0
        if overshoot > MATRIX_TOL:
            raise NumericalFailureError(f"concurrence exceeds 1 by {overshoot:.3e}")
    return np.clip(values, 0.0, 1.0)


def concurrence(rho: ArrayLike | DensityMatrix) -> float:
    """``max(0, l1 - l2 - l3 - l4)`` with ``l_i`` the square roots of the
    eigenvalues of rho-tilde in descending order."""
    checked = validate_density(rho)
    if checked.dim != 4:
        raise NumericalFailureError("concurrence is defined for two-qubit states")
    return float(concurrence_batch(checked.matrix[None], strict=True)[0])


def concurrence_with_tangent(
    rhos: NDArray, tangents: NDArray
) -> tuple[NDArray[np.float64], NDArray[np.float64], NDArray[np.bool_]]:
    """Concurrence values, directional derivatives and a reliability mask.

    ``rhos`` has shape ``(n, 4, 4)`` and ``tangents`` ``(k, n, 4, 4)``. The
    derivative of each eigenvalue ``mu_i`` of rho-tilde along a tangent is the
    diagonal element ``(X^-1 d(rho-tilde) X)_ii``. Samples at the ``C = 0``
    kink, with clustered or ill-conditioned active eigenvalues, are flagged
    unreliable so the caller can difference them instead.
    """
    values = concurrence_batch(rhos)
    flip = flipped(rhos)
    tilde = rhos @ flip
    tilde_dot = tangents @ flip + rhos @ flipped(tangents)

    try:
        mu, right = np.linalg.eig(tilde)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailureError(f"eigenvalue iteration failed: {exc}") from exc
    well_posed = np.linalg.cond(right) < 1e12
    right_safe = np.where(well_posed[:, None, None], right, np.eye(4))
    left = np.linalg.inv(right_safe)
    mu_dot = np.einsum("nij,knjl,nli->kni", left, tilde_dot, right_safe)
    conditioning = np.linalg.norm(left, axis=-1) * np.linalg.norm(right_safe, axis=-2)

    roots = np.sqrt(np.clip(mu.real, 0.0, None))
    order = np.argsort(-roots, axis=-1)
    roots = np.take_along_axis(roots, order, axis=-1)
    mu_sorted = np.take_along_axis(mu, order, axis=-1)
    mu_dot = np.take_along_axis(mu_dot, np.broadcast_to(order, mu_dot.shape), axis=-1)
    conditioning = np.take_along_axis(conditioning, order, axis=-1)

    vanishing = roots < LAMBDA_ZERO
    safe_roots = np.where(vanishing, 1.0, roots)
    root_dot = np.where(vanishing, 0.0, mu_dot.real / (2.0 * safe_roots))
    raw = roots @ _SIGNS
    gradient = np.where(raw > KINK_TOL, root_dot @ _SIGNS, 0.0)

    gaps = np.abs(mu_sorted[:, :, None] - mu_sorted[:, None, :])
    gaps[:, np.arange(4), np.arange(4)] = np.inf
    clustered = gaps.min(axis=-1) < GAP_TOL * np.maximum(1.0, np.abs(mu_sorted))
    active = ~vanishing
    troubled = active & (
        clustered
        | (conditioning > EIGEN_CONDITION_LIMIT)
        | (np.abs(mu_sorted.imag) > IMAG_TOL)
    )
    reliable = (
        well_posed
        & (np.abs(raw) > KINK_TOL)
        & ~((raw > KINK_TOL) & troubled.any(axis=-1))
        & np.all(np.isfinite(gradient), axis=0)
    )
    return values, np.where(reliable[None, :], gradient, 0.0), reliable
