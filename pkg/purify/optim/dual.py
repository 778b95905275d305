"""Forward-mode dual arrays carrying a stack of tangents.

A :class:`Dual` pairs a complex array ``value`` with ``tangent``, which has
one extra leading axis: ``tangent[k]`` is the derivative of ``value`` along
the k-th seed direction. Matrix products follow the product rule.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike, NDArray

from purify.constants import EULER_GENERATORS, SU4_ANGLE_COUNT
from purify.quantum.gellmann import exp_generator, gellmann
from purify.quantum.qmat import I4


def _lift(tangent: NDArray, ndim: int) -> NDArray:
    """Pad the value axes of ``tangent`` on the left up to ``ndim``."""
    missing = ndim - (tangent.ndim - 1)
    if missing <= 0:
        return tangent
    return tangent.reshape(tangent.shape[:1] + (1,) * missing + tangent.shape[1:])


class Dual:
    __slots__ = ("value", "tangent")

    def __init__(self, value: ArrayLike, tangent: ArrayLike) -> None:
        self.value = np.asarray(value)
        self.tangent = np.asarray(tangent)

    @classmethod
    def constant(cls, value: ArrayLike, directions: int) -> Dual:
        v = np.asarray(value)
        return cls(v, np.zeros((directions,) + v.shape, dtype=v.dtype))

    @property
    def directions(self) -> int:
        return int(self.tangent.shape[0])

    def __repr__(self) -> str:
        return f"Dual(shape={self.value.shape}, directions={self.directions})"

    def __matmul__(self, other: Dual | ArrayLike) -> Dual:
        if isinstance(other, Dual):
            value = self.value @ other.value
            return Dual(
                value,
                _lift(self.tangent, value.ndim) @ other.value
                + self.value @ _lift(other.tangent, value.ndim),
            )
        value = self.value @ np.asarray(other)
        return Dual(value, _lift(self.tangent, value.ndim) @ np.asarray(other))


# ── Seeded gates ────────────────────────────────────────────────


def exp_generator_dual(
    index: int, alpha: float, direction: int, directions: int
) -> Dual:
    """``exp(i alpha sigma)`` seeded along one coordinate direction.

    ``d/d alpha exp(i alpha sigma) = i sigma exp(i alpha sigma)``.
    """
    value = exp_generator(index, alpha)
    tangent = np.zeros((directions, 4, 4), dtype=np.complex128)
    tangent[direction] = 1j * gellmann(index) @ value
    return Dual(value, tangent)


def su4_dual(values: ArrayLike) -> Dual:
    """Euler product with the fifteen angle derivatives as tangents."""
    alpha = np.asarray(values, dtype=np.float64)
    product = Dual.constant(I4, SU4_ANGLE_COUNT)
    for k, (index, angle) in enumerate(zip(EULER_GENERATORS, alpha, strict=True)):
        product = product @ exp_generator_dual(index, float(angle), k, SU4_ANGLE_COUNT)
    return product
