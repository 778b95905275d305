"""Gell-Mann generators of SU(4) and Euler-angle charts of SU(4) and SU(2)."""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from functools import cache

import numpy as np
from numpy.typing import ArrayLike, NDArray

from purify.constants import (
    ANGLE_TOL,
    EULER_GENERATORS,
    SU2_ANGLE_BOUNDS,
    SU4_ANGLE_BOUNDS,
    SU4_ANGLE_COUNT,
)
from purify.errors import AngleBoundsError, DimensionError, GeneratorIndexError
from purify.quantum.qmat import I2, I4, SIGMA_Y, SIGMA_Z, CMatrix

# Off-diagonal generators as (row, column, symmetric?) with 1-based indices;
# diagonal ones are listed separately.
_OFF_DIAGONAL: dict[int, tuple[int, int, bool]] = {
    1: (1, 2, True),
    2: (1, 2, False),
    4: (1, 3, True),
    5: (1, 3, False),
    6: (2, 3, True),
    7: (2, 3, False),
    9: (1, 4, True),
    10: (1, 4, False),
    11: (2, 4, True),
    12: (2, 4, False),
    13: (3, 4, True),
    14: (3, 4, False),
}
_DIAGONAL: dict[int, tuple[float, ...]] = {
    3: (1.0, -1.0, 0.0, 0.0),
    8: tuple(v / math.sqrt(3) for v in (1.0, 1.0, -2.0, 0.0)),
    15: tuple(v / math.sqrt(6) for v in (1.0, 1.0, 1.0, -3.0)),
}
_CLOSED_FORM = frozenset({2, 3, 5, 10})


@cache
def _generator(index: int) -> CMatrix:
    matrix = np.zeros((4, 4), dtype=np.complex128)
    if index in _DIAGONAL:
        matrix[np.diag_indices(4)] = _DIAGONAL[index]
    else:
        row, col, symmetric = _OFF_DIAGONAL[index]
        matrix[row - 1, col - 1] = 1 if symmetric else -1j
        matrix[col - 1, row - 1] = 1 if symmetric else 1j
    matrix.flags.writeable = False
    return matrix


def gellmann(index: int) -> CMatrix:
    """Return sigma_index (1..15), traceless Hermitian with Tr(s_i s_j) = 2 d_ij."""
    if not 1 <= index <= 15:
        raise GeneratorIndexError(f"Gell-Mann index must be in 1..15, got {index}")
    return _generator(index).copy()


def gellmann_basis() -> list[CMatrix]:
    """``[I4, sigma_1, ..., sigma_15]``."""
    return [I4.copy()] + [gellmann(i) for i in range(1, 16)]


def exp_generator(index: int, alpha: float) -> CMatrix:
    """Closed-form ``exp(i * alpha * sigma_index)`` for the Euler generators."""
    if index in _DIAGONAL:
        return np.diag(np.exp(1j * alpha * np.asarray(_DIAGONAL[index])))
    if index not in _CLOSED_FORM:
        raise GeneratorIndexError(
            f"generator {index} does not appear in the Euler product"
        )
    sigma = _generator(index)
    # sigma^3 = sigma, so sigma^2 projects onto the generator's 2x2 block
    return I4 + (math.cos(alpha) - 1.0) * (sigma @ sigma) + 1j * math.sin(alpha) * sigma


# ── Angle vectors ───────────────────────────────────────────────


def _check_bounds(
    values: Sequence[float], bounds: Sequence[tuple[float, float]]
) -> tuple[float, ...]:
    checked = []
    for component, (value, (low, high)) in enumerate(
        zip(values, bounds, strict=True), start=1
    ):
        value = float(value)
        if not math.isfinite(value) or not low - ANGLE_TOL <= value <= high + ANGLE_TOL:
            raise AngleBoundsError(component, value, low, high)
        checked.append(min(max(value, low), high))
    return tuple(checked)


@dataclass(frozen=True, slots=True)
class GateAngles:
    """Fifteen Euler angles inside the SU(4) hyperrectangle (radians)."""

    values: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.values) != SU4_ANGLE_COUNT:
            raise DimensionError(
                f"expected {SU4_ANGLE_COUNT} angles, got {len(self.values)}"
            )
        object.__setattr__(self, "values", _check_bounds(self.values, SU4_ANGLE_BOUNDS))

    @classmethod
    def from_iterable(cls, values: Iterable[float]) -> GateAngles:
        return cls(tuple(float(v) for v in values))

    def as_array(self) -> NDArray[np.float64]:
        return np.array(self.values, dtype=np.float64)

    def to_list(self) -> list[float]:
        return list(self.values)

    def __getitem__(self, component: int) -> float:
        """1-based access matching the alpha_1..alpha_15 labels."""
        return self.values[component - 1]


@dataclass(frozen=True, slots=True)
class Su2Angles:
    """Euler angles of ``exp(i sz a1) exp(i sy a2) exp(i sz a3)``."""

    alpha1: float
    alpha2: float
    alpha3: float

    def __post_init__(self) -> None:
        a1, a2, a3 = _check_bounds(
            (self.alpha1, self.alpha2, self.alpha3), SU2_ANGLE_BOUNDS
        )
        object.__setattr__(self, "alpha1", a1)
        object.__setattr__(self, "alpha2", a2)
        object.__setattr__(self, "alpha3", a3)


def angle_bounds() -> NDArray[np.float64]:
    """``(15, 2)`` array of lower/upper bounds."""
    return np.array(SU4_ANGLE_BOUNDS, dtype=np.float64)


def su4_matrix(values: ArrayLike) -> CMatrix:
    """Ordered Euler product for a raw angle vector, without bound checks."""
    alpha = np.asarray(values, dtype=np.float64)
    result = I4.copy()
    for index, angle in zip(EULER_GENERATORS, alpha, strict=True):
        result = result @ exp_generator(index, float(angle))
    return result


def su4_from_angles(angles: GateAngles | Sequence[float]) -> CMatrix:
    """SU(4) element of the fifteen-factor Euler product."""
    if not isinstance(angles, GateAngles):
        angles = GateAngles.from_iterable(angles)
    return su4_matrix(angles.values)


def cnot_angles() -> GateAngles:
    """Angles whose Euler product equals ``exp(-3i pi/4) CNOT``."""
    values = [0.0] * SU4_ANGLE_COUNT
    for component in (3, 5, 7):
        values[component - 1] = math.pi / 4
    for component in (4, 6, 10):
        values[component - 1] = math.pi / 2
    return GateAngles(tuple(values))


def identity_angles() -> GateAngles:
    return GateAngles((0.0,) * SU4_ANGLE_COUNT)


def random_angles(rng: np.random.Generator, count: int | None = None) -> NDArray:
    """Uniform draws in the hyperrectangle, shape ``(count, 15)`` or ``(15,)``."""
    bounds = angle_bounds()
    size = (SU4_ANGLE_COUNT,) if count is None else (count, SU4_ANGLE_COUNT)
    return rng.uniform(bounds[:, 0], bounds[:, 1], size=size)


def _rotation(pauli: CMatrix, angle: float) -> CMatrix:
    return math.cos(angle) * I2 + 1j * math.sin(angle) * pauli


def su2_from_angles(angles: Su2Angles | Sequence[float]) -> CMatrix:
    """``exp(i sz a1) exp(i sy a2) exp(i sz a3)``."""
    if not isinstance(angles, Su2Angles):
        angles = Su2Angles(*angles)
    return (
        _rotation(SIGMA_Z, angles.alpha1)
        @ _rotation(SIGMA_Y, angles.alpha2)
        @ _rotation(SIGMA_Z, angles.alpha3)
    )


# ── Named gates ─────────────────────────────────────────────────

CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128
)
"""Control on the first qubit of the local pair, target on the second."""

CNOT_PHASE = np.exp(3j * math.pi / 4)
"""``CNOT = CNOT_PHASE * su4_from_angles(cnot_angles())``."""

B_GATE = (I2 + 1j * np.array([[0, 1], [1, 0]], dtype=np.complex128)) / math.sqrt(2)
