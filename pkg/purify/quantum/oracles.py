"""Closed-form CNOT results and quadrature baselines.

Nothing here touches matrices: the formulas are an independent code path for
checking the simulator.
"""

from __future__ import annotations

import math
from collections.abc import Callable

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import integrate

from purify.errors import UnsupportedOracleError
from purify.quantum.families import PdfKind, PdfSpec, get_family

CNOT_DISK_BASELINE = 1 - (8 / math.pi) * (
    -1 + math.log(3 + 2 * math.sqrt(2)) / math.sqrt(2)
)
"""Exact disk average of the one-round CNOT cost on the two-parameter family."""

ORACLE_ITERATIONS: dict[str, int] = {
    "rotated-werner": 1,
    "one-step": 1,
    "phi-mix": 1,
    "maz": 1,
    "qr": 2,
}


def _rotated_werner(x: NDArray) -> tuple[NDArray, NDArray]:
    denominator = 5 - 4 * x + 8 * x**2
    return np.maximum(0.0, 3 * (4 * x**2 - 1) / denominator), denominator / 9


def _one_step(x: NDArray) -> tuple[NDArray, NDArray]:
    # at x = 0 nothing is entangled; at x = 1 outcomes 00 and 11 both reach C' = 1
    concurrence = np.where(x > 0.0, 1.0, 0.0)
    return concurrence, np.where(x < 1.0, x**2 / 2, 1.0)


def _phi_mix(x: NDArray) -> tuple[NDArray, NDArray]:
    return (1 - 2 * x) ** 2, np.ones_like(x)


def _maz(x: NDArray) -> tuple[NDArray, NDArray]:
    c = np.where(x > 0.5, 2 * x * (2 * x - 1) / (1 + x**2), 0.0)
    return c, (1 + x**2) / 2


def qr_round(x: NDArray, rounds: int) -> tuple[NDArray, list[NDArray]]:
    """CNOT concurrence after ``rounds`` (1 or 2) and the per-round probabilities."""
    ax = np.abs(x)
    first_c = 2 * ax / (1 + x**2)
    first_p = (1 + x**2) / 2
    if rounds == 1:
        return first_c, [first_p]
    quartic = 1 + 6 * x**2 + x**4
    second_c = 4 * ax * (1 + x**2) / quartic
    second_p = quartic / (2 * (1 + x**2) ** 2)
    return second_c, [first_p, second_p]


_SINGLE_ROUND: dict[str, Callable[[NDArray], tuple[NDArray, NDArray]]] = {
    "rotated-werner": _rotated_werner,
    "one-step": _one_step,
    "phi-mix": _phi_mix,
    "maz": _maz,
}


def cnot_oracle(
    family: str, params: ArrayLike, iterations: int = 1
) -> tuple[NDArray[np.float64], list[NDArray[np.float64]]]:
    """Published CNOT concurrence and per-iteration success probabilities.

    ``params`` has shape ``(m, arity)`` (or ``(arity,)`` for one point).
    """
    name = get_family(family).name
    limit = ORACLE_ITERATIONS.get(name)
    if limit is None or not 1 <= iterations <= limit:
        raise UnsupportedOracleError(
            f"no closed form for family {family!r} at N = {iterations}"
        )
    points = np.atleast_2d(np.asarray(params, dtype=np.float64))
    x = points[:, 0]
    if name == "qr":
        return qr_round(x, iterations)
    concurrence, probability = _SINGLE_ROUND[name](x)
    return concurrence, [probability]


def state_dependent_cnot(x: ArrayLike, y: ArrayLike) -> tuple[NDArray, NDArray]:
    """CNOT after the state-dependent local transform: depends on ``c`` only."""
    c2 = np.asarray(x, dtype=np.float64) ** 2 + np.asarray(y, dtype=np.float64) ** 2
    return 2 * np.sqrt(c2) / (1 + c2), (1 + c2) / 2


def mirrored_cnot(x: ArrayLike, y: ArrayLike) -> tuple[NDArray, NDArray]:
    """CNOT after the mirroring SU(2) dressing: the roles of x and y swap."""
    y = np.asarray(y, dtype=np.float64)
    concurrence, (probability,) = qr_round(y, 1)
    return concurrence, probability


# ── Quadrature ──────────────────────────────────────────────────


def expected_value(fn: Callable[[NDArray], NDArray], pdf: PdfSpec) -> float:
    """``E[fn(x)]`` under ``pdf`` by adaptive quadrature.

    ``fn`` takes ``(m, dimension)`` points. Disk integrals run in polar form.
    """
    if pdf.kind is PdfKind.DISK:

        def polar(phi: float, r: float) -> float:
            point = np.array([[r * math.cos(phi), r * math.sin(phi)]])
            return float(fn(point)[0]) * r / math.pi

        value, _ = integrate.dblquad(
            polar, 0.0, 1.0, 0.0, 2 * math.pi, epsabs=1e-10, epsrel=1e-10
        )
        return value

    low, high = pdf.support

    def integrand(x: float) -> float:
        point = np.array([[x]])
        return float(fn(point)[0] * pdf.density(point)[0])

    breaks = [b for b in (0.5,) if low < b < high]
    value, _ = integrate.quad(
        integrand,
        low,
        high,
        points=breaks or None,
        epsabs=1e-12,
        epsrel=1e-12,
        limit=200,
    )
    return value


def input_baseline(family: str, pdf: PdfSpec) -> float:
    """``1 - E[C(x)]`` of the untouched input states."""
    known = get_family(family).known_concurrence
    if known is None:
        raise UnsupportedOracleError(f"family {family!r} has no closed-form concurrence")
    return 1.0 - expected_value(known, pdf)


def cnot_baseline(family: str, pdf: PdfSpec, iterations: int = 1) -> float:
    """``1 - E[C'_CNOT(x)]`` from the closed forms."""
    return 1.0 - expected_value(lambda p: cnot_oracle(family, p, iterations)[0], pdf)


def dressed_baselines() -> dict[str, float]:
    """Disk-average costs of the SU(2)-dressed CNOT on the two-parameter family.

    ``single`` averages one dressing (either gives the same value, equal to the
    plain CNOT baseline); ``per_state_max`` keeps the better of the two
    dressings separately for every state.
    """
    disk = PdfSpec(PdfKind.DISK)
    single = 1.0 - expected_value(lambda p: qr_round(p[:, 0], 1)[0], disk)
    best = 1.0 - expected_value(
        lambda p: np.maximum(qr_round(p[:, 0], 1)[0], qr_round(p[:, 1], 1)[0]),
        disk,
    )
    return {"single": single, "per_state_max": best}


def state_dependent_baseline() -> float:
    """Disk-average cost after the state-dependent transform and one CNOT round."""
    return 1.0 - expected_value(
        lambda p: state_dependent_cnot(p[:, 0], p[:, 1])[0], PdfSpec(PdfKind.DISK)
    )
