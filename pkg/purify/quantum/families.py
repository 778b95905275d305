"""Parametrized input-state families, their densities and local transforms."""

from __future__ import annotations

import math
import re
from collections.abc import Callable
from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.typing import ArrayLike, NDArray

from purify.constants import DOMAIN_TOL, FAMILY_METADATA, resolve_family_id
from purify.errors import ConfigError, DomainError
from purify.quantum.gellmann import B_GATE
from purify.quantum.qmat import (
    I2,
    SIGMA_X,
    CMatrix,
    DensityMatrix,
    as_matrix,
    dagger,
    projector,
    validate_density,
)

# ── Bell states ─────────────────────────────────────────────────

_R2 = 1 / math.sqrt(2)
PHI_PLUS = np.array([_R2, 0, 0, _R2], dtype=np.complex128)
PHI_MINUS = np.array([_R2, 0, 0, -_R2], dtype=np.complex128)
PSI_PLUS = np.array([0, _R2, _R2, 0], dtype=np.complex128)
PSI_MINUS = np.array([0, _R2, -_R2, 0], dtype=np.complex128)
UPSILON = (PSI_PLUS + 1j * PHI_MINUS) * _R2

P_PHI_PLUS = projector(PHI_PLUS)
P_PHI_MINUS = projector(PHI_MINUS)
P_PSI_PLUS = projector(PSI_PLUS)
P_PSI_MINUS = projector(PSI_MINUS)
P_UPSILON = projector(UPSILON)


def _unit_interval(x: ArrayLike) -> NDArray[np.float64]:
    values = np.asarray(x, dtype=np.float64)
    if np.any(values < -DOMAIN_TOL) or np.any(values > 1 + DOMAIN_TOL):
        raise DomainError("family parameter must lie in [0, 1]")
    return np.clip(values, 0.0, 1.0)[..., None, None]


def werner(x: ArrayLike) -> CMatrix:
    """Weight ``x`` on Psi- and ``(1 - x)/3`` on each other Bell state."""
    w = _unit_interval(x)
    return w * P_PSI_MINUS + (1 - w) / 3 * (np.eye(4) - P_PSI_MINUS)


def rotated_werner(x: ArrayLike) -> CMatrix:
    w = _unit_interval(x)
    zero = np.zeros_like(w)
    rows = [
        [1 + 2 * w, zero, zero, 1 - 4 * w],
        [zero, 2 - 2 * w, zero, zero],
        [zero, zero, 2 - 2 * w, zero],
        [1 - 4 * w, zero, zero, 1 + 2 * w],
    ]
    return _assemble(rows) / 6


def one_step(x: ArrayLike) -> CMatrix:
    w = _unit_interval(x)
    zero = np.zeros_like(w)
    rows = [
        [w / 2, zero, zero, -w / 2],
        [zero, zero, zero, zero],
        [zero, zero, 1 - w, zero],
        [-w / 2, zero, zero, w / 2],
    ]
    return _assemble(rows)


def phi_mix(x: ArrayLike) -> CMatrix:
    w = _unit_interval(x)
    return w * P_PHI_PLUS + (1 - w) * P_PHI_MINUS


def maz(x: ArrayLike) -> CMatrix:
    w = _unit_interval(x)
    return w * P_PSI_MINUS + (1 - w) * P_UPSILON


def qr(x: ArrayLike, y: ArrayLike) -> CMatrix:
    """Two-parameter family on the unit disk; concurrence ``sqrt(x^2 + y^2)``."""
    xs = np.asarray(x, dtype=np.float64)[..., None, None]
    ys = np.asarray(y, dtype=np.float64)[..., None, None]
    if np.any(xs**2 + ys**2 > 1 + DOMAIN_TOL):
        raise DomainError("qr parameters must satisfy x^2 + y^2 <= 1")
    iy = 1j * ys
    rows = [
        [1 - xs, iy, -iy, xs - 1],
        [-iy, xs + 1, -xs - 1, iy],
        [iy, -xs - 1, xs + 1, -iy],
        [xs - 1, -iy, iy, 1 - xs],
    ]
    return _assemble(rows) / 4


def _assemble(rows: list[list[NDArray]]) -> CMatrix:
    # each entry has shape (..., 1, 1); stitch them into (..., 4, 4)
    return np.concatenate(
        [np.concatenate(row, axis=-1) for row in rows], axis=-2
    ).astype(np.complex128)


# ── Local transforms ────────────────────────────────────────────

LOCAL_B = np.kron(dagger(B_GATE), B_GATE)
"""``b^dagger`` at A and ``b`` at B for a single pair."""


def local_b_transform(rho: ArrayLike | DensityMatrix) -> CMatrix:
    """``(b^dagger (x) b) rho (b^dagger (x) b)^dagger``; stacks broadcast."""
    matrix = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    return LOCAL_B @ matrix @ dagger(LOCAL_B)


def state_dep_unitary(x: float, y: float) -> CMatrix:
    """``exp(-i theta sigma_x)`` with ``theta`` fixed by ``(x, y)``.

    First quadrant only. ``cos(theta)^2 = 1/2 + sqrt((x + c) / (8 c))``,
    ``c = sqrt(x^2 + y^2)``; ``theta = 0`` at the origin.
    """
    if x < -DOMAIN_TOL or y < -DOMAIN_TOL:
        raise DomainError("state-dependent transform is defined for x, y >= 0")
    c = math.hypot(x, y)
    if c > 1 + DOMAIN_TOL:
        raise DomainError("state-dependent transform needs x^2 + y^2 <= 1")
    if c < 1e-15:
        theta = 0.0
    else:
        cos_theta = math.sqrt(0.5 + math.sqrt(max(x, 0.0) + c) / math.sqrt(8 * c))
        theta = math.acos(min(cos_theta, 1.0))
    return math.cos(theta) * I2 - 1j * math.sin(theta) * SIGMA_X


def state_dep_transform(x: float, y: float) -> tuple[CMatrix, DensityMatrix]:
    """Local operator ``U^dagger (x) U`` and the transformed ``qr(x, y)``."""
    u = state_dep_unitary(x, y)
    operator = np.kron(dagger(u), u)
    state = operator @ qr(x, y) @ dagger(operator)
    return operator, validate_density(state)


def bell_mixture(c: float) -> CMatrix:
    """``(1 + c)/2 |Psi-><Psi-| + (1 - c)/2 |Phi-><Phi-|``."""
    return (1 + c) / 2 * P_PSI_MINUS + (1 - c) / 2 * P_PHI_MINUS


# ── Probability densities ───────────────────────────────────────


class PdfKind(str, Enum):
    UNIFORM = "uniform"
    LINEAR = "2x"
    LINEAR_FALLING = "2(1-x)"
    QUADRATIC = "6x(1-x)"
    DISK = "disk"


@dataclass(frozen=True, slots=True)
class PdfSpec:
    """A parameter density with an exact inverse CDF."""

    kind: PdfKind
    lower: float = 0.0
    upper: float = 1.0

    def __post_init__(self) -> None:
        if self.kind is PdfKind.UNIFORM and not self.lower < self.upper:
            raise ConfigError("uniform(a,b] needs a < b")

    @property
    def dimension(self) -> int:
        return 2 if self.kind is PdfKind.DISK else 1

    @property
    def label(self) -> str:
        if self.kind is PdfKind.UNIFORM:
            return f"uniform({self.lower:g},{self.upper:g}]"
        return self.kind.value

    @property
    def support(self) -> tuple[float, float]:
        if self.kind is PdfKind.UNIFORM:
            return (self.lower, self.upper)
        if self.kind is PdfKind.DISK:
            return (-1.0, 1.0)
        return (0.0, 1.0)

    def density(self, points: ArrayLike) -> NDArray[np.float64]:
        """Density at ``(m, dimension)`` points (or scalars for 1-D pdfs)."""
        p = np.asarray(points, dtype=np.float64)
        if self.kind is PdfKind.DISK:
            inside = (p[..., 0] ** 2 + p[..., 1] ** 2) <= 1.0
            return np.where(inside, 1 / math.pi, 0.0)
        x = p[..., 0] if p.ndim >= 2 else p
        low, high = self.support
        if self.kind is PdfKind.UNIFORM:
            inside = (x > low) & (x <= high)
        else:
            inside = (x >= low) & (x <= high)
        match self.kind:
            case PdfKind.UNIFORM:
                values = np.full_like(x, 1 / (self.upper - self.lower))
            case PdfKind.LINEAR:
                values = 2 * x
            case PdfKind.LINEAR_FALLING:
                values = 2 * (1 - x)
            case _:
                values = 6 * x * (1 - x)
        return np.where(inside, values, 0.0)

    def inverse_cdf(self, u: NDArray[np.float64]) -> NDArray[np.float64]:
        """Map base points in ``[0, 1)^dimension`` onto the support."""
        u = np.asarray(u, dtype=np.float64).reshape(-1, self.dimension)
        match self.kind:
            case PdfKind.UNIFORM:
                # (a, b]: u = 0 lands on b, never on a
                return self.upper - (self.upper - self.lower) * u
            case PdfKind.LINEAR:
                return np.sqrt(u)
            case PdfKind.LINEAR_FALLING:
                return 1 - np.sqrt(1 - u)
            case PdfKind.QUADRATIC:
                # solves 3x^2 - 2x^3 = u
                return 0.5 + np.sin(np.arcsin(np.clip(2 * u - 1, -1, 1)) / 3)
            case PdfKind.DISK:
                radius = np.sqrt(u[:, 0])
                phi = 2 * math.pi * u[:, 1]
                return np.column_stack([radius * np.cos(phi), radius * np.sin(phi)])
        raise ConfigError(f"unsupported pdf {self.kind}")  # pragma: no cover


_UNIFORM_RE = re.compile(
    r"^uniform\s*[\(\[]\s*([-+0-9.eE]+)\s*,\s*([-+0-9.eE]+)\s*[\]\)]$"
)


def parse_pdf(text: str) -> PdfSpec:
    """Parse ``uniform(a,b]``, ``uniform``, ``2x``, ``2(1-x)``, ``6x(1-x)``, ``disk``."""
    key = text.strip().lower().replace(" ", "")
    if key == "uniform":
        return PdfSpec(PdfKind.UNIFORM)
    match = _UNIFORM_RE.match(key)
    if match:
        lower, upper = float(match.group(1)), float(match.group(2))
        return PdfSpec(PdfKind.UNIFORM, lower, upper)
    for kind in PdfKind:
        if key == kind.value:
            return PdfSpec(kind)
    raise ConfigError(f"unknown pdf {text!r}")


# ── Family registry ─────────────────────────────────────────────


@dataclass(frozen=True, slots=True)
class StateFamily:
    """Parameter map ``x -> rho(x)`` over an interval or the unit disk.

    ``build`` and ``known_concurrence`` take a ``(m, arity)`` array.
    """

    name: str
    arity: int
    domain: str
    build: Callable[[NDArray], CMatrix]
    known_concurrence: Callable[[NDArray], NDArray] | None = None
    default_pdf: str = "uniform"
    title: str = ""

    def states(self, points: ArrayLike) -> CMatrix:
        p = np.asarray(points, dtype=np.float64).reshape(-1, self.arity)
        return self.build(p)

    def check_pdf(self, pdf: PdfSpec) -> None:
        if (self.domain == "disk") != (pdf.dimension == 2):
            raise ConfigError(f"pdf {pdf.label} does not match family {self.name}")
        if self.domain == "interval" and not (
            pdf.support[0] >= -DOMAIN_TOL and pdf.support[1] <= 1 + DOMAIN_TOL
        ):
            raise ConfigError(f"pdf support {pdf.support} leaves [0, 1]")

    def grid(self, resolution: int) -> NDArray[np.float64]:
        """Deterministic evaluation grid: ``resolution`` points on [0, 1], or the
        points of a ``resolution x resolution`` square grid inside the disk."""
        if self.domain == "interval":
            return np.linspace(0.0, 1.0, resolution)[:, None]
        axis = np.linspace(-1.0, 1.0, resolution)
        xs, ys = np.meshgrid(axis, axis, indexing="ij")
        points = np.column_stack([xs.ravel(), ys.ravel()])
        return points[np.sum(points**2, axis=1) <= 1.0 + DOMAIN_TOL]


def _family(
    name: str,
    build: Callable[[NDArray], CMatrix],
    known: Callable[[NDArray], NDArray],
) -> StateFamily:
    meta = FAMILY_METADATA[name]
    return StateFamily(
        name=name,
        arity=meta["arity"],
        domain=meta["domain"],
        build=build,
        known_concurrence=known,
        default_pdf=meta["default_pdf"],
        title=meta["title"],
    )


def _werner_concurrence(p: NDArray) -> NDArray:
    return np.maximum(0.0, 2 * p[:, 0] - 1)


FAMILIES: dict[str, StateFamily] = {
    "werner": _family("werner", lambda p: werner(p[:, 0]), _werner_concurrence),
    "rotated-werner": _family(
        "rotated-werner", lambda p: rotated_werner(p[:, 0]), _werner_concurrence
    ),
    "one-step": _family("one-step", lambda p: one_step(p[:, 0]), lambda p: p[:, 0]),
    "phi-mix": _family(
        "phi-mix", lambda p: phi_mix(p[:, 0]), lambda p: np.abs(1 - 2 * p[:, 0])
    ),
    "maz": _family("maz", lambda p: maz(p[:, 0]), lambda p: p[:, 0]),
    "qr": _family(
        "qr",
        lambda p: qr(p[:, 0], p[:, 1]),
        lambda p: np.hypot(p[:, 0], p[:, 1]),
    ),
}


def get_family(name: str) -> StateFamily:
    """Look a family up by id or alias (``example1`` is ``rotated-werner``)."""
    try:
        key = resolve_family_id(name)
    except KeyError:
        key = name
    if key not in FAMILIES:
        raise ConfigError(f"unknown state family {name!r}")
    return FAMILIES[key]


def register_family(family: StateFamily, check_points: ArrayLike | None = None) -> None:
    """Add a custom family; positivity is only checked numerically."""
    if check_points is not None:
        for state in family.states(check_points):
            validate_density(as_matrix(state))
    FAMILIES[family.name] = family
